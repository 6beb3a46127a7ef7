"""
Glyph atlas: 12-row binary bitmaps per character and font variant.

Accented letters are composed on demand from a base glyph plus a mark
(Unicode NFD tells which). Marks go on rows 0-1 over bases that reach the
cap/ascender line, on rows 2-3 over x-height bases, and cedillas on rows
10-11. A blank row always separates a mark above from its base.
"""

from __future__ import annotations

import unicodedata
from functools import lru_cache
from typing import Tuple

import numpy as np

from app.corpus.font_data import BASE_GLYPHS, BELOW_MARKS, MARKS

CELL_HEIGHT = 12
BASE_TOP = 3
BASE_WIDTH = 5
FONT_VARIANTS: Tuple[str, ...] = ("regular", "bold")


class UnknownGlyphError(ValueError):
    """The atlas cannot draw this character."""

    def __init__(self, ch: str):
        super().__init__(f"No glyph for U+{ord(ch):04X} {ch!r}")
        self.char = ch


def _rows_to_array(rows) -> np.ndarray:
    return np.array([[c == "#" for c in row] for row in rows], dtype=bool)


@lru_cache(maxsize=None)
def _regular_glyph(ch: str) -> np.ndarray:
    cell = np.zeros((CELL_HEIGHT, BASE_WIDTH), dtype=bool)
    if ch in BASE_GLYPHS:
        cell[BASE_TOP:] = _rows_to_array(BASE_GLYPHS[ch])
        return cell

    decomposed = unicodedata.normalize("NFD", ch)
    if len(decomposed) != 2 or decomposed[1] not in MARKS:
        raise UnknownGlyphError(ch)
    base, mark = decomposed
    if base == "i":
        base = "ı"
    if base not in BASE_GLYPHS:
        raise UnknownGlyphError(ch)

    cell[BASE_TOP:] = _rows_to_array(BASE_GLYPHS[base])
    if mark in BELOW_MARKS:
        top = CELL_HEIGHT - 2
    elif cell[BASE_TOP].any():
        top = 0
    else:
        top = 2
    cell[top:top + 2] |= _rows_to_array(MARKS[mark])
    return cell


class GlyphAtlas:
    """Bitmaps for one font variant. ``bold`` widens every stroke by one column."""

    def __init__(self, variant: str = "regular"):
        if variant not in FONT_VARIANTS:
            raise ValueError(f"Unknown font variant '{variant}' (expected one of {FONT_VARIANTS})")
        self.variant = variant

    @property
    def width(self) -> int:
        return BASE_WIDTH + (1 if self.variant == "bold" else 0)

    def glyph(self, ch: str) -> np.ndarray:
        """Boolean (12, width) ink mask for ``ch``; raises ``UnknownGlyphError``."""
        regular = _regular_glyph(ch)
        if self.variant == "regular":
            return regular.copy()
        bold = np.zeros((CELL_HEIGHT, self.width), dtype=bool)
        bold[:, :BASE_WIDTH] |= regular
        bold[:, 1:] |= regular
        return bold

    def covers(self, ch: str) -> bool:
        try:
            _regular_glyph(ch)
        except UnknownGlyphError:
            return False
        return True


@lru_cache(maxsize=None)
def get_atlas(variant: str = "regular") -> GlyphAtlas:
    return GlyphAtlas(variant)
