"""
Text-line localization by horizontal projection profile.

The raster is binarized with a global Otsu threshold on the channel mean;
the minority side of the threshold is ink. Rows holding ink form bands,
bands separated by at most ``MERGE_GAP`` blank rows are merged (the blank
row under a mark is up to three pixels tall at large glyph heights, while
rendered lines are at least four rows apart), and bands whose fullest row has
fewer than ``NOISE_FLOOR`` ink pixels are dropped.
"""

from __future__ import annotations

from typing import List, NamedTuple, Tuple

import cv2
import numpy as np

MERGE_GAP = 3
NOISE_FLOOR = 2


class LineBox(NamedTuple):
    x: int
    y: int
    w: int
    h: int

    def crop(self, raster: np.ndarray) -> np.ndarray:
        return raster[self.y:self.y + self.h, self.x:self.x + self.w]

    def contains(self, x: float, y: float) -> bool:
        return self.x <= x <= self.x + self.w and self.y <= y <= self.y + self.h


def ink_mask(raster: np.ndarray) -> np.ndarray:
    """Boolean ink mask; all False for a single-colour raster."""
    raster = np.asarray(raster)
    if raster.ndim != 3 or raster.shape[2] != 3:
        raise ValueError(f"Expected an (H, W, 3) raster, got shape {raster.shape}")
    gray = np.round(raster.astype(np.float32).mean(axis=2)).astype(np.uint8)
    if gray.min() == gray.max():
        return np.zeros(gray.shape, dtype=bool)
    _, binary = cv2.threshold(gray, 0, 255, cv2.THRESH_BINARY + cv2.THRESH_OTSU)
    bright = binary > 0
    return bright if bright.sum() * 2 < bright.size else ~bright


def _row_bands(counts: np.ndarray) -> List[Tuple[int, int]]:
    bands: List[Tuple[int, int]] = []
    for y in np.flatnonzero(counts > 0):
        y = int(y)
        if bands and y - bands[-1][1] <= MERGE_GAP + 1:
            bands[-1] = (bands[-1][0], y)
        else:
            bands.append((y, y))
    return [(top, bottom) for top, bottom in bands if counts[top:bottom + 1].max() >= NOISE_FLOOR]


def localize_lines(raster: np.ndarray) -> List[LineBox]:
    """Line boxes, top to bottom, each trimmed to its ink columns."""
    mask = ink_mask(raster)
    lines = []
    for top, bottom in _row_bands(mask.sum(axis=1)):
        cols = np.flatnonzero(mask[top:bottom + 1].any(axis=0))
        lines.append(LineBox(int(cols[0]), top, int(cols[-1] - cols[0] + 1), bottom - top + 1))
    return lines
