"""
Rendering of annotated word images and fixed-size test images.

Glyphs are drawn into an integer label map (0 = paper, k = k-th character),
the label map is resized with nearest-neighbour sampling, and only then is
the RGB raster painted from it. Boxes are measured on the final label map,
so they enclose exactly the pixels of their character (base plus mark).
Label maps are only ever upsampled, which keeps every glyph pixel alive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Annotated, Dict, List, Literal, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from PIL import Image
from pydantic import BaseModel, Field

from app.corpus.glyphs import CELL_HEIGHT, FONT_VARIANTS, get_atlas
from app.diacritics import Language, canonical_index

WORD_HEIGHT = 16
TEST_IMAGE_SIZE = 150
TEST_MARGIN = 4
LEADING = 4
MIN_CONTRAST = 96

Channel = Annotated[int, Field(ge=0, le=255)]
Color = Tuple[Channel, Channel, Channel]


class TextOverflowError(ValueError):
    """The text does not fit the test-image canvas."""


class RenderStyle(BaseModel):
    """Everything that varies between two renderings of the same text."""

    font: Literal["regular", "bold"] = "regular"
    glyph_height: int = Field(16, ge=CELL_HEIGHT, le=32, description="Cell height in test images")
    foreground: Color = (0, 0, 0)
    background: Color = (255, 255, 255)
    spacing: int = Field(1, ge=0, le=4, description="Blank columns between glyph cells")
    stretch: float = Field(1.0, ge=1.0, le=1.5, description="Extra horizontal scaling of word images")
    pad_top: int = Field(0, ge=0, le=2)
    pad_bottom: int = Field(0, ge=0, le=2)
    margin: int = Field(1, ge=0, le=8, description="Blank columns left and right of a word")
    seed: Optional[int] = None

    @property
    def contrast(self) -> float:
        return abs(float(np.mean(self.foreground)) - float(np.mean(self.background)))


class Box(NamedTuple):
    """Pixel box given by centre and size, plus the diacritic class index."""

    cx: float
    cy: float
    w: float
    h: float
    cls: int

    def corners(self) -> Tuple[float, float, float, float]:
        return (self.cx - self.w / 2, self.cy - self.h / 2, self.cx + self.w / 2, self.cy + self.h / 2)


@dataclass
class AnnotatedImage:
    raster: np.ndarray  # (H, W, 3) uint8
    boxes: List[Box] = field(default_factory=list)
    language: Optional[Language] = None
    name: Optional[str] = None

    @property
    def height(self) -> int:
        return int(self.raster.shape[0])

    @property
    def width(self) -> int:
        return int(self.raster.shape[1])


def random_style(rng: np.random.Generator, glyph_heights: Tuple[int, int] = (12, 16)) -> RenderStyle:
    """Draw a style; foreground and background differ by at least ``MIN_CONTRAST`` grey levels."""
    font = FONT_VARIANTS[int(rng.integers(len(FONT_VARIANTS)))]
    while True:
        background = rng.integers(0, 256, size=3)
        foreground = rng.integers(0, 256, size=3)
        if abs(foreground.mean() - background.mean()) >= MIN_CONTRAST:
            break
    pad_top, pad_bottom = (int(v) for v in rng.integers(0, 3, size=2))
    return RenderStyle(
        font=font,
        glyph_height=int(rng.integers(glyph_heights[0], glyph_heights[1] + 1)),
        foreground=tuple(int(v) for v in foreground),
        background=tuple(int(v) for v in background),
        spacing=int(rng.integers(1, 3)),
        stretch=float(rng.uniform(1.0, 1.25)),
        pad_top=pad_top,
        pad_bottom=pad_bottom,
        margin=int(rng.integers(1, 4)),
        seed=int(rng.integers(2**31)),
    )


def _line_labels(text: str, font: str, spacing: int, first_id: int) -> Tuple[np.ndarray, Dict[int, str]]:
    atlas = get_atlas(font)
    advance = atlas.width + spacing
    width = len(text) * atlas.width + spacing * (len(text) - 1)
    labels = np.zeros((CELL_HEIGHT, width), dtype=np.int32)
    chars: Dict[int, str] = {}
    for i, ch in enumerate(text):
        glyph = atlas.glyph(ch)
        x = i * advance
        labels[:, x:x + atlas.width][glyph] = first_id + i
        chars[first_id + i] = ch
    return labels, chars


def _native_width(text: str, style: RenderStyle) -> int:
    return len(text) * get_atlas(style.font).width + style.spacing * (len(text) - 1)


def _resize_labels(labels: np.ndarray, width: int, height: int) -> np.ndarray:
    if width < labels.shape[1] or height < labels.shape[0]:
        raise ValueError(f"label maps are only upsampled: {labels.shape[::-1]} -> {(width, height)}")
    resized = Image.fromarray(labels.astype(np.int32)).resize((width, height), Image.Resampling.NEAREST)
    return np.asarray(resized, dtype=np.int32)


def _paint(labels: np.ndarray, style: RenderStyle) -> np.ndarray:
    ink = (labels > 0)[..., None]
    return np.where(ink, np.array(style.foreground, dtype=np.uint8), np.array(style.background, dtype=np.uint8))


def _diacritic_boxes(labels: np.ndarray, chars: Dict[int, str]) -> List[Box]:
    boxes = []
    for label_id, ch in chars.items():
        cls = canonical_index(ch)
        if cls is None:
            continue
        ys, xs = np.nonzero(labels == label_id)
        if ys.size == 0:
            continue
        x0, x1, y0, y1 = int(xs.min()), int(xs.max()) + 1, int(ys.min()), int(ys.max()) + 1
        w, h = x1 - x0, y1 - y0
        boxes.append(Box(x0 + w / 2, y0 + h / 2, float(w), float(h), cls))
    return boxes


def render_word(word: str, style: RenderStyle) -> AnnotatedImage:
    """
    Draw ``word`` as a 16-pixel-high image with one box per diacritic.

    The text is cropped to its inked rows, padded by ``pad_top``/``pad_bottom``
    rows and ``margin`` columns, then scaled to height 16 (times ``stretch``
    horizontally).
    """
    if not word:
        raise ValueError("Cannot render an empty word")
    labels, chars = _line_labels(word, style.font, style.spacing, first_id=1)
    inked = np.flatnonzero(labels.any(axis=1))
    if inked.size == 0:
        raise ValueError(f"Word {word!r} has no visible glyphs")

    labels = labels[inked[0]:inked[-1] + 1]
    labels = np.pad(labels, ((style.pad_top, style.pad_bottom), (style.margin, style.margin)))
    height, width = labels.shape
    scale = WORD_HEIGHT / height
    labels = _resize_labels(labels, max(width, int(round(width * scale * style.stretch))), WORD_HEIGHT)
    return AnnotatedImage(raster=_paint(labels, style), boxes=_diacritic_boxes(labels, chars))


def wrap_words(words: Sequence[str], style: RenderStyle, size: int = TEST_IMAGE_SIZE) -> List[str]:
    """Greedy left-aligned wrap of ``words`` into lines that fit the canvas width."""
    scale = style.glyph_height / CELL_HEIGHT
    usable = size - 2 * TEST_MARGIN
    lines: List[str] = []
    current = ""
    for word in words:
        candidate = f"{current} {word}" if current else word
        if round(_native_width(candidate, style) * scale) <= usable:
            current = candidate
            continue
        if not current:
            raise TextOverflowError(f"Word {word!r} is wider than a {size}px line at glyph height {style.glyph_height}")
        lines.append(current)
        current = word
        if round(_native_width(current, style) * scale) > usable:
            raise TextOverflowError(f"Word {word!r} is wider than a {size}px line at glyph height {style.glyph_height}")
    if current:
        lines.append(current)
    return lines


def render_test_image(
    words: Sequence[str],
    lang: Optional[Language],
    style: RenderStyle,
    size: int = TEST_IMAGE_SIZE,
) -> AnnotatedImage:
    """Lay ``words`` out as left-aligned lines on a ``size`` x ``size`` canvas."""
    if not words:
        raise ValueError("A test image needs at least one word")
    lines = wrap_words(words, style, size)
    scale = style.glyph_height / CELL_HEIGHT

    canvas = np.zeros((size, size), dtype=np.int32)
    chars: Dict[int, str] = {}
    next_id = 1
    y = TEST_MARGIN
    for line in lines:
        if y + style.glyph_height > size - TEST_MARGIN:
            raise TextOverflowError(f"{len(lines)} lines do not fit a {size}px canvas at glyph height {style.glyph_height}")
        labels, line_chars = _line_labels(line, style.font, style.spacing, first_id=next_id)
        next_id += len(line)
        chars.update(line_chars)
        scaled = _resize_labels(labels, int(round(labels.shape[1] * scale)), style.glyph_height)
        canvas[y:y + style.glyph_height, TEST_MARGIN:TEST_MARGIN + scaled.shape[1]] = scaled
        y += style.glyph_height + LEADING

    boxes = _diacritic_boxes(canvas, chars)
    if not boxes:
        raise ValueError(f"Test image text {' '.join(words)!r} contains no diacritic")
    return AnnotatedImage(raster=_paint(canvas, style), boxes=boxes, language=lang)
