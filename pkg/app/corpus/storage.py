"""
Corpus directories: one image file per sample plus ``annotations.jsonl``.

Each annotation line reads
``{"image": "000000.png", "lang": "French" | null, "boxes": [[cx, cy, w, h, class], ...]}``.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable, List

import numpy as np
from PIL import Image

from app.corpus.render import AnnotatedImage, Box
from app.diacritics import NUM_DIACRITICS, language_by_name
from app.utils.logger import get_logger

logger = get_logger()

ANNOTATIONS_FILE = "annotations.jsonl"
IMAGE_FORMATS = {"png": "PNG", "ppm": "PPM"}
_BOUNDS_TOLERANCE = 1e-6


class CorpusFormatError(ValueError):
    """A malformed annotation, reported with its file and line number."""

    def __init__(self, path: Path, line: int, message: str):
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


def write_corpus(images: Iterable[AnnotatedImage], directory: Path, image_format: str = "png") -> int:
    """Write images and their annotations; returns the number written."""
    if image_format not in IMAGE_FORMATS:
        raise ValueError(f"Unsupported image format '{image_format}' (expected one of {sorted(IMAGE_FORMATS)})")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)

    count = 0
    with (directory / ANNOTATIONS_FILE).open("w", encoding="utf-8") as handle:
        for index, image in enumerate(images):
            name = f"{index:06d}.{image_format}"
            Image.fromarray(np.ascontiguousarray(image.raster, dtype=np.uint8)).save(
                directory / name, format=IMAGE_FORMATS[image_format]
            )
            record = {
                "image": name,
                "lang": image.language.label if image.language is not None else None,
                "boxes": [[float(b.cx), float(b.cy), float(b.w), float(b.h), int(b.cls)] for b in image.boxes],
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1

    logger.info(f"CORPUS WRITTEN | dir={directory} | images={count} | format={image_format}")
    return count


def _parse_box(raw, width: int, height: int) -> Box:
    if not isinstance(raw, list) or len(raw) != 5:
        raise ValueError(f"box must be [cx, cy, w, h, class], got {raw!r}")
    cx, cy, w, h, cls = raw
    if not isinstance(cls, int) or isinstance(cls, bool) or not 0 <= cls < NUM_DIACRITICS:
        raise ValueError(f"class must be an integer in [0, {NUM_DIACRITICS}), got {cls!r}")
    box = Box(float(cx), float(cy), float(w), float(h), cls)
    if box.w <= 0 or box.h <= 0:
        raise ValueError(f"box has non-positive size: {raw!r}")
    x0, y0, x1, y1 = box.corners()
    tol = _BOUNDS_TOLERANCE
    if x0 < -tol or y0 < -tol or x1 > width + tol or y1 > height + tol:
        raise ValueError(f"box {raw!r} exceeds the {width}x{height} raster")
    return box


def read_corpus(directory: Path) -> List[AnnotatedImage]:
    """Load a corpus written by ``write_corpus``. A directory without annotations is an empty corpus."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileNotFoundError(f"Corpus directory not found: {directory}")
    annotations = directory / ANNOTATIONS_FILE
    if not annotations.exists():
        logger.warning(f"CORPUS EMPTY | dir={directory} | reason=no {ANNOTATIONS_FILE}")
        return []

    images: List[AnnotatedImage] = []
    with annotations.open("r", encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
                if not isinstance(record, dict) or not isinstance(record.get("image"), str):
                    raise ValueError("missing 'image' path")
                image_path = directory / record["image"]
                if not image_path.exists():
                    raise ValueError(f"image file {record['image']!r} does not exist")
                with Image.open(image_path) as pil_image:
                    raster = np.array(pil_image.convert("RGB"), dtype=np.uint8)
                lang = record.get("lang")
                language = language_by_name(lang) if lang is not None else None
                height, width = raster.shape[:2]
                boxes = [_parse_box(raw, width, height) for raw in record.get("boxes", [])]
            except ValueError as e:
                # json.JSONDecodeError is a ValueError too
                raise CorpusFormatError(annotations, line_no, str(e)) from e
            images.append(AnnotatedImage(raster=raster, boxes=boxes, language=language, name=record["image"]))

    logger.info(f"CORPUS LOADED | dir={directory} | images={len(images)}")
    return images
