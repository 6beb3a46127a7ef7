"""
End-to-end identification: lines -> per-line detections -> presence -> language.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
from PIL import Image

from app.corpus.render import WORD_HEIGHT
from app.detector.boxes import Detection
from app.detector.inference import detect
from app.detector.network import SqueezeDetector
from app.diacritics import codepoint_of
from app.langid.network import LanguagePrediction, predict, prediction_to_json
from app.langid.presence import DEFAULT_MIN_CONFIDENCE, presence_from_detections
from app.nn.network import Sequential
from app.pipeline.localize import LineBox, ink_mask, localize_lines

LINE_PAD = 1
STAGES = ("localize", "detect", "langid")


@dataclass
class LineInput:
    """A line crop fitted to the detector height, and the map back to image pixels."""

    raster: np.ndarray
    origin: Tuple[float, float]
    scale: Tuple[float, float]

    def to_image(self, detection: Detection) -> Detection:
        sx, sy = self.scale
        return detection._replace(
            cx=self.origin[0] + detection.cx / sx,
            cy=self.origin[1] + detection.cy / sy,
            w=detection.w / sx,
            h=detection.h / sy,
        )


@dataclass
class IdentifyResult:
    prediction: LanguagePrediction
    presence: np.ndarray
    lines: List[LineBox] = field(default_factory=list)
    detections: List[Detection] = field(default_factory=list)
    timings_ms: Dict[str, float] = field(default_factory=dict)

    def to_json(self) -> Dict[str, Any]:
        payload = prediction_to_json(self.prediction)
        payload["detections"] = detections_to_json(self.detections)
        payload["lines"] = [line._asdict() for line in self.lines]
        return payload


def detections_to_json(detections: Sequence[Detection]) -> List[Dict[str, Any]]:
    return [
        {
            "cx": round(d.cx, 3),
            "cy": round(d.cy, 3),
            "w": round(d.w, 3),
            "h": round(d.h, 3),
            "class": d.cls,
            "codepoint": codepoint_of(d.cls),
            "confidence": round(d.confidence, 6),
        }
        for d in detections
    ]


def _background(crop: np.ndarray) -> np.ndarray:
    paper = crop[~ink_mask(crop)]
    if len(paper) == 0:
        return crop[0, 0]
    return np.median(paper, axis=0).astype(np.uint8)


def line_input(raster: np.ndarray, line: LineBox, height: int = WORD_HEIGHT) -> LineInput:
    """
    Crop ``line``, pad it by ``LINE_PAD`` pixels of background on every side
    and rescale it (nearest neighbour) to ``height`` rows, keeping the aspect
    ratio. Word images for detector training are built the same way.
    """
    crop = line.crop(np.asarray(raster, dtype=np.uint8))
    padded = np.empty((crop.shape[0] + 2 * LINE_PAD, crop.shape[1] + 2 * LINE_PAD, 3), dtype=np.uint8)
    padded[:] = _background(crop)
    padded[LINE_PAD:LINE_PAD + crop.shape[0], LINE_PAD:LINE_PAD + crop.shape[1]] = crop
    h, w = padded.shape[:2]
    width = max(1, int(round(w * height / h)))
    resized = np.asarray(Image.fromarray(padded).resize((width, height), Image.Resampling.NEAREST))
    return LineInput(
        raster=resized,
        origin=(float(line.x - LINE_PAD), float(line.y - LINE_PAD)),
        scale=(width / w, height / h),
    )


def detect_lines(
    raster: np.ndarray,
    detector: SqueezeDetector,
    lines: Sequence[LineBox],
) -> List[List[Detection]]:
    """Detections per line, in image coordinates."""
    per_line = []
    for line in lines:
        fitted = line_input(raster, line)
        per_line.append([fitted.to_image(d) for d in detect(detector, fitted.raster)])
    return per_line


def identify_language(
    raster: np.ndarray,
    detector: SqueezeDetector,
    langid: Sequential,
    min_confidence: float = DEFAULT_MIN_CONFIDENCE,
) -> IdentifyResult:
    """
    Predict the language of the text in ``raster``. Presence bits are the
    union over all lines, so an image without lines or without confident
    detections comes out indeterminate.
    """
    timings: Dict[str, float] = {}

    started = time.perf_counter()
    lines = localize_lines(raster)
    timings["localize"] = (time.perf_counter() - started) * 1000

    started = time.perf_counter()
    per_line = detect_lines(raster, detector, lines)
    timings["detect"] = (time.perf_counter() - started) * 1000

    started = time.perf_counter()
    detections = [d for line in per_line for d in line]
    presence = presence_from_detections(detections, min_confidence)
    prediction = predict(langid, presence)
    timings["langid"] = (time.perf_counter() - started) * 1000

    timings["total"] = sum(timings[stage] for stage in STAGES)
    return IdentifyResult(
        prediction=prediction,
        presence=presence,
        lines=lines,
        detections=[d for d in detections if d.confidence >= min_confidence],
        timings_ms=timings,
    )
