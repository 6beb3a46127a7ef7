"""Box geometry on ``(cx, cy, w, h)`` boxes and per-class non-maximum suppression."""

from __future__ import annotations

from typing import List, NamedTuple, Sequence

import numpy as np


class Detection(NamedTuple):
    cx: float
    cy: float
    w: float
    h: float
    cls: int
    confidence: float

    @property
    def box(self) -> np.ndarray:
        return np.array([self.cx, self.cy, self.w, self.h])


def _corners(boxes: np.ndarray) -> np.ndarray:
    boxes = np.asarray(boxes, dtype=np.float64)
    return np.stack(
        [
            boxes[..., 0] - boxes[..., 2] / 2,
            boxes[..., 1] - boxes[..., 3] / 2,
            boxes[..., 0] + boxes[..., 2] / 2,
            boxes[..., 1] + boxes[..., 3] / 2,
        ],
        axis=-1,
    )


def iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise IoU between (N, 4) and (M, 4) box arrays."""
    ca = _corners(np.reshape(a, (-1, 4)))
    cb = _corners(np.reshape(b, (-1, 4)))
    iw = np.clip(np.minimum(ca[:, None, 2], cb[None, :, 2]) - np.maximum(ca[:, None, 0], cb[None, :, 0]), 0.0, None)
    ih = np.clip(np.minimum(ca[:, None, 3], cb[None, :, 3]) - np.maximum(ca[:, None, 1], cb[None, :, 1]), 0.0, None)
    inter = iw * ih
    area_a = (ca[:, 2] - ca[:, 0]) * (ca[:, 3] - ca[:, 1])
    area_b = (cb[:, 2] - cb[:, 0]) * (cb[:, 3] - cb[:, 1])
    union = area_a[:, None] + area_b[None, :] - inter
    return np.where(union > 0, inter / np.where(union > 0, union, 1.0), 0.0)


def iou(a: Sequence[float], b: Sequence[float]) -> float:
    """IoU of two single boxes given as ``(cx, cy, w, h, ...)``."""
    return float(iou_matrix(np.asarray(a[:4], dtype=np.float64), np.asarray(b[:4], dtype=np.float64))[0, 0])


def nms(detections: Sequence[Detection], threshold: float = 0.2) -> List[Detection]:
    """
    Greedy per-class suppression. Detections are visited by descending
    confidence (ties keep input order); one is kept when its IoU with every
    kept detection of the same class is at most ``threshold``.
    """
    if not detections:
        return []
    order = sorted(range(len(detections)), key=lambda i: -detections[i].confidence)
    boxes = np.array([detections[i].box for i in order])
    classes = np.array([detections[i].cls for i in order])
    overlaps = iou_matrix(boxes, boxes)

    keep = np.zeros(len(order), dtype=bool)
    for pos in range(len(order)):
        rivals = keep[:pos] & (classes[:pos] == classes[pos])
        keep[pos] = not np.any(overlaps[pos, :pos][rivals] > threshold)
    return [detections[order[pos]] for pos in np.flatnonzero(keep)]
