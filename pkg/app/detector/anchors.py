"""
Anchor priors and the box <-> delta transform.

Anchors are stored as an (A, 4) array of ``(cx, cy, w, h)`` in input
pixels, ordered by grid row ``i``, grid column ``j``, then shape ``k``,
which matches the (H/s, W/s, K, C+5) view of the ConvDet output for grid
stride s (4 for the diacritic network, 16 for the stock baseline).
"""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from app.detector.config import GRID_STRIDES, DetectorConfig

GRID_STRIDE = GRID_STRIDES["diacritic"]


def grid_shape(height: int, width: int, stride: int = GRID_STRIDE) -> Tuple[int, int]:
    """ConvDet grid for an input image; the height must be a multiple of the stride."""
    if height % stride:
        raise ValueError(f"Detector input height must be divisible by {stride}, got {height}")
    return height // stride, -(-width // stride)


def generate_anchors(grid_h: int, grid_w: int, config: DetectorConfig) -> np.ndarray:
    if grid_h < 1 or grid_w < 1:
        raise ValueError(f"Grid must be at least 1x1, got {grid_h}x{grid_w}")
    shapes = np.asarray(config.anchor_shapes, dtype=np.float64)
    k = len(shapes)
    stride = config.grid_stride
    cy = (np.arange(grid_h) + 0.5) * stride
    cx = (np.arange(grid_w) + 0.5) * stride
    anchors = np.empty((grid_h, grid_w, k, 4))
    anchors[..., 0] = cx[None, :, None]
    anchors[..., 1] = cy[:, None, None]
    anchors[..., 2] = shapes[:, 0]
    anchors[..., 3] = shapes[:, 1]
    return anchors.reshape(-1, 4)


def encode(boxes: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    """Deltas that turn ``anchors`` into ``boxes`` (both ``(..., 4)`` cx, cy, w, h)."""
    boxes = np.asarray(boxes, dtype=np.float64)
    anchors = np.asarray(anchors, dtype=np.float64)
    return np.stack(
        [
            (boxes[..., 0] - anchors[..., 0]) / anchors[..., 2],
            (boxes[..., 1] - anchors[..., 1]) / anchors[..., 3],
            np.log(boxes[..., 2] / anchors[..., 2]),
            np.log(boxes[..., 3] / anchors[..., 3]),
        ],
        axis=-1,
    )


def decode(deltas: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    """Inverse of ``encode``. Size deltas are capped so ``exp`` stays finite."""
    deltas = np.asarray(deltas, dtype=np.float64)
    anchors = np.asarray(anchors, dtype=np.float64)
    return np.stack(
        [
            anchors[..., 0] + anchors[..., 2] * deltas[..., 0],
            anchors[..., 1] + anchors[..., 3] * deltas[..., 1],
            anchors[..., 2] * np.exp(np.minimum(deltas[..., 2], 20.0)),
            anchors[..., 3] * np.exp(np.minimum(deltas[..., 3], 20.0)),
        ],
        axis=-1,
    )


def clip_boxes(boxes: np.ndarray, height: int, width: int, min_size: float = 1e-3) -> np.ndarray:
    x0 = np.clip(boxes[..., 0] - boxes[..., 2] / 2, 0.0, width)
    y0 = np.clip(boxes[..., 1] - boxes[..., 3] / 2, 0.0, height)
    x1 = np.clip(boxes[..., 0] + boxes[..., 2] / 2, 0.0, width)
    y1 = np.clip(boxes[..., 1] + boxes[..., 3] / 2, 0.0, height)
    w = np.maximum(x1 - x0, min_size)
    h = np.maximum(y1 - y0, min_size)
    return np.stack([x0 + (x1 - x0) / 2, y0 + (y1 - y0) / 2, w, h], axis=-1)


def _shape_iou(shapes: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    inter = np.minimum(shapes[:, None, 0], centroids[None, :, 0]) * np.minimum(shapes[:, None, 1], centroids[None, :, 1])
    union = (shapes[:, 0] * shapes[:, 1])[:, None] + (centroids[:, 0] * centroids[:, 1])[None, :] - inter
    return inter / union


def fit_anchor_shapes(
    sizes: Sequence[Tuple[float, float]],
    k: int = 9,
    seed: int = 0,
    iterations: int = 100,
) -> List[Tuple[float, float]]:
    """
    k-means over box ``(w, h)`` pairs with ``1 - IoU`` as the distance.
    Returns ``k`` shapes sorted by width, then height.
    """
    shapes = np.asarray(sizes, dtype=np.float64).reshape(-1, 2)
    distinct = np.unique(shapes, axis=0)
    if len(distinct) < k:
        raise ValueError(f"Need at least {k} distinct box sizes to fit {k} anchors, got {len(distinct)}")

    rng = np.random.default_rng(seed)
    centroids = distinct[rng.choice(len(distinct), size=k, replace=False)]
    for _ in range(iterations):
        nearest = np.argmax(_shape_iou(shapes, centroids), axis=1)
        updated = centroids.copy()
        for c in range(k):
            members = shapes[nearest == c]
            if len(members):
                updated[c] = members.mean(axis=0)
        if np.allclose(updated, centroids):
            break
        centroids = updated

    return sorted((round(float(w), 2), round(float(h), 2)) for w, h in centroids)
