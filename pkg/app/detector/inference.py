"""From ConvDet output to final detections."""

from __future__ import annotations

from typing import List, Sequence, Tuple

import numpy as np

from app.detector.anchors import GRID_STRIDE, clip_boxes, decode, generate_anchors, grid_shape
from app.detector.boxes import Detection, iou_matrix, nms
from app.detector.config import DetectorConfig
from app.detector.network import SqueezeDetector, preprocess
from app.nn import ops


def pad_width(rasters: np.ndarray, stride: int = GRID_STRIDE) -> np.ndarray:
    """Edge-pad (N, H, W, 3) rasters on the right to a width divisible by ``stride``."""
    extra = -rasters.shape[2] % stride
    if not extra:
        return rasters
    return np.pad(rasters, ((0, 0), (0, 0), (0, extra), (0, 0)), mode="edge")


def decode_output(
    output: np.ndarray,
    anchors: np.ndarray,
    config: DetectorConfig,
    image_size: Tuple[int, int],
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Split one image's ConvDet output (gh, gw, K * (C + 5)) into clipped boxes
    (A, 4), class distributions (A, C) and sigmoid confidences (A,).
    """
    per_anchor = output.reshape(-1, config.channels_per_anchor).astype(np.float64)
    if len(per_anchor) != len(anchors):
        raise ValueError(f"Output holds {len(per_anchor)} anchors, expected {len(anchors)}")
    c = config.num_classes
    probs = ops.softmax(per_anchor[:, :c])
    confidence = ops.sigmoid(per_anchor[:, c])
    boxes = clip_boxes(decode(per_anchor[:, c + 1:c + 5], anchors), *image_size)
    return boxes, probs, confidence


def decode_detections(
    output: np.ndarray,
    anchors: np.ndarray,
    config: DetectorConfig,
    image_size: Tuple[int, int],
) -> List[Detection]:
    """One detection per anchor: most probable class, sigmoid confidence."""
    boxes, probs, confidence = decode_output(output, anchors, config, image_size)
    classes = probs.argmax(axis=1)
    return [
        Detection(float(b[0]), float(b[1]), float(b[2]), float(b[3]), int(k), float(p))
        for b, k, p in zip(boxes, classes, confidence)
    ]


def postprocess(
    boxes: np.ndarray,
    probs: np.ndarray,
    confidence: np.ndarray,
    config: DetectorConfig,
) -> List[Detection]:
    """Top-N by confidence x class probability, per-class NMS, then the confidence threshold."""
    classes = probs.argmax(axis=1)
    score = confidence * probs.max(axis=1)
    top = np.argsort(-score, kind="stable")[:config.top_n]
    candidates = [
        Detection(float(boxes[i, 0]), float(boxes[i, 1]), float(boxes[i, 2]), float(boxes[i, 3]), int(classes[i]),
                  float(confidence[i]))
        for i in top
    ]
    kept = nms(candidates, config.nms_threshold)
    return [d for d in kept if d.confidence >= config.confidence_threshold]


def detect_batch(network: SqueezeDetector, rasters: Sequence[np.ndarray]) -> List[List[Detection]]:
    """Detections for equally sized rasters, in original pixel coordinates."""
    config: DetectorConfig = network.config
    stacked = np.stack([np.asarray(r) for r in rasters])
    height, width = stacked.shape[1:3]
    x = preprocess(pad_width(stacked, config.grid_stride))
    output = network.forward(x, training=False)
    anchors = generate_anchors(*grid_shape(x.shape[1], x.shape[2], config.grid_stride), config)
    results = []
    for single in output:
        boxes, probs, confidence = decode_output(single, anchors, config, (height, width))
        results.append(postprocess(boxes, probs, confidence, config))
    return results


def detect(network: SqueezeDetector, raster: np.ndarray) -> List[Detection]:
    """Detections for one (H, W, 3) raster whose height is a multiple of the grid stride."""
    return detect_batch(network, [raster])[0]


def match_detections(
    detections: Sequence[Detection],
    ground_truth: Sequence[Sequence],
    iou_threshold: float = 0.5,
) -> List[float]:
    """
    Greedily match each ground-truth box ``(cx, cy, w, h, class)``, in order,
    to the unused same-class detection with the highest IoU at or above
    ``iou_threshold``. Returns the IoU of every match.
    """
    if not detections or not ground_truth:
        return []
    overlaps = iou_matrix(
        np.array([g[:4] for g in ground_truth], dtype=np.float64),
        np.array([d.box for d in detections]),
    )
    det_classes = np.array([d.cls for d in detections])
    used = np.zeros(len(detections), dtype=bool)
    matches = []
    for g, gt in enumerate(ground_truth):
        candidates = np.where((det_classes == int(gt[4])) & ~used, overlaps[g], -1.0)
        best = int(np.argmax(candidates))
        if candidates[best] >= iou_threshold:
            used[best] = True
            matches.append(float(candidates[best]))
    return matches
