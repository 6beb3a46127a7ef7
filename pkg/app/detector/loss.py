"""
Multi-part detection loss: anchor assignment, class cross-entropy,
box-delta regression and confidence regression toward IoU.

For one image with ``P`` responsible anchors and ``Q`` other anchors:

    class = mean over P of cross-entropy
    bbox  = loss_bbox * sum over P of squared delta errors / P
    conf  = loss_conf_pos * mean over P of (sigmoid(c) - IoU)^2
          + loss_conf_neg * mean over Q of sigmoid(c)^2

IoU is measured between the decoded prediction and its ground truth and
is not differentiated. Batch losses are means over images.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple, Sequence, Tuple

import numpy as np

from app.detector.anchors import decode, encode
from app.detector.boxes import iou_matrix
from app.detector.config import DetectorConfig
from app.nn import ops


class LossBreakdown(NamedTuple):
    class_loss: float
    bbox_loss: float
    conf_loss: float
    total: float


@dataclass
class LossTargets:
    """Per-anchor training targets for one image."""

    positive: np.ndarray  # (A,) bool
    classes: np.ndarray  # (A,) int, meaningful where positive
    deltas: np.ndarray  # (A, 4)
    iou: np.ndarray  # (A,)


def assign_anchors(gt_boxes: np.ndarray, anchors: np.ndarray) -> np.ndarray:
    """
    For each ground-truth box, in order, the not-yet-assigned anchor whose
    prior has the highest IoU with it.
    """
    gt_boxes = np.reshape(gt_boxes, (-1, 4))
    if len(gt_boxes) > len(anchors):
        raise ValueError(f"{len(gt_boxes)} ground-truth boxes but only {len(anchors)} anchors")
    overlaps = iou_matrix(gt_boxes, anchors)
    taken = np.zeros(len(anchors), dtype=bool)
    assigned = np.empty(len(gt_boxes), dtype=np.int64)
    for g in range(len(gt_boxes)):
        ranked = np.where(taken, -1.0, overlaps[g])
        assigned[g] = int(np.argmax(ranked))
        taken[assigned[g]] = True
    return assigned


def build_targets(
    prediction: np.ndarray,
    gt_boxes: np.ndarray,
    gt_classes: Sequence[int],
    anchors: np.ndarray,
    num_classes: int,
) -> LossTargets:
    """``prediction`` is one image's (A, C + 5) ConvDet output."""
    n = len(anchors)
    targets = LossTargets(
        positive=np.zeros(n, dtype=bool),
        classes=np.zeros(n, dtype=np.int64),
        deltas=np.zeros((n, 4)),
        iou=np.zeros(n),
    )
    gt_boxes = np.reshape(np.asarray(gt_boxes, dtype=np.float64), (-1, 4))
    if len(gt_boxes) == 0:
        return targets

    ids = assign_anchors(gt_boxes, anchors)
    targets.positive[ids] = True
    targets.classes[ids] = np.asarray(gt_classes, dtype=np.int64)
    targets.deltas[ids] = encode(gt_boxes, anchors[ids])
    decoded = decode(prediction[ids, num_classes + 1:num_classes + 5], anchors[ids])
    targets.iou[ids] = np.diag(iou_matrix(decoded, gt_boxes))
    return targets


def loss_from_targets(
    prediction: np.ndarray,
    targets: LossTargets,
    config: DetectorConfig,
) -> Tuple[LossBreakdown, np.ndarray]:
    """Loss of one image and its gradient with respect to ``prediction`` (A, C + 5)."""
    c = config.num_classes
    logits = prediction[:, :c]
    conf_logit = prediction[:, c]
    deltas = prediction[:, c + 1:c + 5]
    grad = np.zeros_like(prediction, dtype=np.float64)

    pos = targets.positive
    neg = ~pos
    n_pos = int(pos.sum())
    n_neg = int(neg.sum())

    class_loss = 0.0
    bbox_loss = 0.0
    if n_pos:
        class_loss, dlogits = ops.softmax_cross_entropy(logits[pos].astype(np.float64), targets.classes[pos])
        grad[pos, :c] = dlogits
        diff = deltas[pos].astype(np.float64) - targets.deltas[pos]
        bbox_loss = config.loss_bbox * float(np.sum(diff ** 2)) / n_pos
        grad[pos, c + 1:c + 5] = 2.0 * config.loss_bbox * diff / n_pos

    conf = ops.sigmoid(conf_logit.astype(np.float64))
    dconf = np.zeros_like(conf)
    conf_loss = 0.0
    if n_pos:
        err = conf[pos] - targets.iou[pos]
        conf_loss += config.loss_conf_pos * float(np.mean(err ** 2))
        dconf[pos] = 2.0 * config.loss_conf_pos * err / n_pos
    if n_neg:
        conf_loss += config.loss_conf_neg * float(np.mean(conf[neg] ** 2))
        dconf[neg] = 2.0 * config.loss_conf_neg * conf[neg] / n_neg
    grad[:, c] = dconf * conf * (1.0 - conf)

    total = class_loss + bbox_loss + conf_loss
    return LossBreakdown(class_loss, bbox_loss, conf_loss, total), grad


def assign_and_loss(
    output: np.ndarray,
    ground_truth: Sequence[Sequence],
    anchors: np.ndarray,
    config: DetectorConfig,
) -> Tuple[LossBreakdown, np.ndarray]:
    """
    Batch loss for ConvDet ``output`` (N, gh, gw, K * (C + 5)).

    ``ground_truth[n]`` lists image n's boxes as ``(cx, cy, w, h, class)``.
    Returns the mean breakdown and d(total)/d(output).
    """
    n = output.shape[0]
    if len(ground_truth) != n:
        raise ValueError(f"{len(ground_truth)} ground-truth lists for a batch of {n}")
    per_anchor = output.reshape(n, -1, config.channels_per_anchor)
    if per_anchor.shape[1] != len(anchors):
        raise ValueError(f"Output holds {per_anchor.shape[1]} anchors, expected {len(anchors)}")

    grad = np.zeros(per_anchor.shape, dtype=np.float64)
    parts: List[LossBreakdown] = []
    for i, boxes in enumerate(ground_truth):
        gt = np.array([b[:4] for b in boxes], dtype=np.float64).reshape(-1, 4)
        classes = [int(b[4]) for b in boxes]
        targets = build_targets(per_anchor[i], gt, classes, anchors, config.num_classes)
        breakdown, grad[i] = loss_from_targets(per_anchor[i], targets, config)
        parts.append(breakdown)

    mean = LossBreakdown(*(float(np.mean(values)) for values in zip(*parts)))
    return mean, (grad / n).reshape(output.shape).astype(output.dtype)
