"""
Detector training and evaluation.

Word images share a height but not a width, so batches are formed from
images of similar width (sorted by width, then chunked) and each batch is
edge-padded to its widest member rounded up to a multiple of the grid
stride.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.corpus.render import AnnotatedImage
from app.detector.anchors import fit_anchor_shapes, generate_anchors, grid_shape
from app.detector.config import DetectorConfig
from app.detector.inference import detect_batch, match_detections, pad_width
from app.detector.loss import LossBreakdown, assign_and_loss
from app.detector.network import SqueezeDetector, build_detector, preprocess
from app.nn.ops import NonFiniteError
from app.nn.optim import TrainingDivergedError, clip_by_global_norm, sgd_step
from app.nn.serialization import assign_parameters, save_model
from app.utils.logger import get_logger

logger = get_logger()

RECALL_IOU = 0.5


@dataclass
class EpochStats:
    epoch: int
    class_loss: float
    bbox_loss: float
    conf_loss: float
    total: float
    seconds: float


@dataclass
class TrainingLog:
    epochs: List[EpochStats] = field(default_factory=list)
    steps: int = 0

    def to_dict(self) -> Dict:
        return {"steps": self.steps, "epochs": [asdict(e) for e in self.epochs]}


@dataclass
class DetectorMetrics:
    class_loss: float
    bbox_loss: float
    conf_loss: float
    mean_iou: float
    recall: float
    images: int
    ground_truth_boxes: int
    matched_boxes: int

    def to_dict(self) -> Dict:
        return asdict(self)


def bucket_batches(widths: Sequence[int], batch_size: int) -> List[np.ndarray]:
    """Index batches of neighbouring widths (stable sort by width, then chunk)."""
    order = np.argsort(np.asarray(widths), kind="stable")
    return [order[i:i + batch_size] for i in range(0, len(order), batch_size)]


def _check_corpus(corpus: Sequence[AnnotatedImage], stride: int) -> None:
    if not corpus:
        raise ValueError("Detector corpus is empty")
    heights = {image.height for image in corpus}
    if len(heights) != 1:
        raise ValueError(f"Detector corpus mixes image heights {sorted(heights)}")
    grid_shape(heights.pop(), 1, stride)


def _ground_truth(images: Sequence[AnnotatedImage]) -> List[List[Tuple]]:
    return [[tuple(box) for box in image.boxes] for image in images]


def _batch_input(images: Sequence[AnnotatedImage], stride: int) -> np.ndarray:
    width = max(image.width for image in images)
    rasters = [
        np.pad(image.raster, ((0, 0), (0, width - image.width), (0, 0)), mode="edge") for image in images
    ]
    return preprocess(pad_width(np.stack(rasters), stride))


def _batch_loss(network: SqueezeDetector, images: Sequence[AnnotatedImage], training: bool):
    config = network.config
    x = _batch_input(images, config.grid_stride)
    output = network.forward(x, training=training)
    anchors = generate_anchors(*grid_shape(x.shape[1], x.shape[2], config.grid_stride), config)
    return assign_and_loss(output, _ground_truth(images), anchors, config)


def _fitted_anchors(corpus: Sequence[AnnotatedImage], config: DetectorConfig) -> DetectorConfig:
    sizes = [(box.w, box.h) for image in corpus for box in image.boxes]
    try:
        shapes = fit_anchor_shapes(sizes, k=config.anchors_per_cell, seed=config.seed)
    except ValueError as e:
        logger.warning(f"ANCHOR FIT SKIPPED | boxes={len(sizes)} | reason='{e}'")
        return config
    logger.info(f"ANCHOR FIT | boxes={len(sizes)} | shapes={shapes}")
    return config.model_copy(update={"anchor_shapes": shapes})


def _copy_parameters(network: SqueezeDetector) -> Dict[str, np.ndarray]:
    return {name: p.copy() for name, p in network.parameters().items()}


def _abort(
    network: SqueezeDetector,
    snapshot: Dict[str, np.ndarray],
    step: int,
    message: str,
    checkpoint_path: Optional[Path],
) -> TrainingDivergedError:
    assign_parameters(network, snapshot)
    if checkpoint_path is not None:
        save_model(network, checkpoint_path)
        message += f"; last good weights saved to {checkpoint_path}"
    logger.error(f"DETECTOR TRAINING ERROR | error_type=TrainingDivergedError | step={step} | error='{message}'")
    return TrainingDivergedError(message, step=step, snapshot=snapshot)


def train_detector(
    corpus: Sequence[AnnotatedImage],
    config: DetectorConfig,
    epochs: int,
    seed: int,
    checkpoint_path: Optional[Path] = None,
    fit_anchors: bool = True,
) -> Tuple[SqueezeDetector, TrainingLog]:
    """
    SGD with inverse-time decay, momentum and global-norm clipping.

    ``seed`` fixes the initial weights, dropout masks and batch order. With
    ``fit_anchors`` the anchor shapes are refitted to the corpus boxes and
    recorded in the returned network's config. When
    the loss or a gradient turns non-finite, the weights from the end of the
    last finished epoch are restored (and written to ``checkpoint_path``)
    before ``TrainingDivergedError`` is raised.
    """
    _check_corpus(corpus, config.grid_stride)
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")

    config = config.model_copy(update={"seed": seed})
    if fit_anchors:
        config = _fitted_anchors(corpus, config)
    network = build_detector(config)
    rng = np.random.default_rng(seed)
    batches = bucket_batches([image.width for image in corpus], config.batch_size)
    velocity: Dict[str, np.ndarray] = {}
    snapshot = _copy_parameters(network)
    log = TrainingLog()

    logger.info(
        f"DETECTOR TRAINING START | images={len(corpus)} | batches={len(batches)} | epochs={epochs} "
        f"| seed={seed} | architecture={config.architecture} | width_multiplier={config.width_multiplier}"
    )
    for epoch in range(1, epochs + 1):
        started = time.perf_counter()
        sums = np.zeros(4)
        seen = 0
        for b in rng.permutation(len(batches)):
            images = [corpus[i] for i in batches[b]]
            try:
                breakdown, dout = _batch_loss(network, images, training=True)
                if not np.isfinite(breakdown.total):
                    raise NonFiniteError(f"non-finite loss at step {log.steps}")
                network.backward(dout)
            except NonFiniteError as e:
                raise _abort(network, snapshot, log.steps, str(e), checkpoint_path) from e
            grads = network.gradients()
            clip_by_global_norm(grads, config.max_grad_norm)
            try:
                sgd_step(network.parameters(), grads, config.lr, config.decay, log.steps, config.momentum, velocity)
            except TrainingDivergedError as e:
                raise _abort(network, snapshot, log.steps, str(e), checkpoint_path) from e

            log.steps += 1
            sums += np.array(breakdown) * len(images)
            seen += len(images)

        means = sums / seen
        stats = EpochStats(epoch, *(float(v) for v in means), seconds=time.perf_counter() - started)
        log.epochs.append(stats)
        snapshot = _copy_parameters(network)
        logger.info(
            f"DETECTOR EPOCH | epoch={epoch} | class_loss={stats.class_loss:.4f} | bbox_loss={stats.bbox_loss:.4f} "
            f"| conf_loss={stats.conf_loss:.4f} | total={stats.total:.4f} | seconds={stats.seconds:.1f}"
        )

    logger.info(f"DETECTOR TRAINING COMPLETE | steps={log.steps} | final_total={log.epochs[-1].total:.4f}")
    return network, log


def evaluate_detector(
    network: SqueezeDetector,
    corpus: Sequence[AnnotatedImage],
    iou_threshold: float = RECALL_IOU,
) -> DetectorMetrics:
    """Losses averaged over images, plus recall and mean IoU of post-NMS detections."""
    _check_corpus(corpus, network.config.grid_stride)
    sums = np.zeros(4)
    matches: List[float] = []
    total_boxes = 0
    for batch in bucket_batches([image.width for image in corpus], network.config.batch_size):
        images = [corpus[i] for i in batch]
        breakdown, _ = _batch_loss(network, images, training=False)
        sums += np.array(breakdown) * len(images)
        # same width inside a batch after padding; detections past an image's own width are kept
        width = max(image.width for image in images)
        padded = [np.pad(im.raster, ((0, 0), (0, width - im.width), (0, 0)), mode="edge") for im in images]
        for image, detections in zip(images, detect_batch(network, padded)):
            total_boxes += len(image.boxes)
            matches.extend(match_detections(detections, image.boxes, iou_threshold))

    means = LossBreakdown(*(sums / len(corpus)))
    metrics = DetectorMetrics(
        class_loss=float(means.class_loss),
        bbox_loss=float(means.bbox_loss),
        conf_loss=float(means.conf_loss),
        mean_iou=float(np.mean(matches)) if matches else 0.0,
        recall=len(matches) / total_boxes if total_boxes else 0.0,
        images=len(corpus),
        ground_truth_boxes=total_boxes,
        matched_boxes=len(matches),
    )
    logger.info(
        f"DETECTOR EVALUATION | images={metrics.images} | recall={metrics.recall:.3f} | mean_iou={metrics.mean_iou:.3f} "
        f"| class_loss={metrics.class_loss:.4f} | bbox_loss={metrics.bbox_loss:.4f} | conf_loss={metrics.conf_loss:.4f}"
    )
    return metrics
