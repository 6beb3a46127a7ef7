from .anchors import GRID_STRIDE, clip_boxes, decode, encode, fit_anchor_shapes, generate_anchors, grid_shape
from .boxes import Detection, iou, iou_matrix, nms
from .config import DEFAULT_ANCHOR_SHAPES, GRID_STRIDES, DetectorConfig
from .inference import decode_detections, decode_output, detect, detect_batch, match_detections, postprocess
from .loss import LossBreakdown, assign_and_loss, assign_anchors
from .network import DiacriticDetector, SqueezeDetBaseline, SqueezeDetector, build_detector, preprocess
from .train import DetectorMetrics, TrainingLog, bucket_batches, evaluate_detector, train_detector

__all__ = [
    "DEFAULT_ANCHOR_SHAPES",
    "GRID_STRIDE",
    "GRID_STRIDES",
    "Detection",
    "DiacriticDetector",
    "DetectorConfig",
    "DetectorMetrics",
    "LossBreakdown",
    "SqueezeDetBaseline",
    "SqueezeDetector",
    "TrainingLog",
    "assign_and_loss",
    "assign_anchors",
    "bucket_batches",
    "build_detector",
    "clip_boxes",
    "decode",
    "decode_detections",
    "decode_output",
    "detect",
    "detect_batch",
    "encode",
    "evaluate_detector",
    "fit_anchor_shapes",
    "generate_anchors",
    "grid_shape",
    "iou",
    "iou_matrix",
    "match_detections",
    "nms",
    "postprocess",
    "preprocess",
    "train_detector",
]
