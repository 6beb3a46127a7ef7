from .layers import Conv2D, Dense, Dropout, Fire, Layer, MaxPool2D, ReLU, Softmax
from .network import Network, Sequential, parameter_count
from .optim import AdamState, TrainingDivergedError, adam_step, clip_by_global_norm, decayed_lr, sgd_step
from .serialization import (
    ModelFormatError,
    ModelShapeError,
    ModelTruncatedError,
    ModelVersionError,
    load_model,
    read_model_file,
    register_architecture,
    save_model,
)

__all__ = [
    "AdamState",
    "Conv2D",
    "Dense",
    "Dropout",
    "Fire",
    "Layer",
    "MaxPool2D",
    "ModelFormatError",
    "ModelShapeError",
    "ModelTruncatedError",
    "ModelVersionError",
    "Network",
    "ReLU",
    "Sequential",
    "Softmax",
    "TrainingDivergedError",
    "adam_step",
    "clip_by_global_norm",
    "decayed_lr",
    "load_model",
    "parameter_count",
    "read_model_file",
    "register_architecture",
    "save_model",
    "sgd_step",
]
