from .network import (
    HIDDEN_UNITS,
    INDETERMINATE,
    LanguagePrediction,
    build_shallow,
    predict,
    predict_batch,
    prediction_to_json,
)
from .presence import (
    PRESENCE_SIZE,
    empty_presence,
    presence_codepoints,
    presence_from_detections,
    presence_from_text,
    presence_union,
)
from .train import LabeledVectors, LangIdConfig, LangIdLog, accuracy, gen_training_vectors, train_langid

__all__ = [
    "HIDDEN_UNITS",
    "INDETERMINATE",
    "PRESENCE_SIZE",
    "LabeledVectors",
    "LangIdConfig",
    "LangIdLog",
    "LanguagePrediction",
    "accuracy",
    "build_shallow",
    "empty_presence",
    "gen_training_vectors",
    "predict",
    "predict_batch",
    "prediction_to_json",
    "presence_codepoints",
    "presence_from_detections",
    "presence_from_text",
    "presence_union",
    "train_langid",
]
