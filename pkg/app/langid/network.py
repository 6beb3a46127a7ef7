"""
The shallow language classifier: 85 presence bits -> dense(50) + ReLU
-> dense(30) + ReLU -> dense(13) + softmax.
"""

from __future__ import annotations

from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from app.diacritics import NUM_LANGUAGES, Language
from app.langid.presence import PRESENCE_SIZE
from app.nn.layers import Dense, ReLU, Softmax
from app.nn.network import Sequential
from app.nn.serialization import register_architecture

HIDDEN_UNITS: Tuple[int, ...] = (50, 30)
INDETERMINATE = "indeterminate"


def build_shallow(hidden: Sequence[int] = HIDDEN_UNITS, seed: int = 0) -> Sequential:
    rng = np.random.default_rng(seed)
    sizes = (PRESENCE_SIZE,) + tuple(hidden) + (NUM_LANGUAGES,)
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        layers.append((f"dense{i + 1}", Dense(fan_in, fan_out, rng=rng)))
        if i < len(sizes) - 2:
            layers.append((f"relu{i + 1}", ReLU()))
    layers.append(("softmax", Softmax()))
    return Sequential(layers, {"kind": "shallow", "hidden": list(hidden), "seed": seed})


register_architecture(
    "shallow",
    lambda descriptor: build_shallow(descriptor.get("hidden", HIDDEN_UNITS), descriptor.get("seed", 0)),
)


class LanguagePrediction(BaseModel):
    """Classifier output. ``language`` is None when the input carried no diacritics."""

    language: Optional[Language] = None
    confidence: float = Field(..., ge=0.0, le=1.0)
    distribution: Dict[str, float]

    @property
    def indeterminate(self) -> bool:
        return self.language is None

    @property
    def label(self) -> str:
        return INDETERMINATE if self.language is None else self.language.label


def _as_batch(vectors: np.ndarray) -> np.ndarray:
    x = np.asarray(vectors, dtype=np.float32)
    if x.ndim == 1:
        x = x[None, :]
    if x.ndim != 2 or x.shape[1] != PRESENCE_SIZE:
        raise ValueError(f"Presence vectors must have {PRESENCE_SIZE} entries, got shape {x.shape}")
    return x


def predict_batch(network: Sequential, vectors: np.ndarray) -> List[LanguagePrediction]:
    """
    One prediction per row. Rows without any set bit are reported as
    indeterminate; their distribution is still the network's output.
    """
    x = _as_batch(vectors)
    probs = network.forward(x).astype(np.float64)
    predictions = []
    for row, p in zip(x, probs):
        distribution = {lang.label: float(p[lang]) for lang in Language}
        if not row.any():
            predictions.append(LanguagePrediction(language=None, confidence=0.0, distribution=distribution))
            continue
        best = int(np.argmax(p))
        predictions.append(
            LanguagePrediction(language=Language(best), confidence=float(p[best]), distribution=distribution)
        )
    return predictions


def predict(network: Sequential, vector: np.ndarray) -> LanguagePrediction:
    return predict_batch(network, vector)[0]


def prediction_to_json(prediction: LanguagePrediction) -> Dict[str, Any]:
    return {
        "language": prediction.label,
        "confidence": prediction.confidence,
        "distribution": dict(prediction.distribution),
    }
