"""
Presence vectors: which of the 85 diacritics were observed, as 0/1 bits
in global index order.
"""

from __future__ import annotations

from typing import Iterable, Protocol

import numpy as np

from app.diacritics import NUM_DIACRITICS, canonical_index, codepoint_of

PRESENCE_SIZE = NUM_DIACRITICS
DEFAULT_MIN_CONFIDENCE = 0.5


class ClassifiedBox(Protocol):
    cls: int
    confidence: float


def empty_presence() -> np.ndarray:
    return np.zeros(PRESENCE_SIZE, dtype=np.uint8)


def presence_from_text(text: str) -> np.ndarray:
    """Bit ``i`` is set when diacritic ``i`` occurs at least once in ``text``."""
    vector = empty_presence()
    for ch in set(text):
        index = canonical_index(ch)
        if index is not None:
            vector[index] = 1
    return vector


def presence_from_detections(
    detections: Iterable[ClassifiedBox],
    min_confidence: float = DEFAULT_MIN_CONFIDENCE,
) -> np.ndarray:
    """Bit ``i`` is set when some detection of class ``i`` reaches ``min_confidence``."""
    vector = empty_presence()
    for detection in detections:
        if detection.confidence >= min_confidence:
            if not 0 <= detection.cls < PRESENCE_SIZE:
                raise ValueError(f"Detection class {detection.cls} outside [0, {PRESENCE_SIZE})")
            vector[detection.cls] = 1
    return vector


def presence_union(vectors: Iterable[np.ndarray]) -> np.ndarray:
    vector = empty_presence()
    for other in vectors:
        vector |= np.asarray(other, dtype=np.uint8)
    return vector


def presence_codepoints(vector: np.ndarray) -> str:
    """The set bits as a string of diacritics, in index order."""
    return "".join(codepoint_of(int(i)) for i in np.flatnonzero(vector))
