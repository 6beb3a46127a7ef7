"""
Training data and training loop for the shallow classifier.

Each sample is the presence vector of a random run of 3 to 40 consecutive
words taken from one language's text. Only words that stay inside the
language's diacritic row are used, and every word's case is randomized the
way the word-image generator does it, so upper-case diacritics appear too.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, model_validator

from app.corpus.words import InsufficientWordsError, has_diacritic, pure_tokens, randomize_case
from app.diacritics import NUM_LANGUAGES, Language
from app.langid.network import HIDDEN_UNITS, build_shallow
from app.langid.presence import PRESENCE_SIZE, presence_from_text
from app.nn import ops
from app.nn.network import Sequential
from app.nn.optim import AdamState, TrainingDivergedError, adam_step
from app.utils.logger import get_logger

logger = get_logger()

MAX_ATTEMPTS_PER_SAMPLE = 50


class LangIdConfig(BaseModel):
    samples_per_language: int = Field(1000, ge=2)
    train_fraction: float = Field(0.9, gt=0.0, lt=1.0)
    min_chunk_words: int = Field(3, ge=1)
    max_chunk_words: int = Field(40, ge=1)
    epochs: int = Field(20, ge=1)
    batch_size: int = Field(32, ge=1)
    lr: float = Field(0.001, gt=0.0)
    beta1: float = Field(0.9, ge=0.0, lt=1.0)
    beta2: float = Field(0.999, ge=0.0, lt=1.0)
    eps: float = Field(1e-7, gt=0.0)
    hidden: Tuple[int, ...] = HIDDEN_UNITS

    @model_validator(mode="after")
    def _check_chunk_range(self) -> "LangIdConfig":
        if self.min_chunk_words > self.max_chunk_words:
            raise ValueError(f"min_chunk_words {self.min_chunk_words} exceeds max_chunk_words {self.max_chunk_words}")
        return self

    @property
    def train_per_language(self) -> int:
        return int(round(self.samples_per_language * self.train_fraction))


@dataclass
class LabeledVectors:
    train_x: np.ndarray
    train_y: np.ndarray
    val_x: np.ndarray
    val_y: np.ndarray


@dataclass
class LangIdEpoch:
    epoch: int
    loss: float
    train_accuracy: float
    val_accuracy: Optional[float]


@dataclass
class LangIdLog:
    epochs: List[LangIdEpoch] = field(default_factory=list)

    @property
    def final_val_accuracy(self) -> Optional[float]:
        return self.epochs[-1].val_accuracy if self.epochs else None

    def to_dict(self) -> Dict:
        return {"epochs": [asdict(e) for e in self.epochs]}


def _chunk_vectors(text: str, lang: Language, count: int, config: LangIdConfig, seed: int) -> np.ndarray:
    words = pure_tokens(text, lang)
    if not any(has_diacritic(w, lang) for w in words):
        raise InsufficientWordsError(f"{lang.label}: text has no words with {lang.label} diacritics")

    rng = np.random.default_rng([seed, int(lang), 3])
    vectors = np.zeros((count, PRESENCE_SIZE), dtype=np.uint8)
    made = 0
    attempts = 0
    while made < count:
        attempts += 1
        if attempts > MAX_ATTEMPTS_PER_SAMPLE * count:
            raise InsufficientWordsError(
                f"{lang.label}: only {made} of {count} chunks carried a diacritic after {attempts - 1} attempts"
            )
        length = int(rng.integers(config.min_chunk_words, config.max_chunk_words + 1))
        start = int(rng.integers(0, max(1, len(words) - length + 1)))
        chunk = " ".join(randomize_case(w, lang, rng) for w in words[start:start + length])
        vector = presence_from_text(chunk)
        if vector.any():
            vectors[made] = vector
            made += 1
    return vectors


def gen_training_vectors(
    corpus_text_by_language: Mapping[Language, str],
    samples_per_language: Optional[int] = None,
    seed: int = 0,
    config: Optional[LangIdConfig] = None,
) -> LabeledVectors:
    """
    ``samples_per_language`` vectors per language, split in order: the first
    ``train_fraction`` of each language's samples train, the rest validate.
    """
    config = config or LangIdConfig()
    if samples_per_language is not None:
        config = config.model_copy(update={"samples_per_language": samples_per_language})
    if not corpus_text_by_language:
        raise ValueError("No corpus text given")

    n_train = config.train_per_language
    parts = {"train_x": [], "train_y": [], "val_x": [], "val_y": []}
    for lang in sorted(Language(key) for key in corpus_text_by_language):
        vectors = _chunk_vectors(corpus_text_by_language[lang], lang, config.samples_per_language, config, seed)
        parts["train_x"].append(vectors[:n_train])
        parts["val_x"].append(vectors[n_train:])
        parts["train_y"].append(np.full(n_train, int(lang), dtype=np.int64))
        parts["val_y"].append(np.full(len(vectors) - n_train, int(lang), dtype=np.int64))

    data = LabeledVectors(**{key: np.concatenate(value) for key, value in parts.items()})
    logger.info(
        f"LANGID VECTORS | languages={len(corpus_text_by_language)} | train={len(data.train_y)} "
        f"| validation={len(data.val_y)} | seed={seed}"
    )
    return data


def accuracy(network: Sequential, x: np.ndarray, y: np.ndarray) -> float:
    if len(y) == 0:
        raise ValueError("Cannot measure accuracy on an empty set")
    probs = network.forward(np.asarray(x, dtype=np.float32))
    return float(np.mean(np.argmax(probs, axis=1) == y))


def train_langid(
    vectors: LabeledVectors,
    epochs: Optional[int] = None,
    seed: int = 0,
    config: Optional[LangIdConfig] = None,
) -> Tuple[Sequential, LangIdLog]:
    """
    Adam on mean cross-entropy, fused with the softmax. ``seed`` fixes the
    initial weights and the per-epoch shuffles.
    """
    config = config or LangIdConfig()
    epochs = config.epochs if epochs is None else epochs
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    if len(vectors.train_y) == 0:
        raise ValueError("No training vectors")
    present = set(vectors.train_y.tolist())
    if len(present) < NUM_LANGUAGES:
        missing = [lang.label for lang in Language if lang not in present]
        logger.warning(f"LANGID TRAINING | missing_languages={missing}")

    network = build_shallow(config.hidden, seed=seed)
    rng = np.random.default_rng(seed)
    state = AdamState()
    log = LangIdLog()
    x_all = vectors.train_x.astype(np.float32)
    y_all = vectors.train_y

    logger.info(f"LANGID TRAINING START | samples={len(y_all)} | epochs={epochs} | seed={seed} | lr={config.lr}")
    started = time.perf_counter()
    for epoch in range(1, epochs + 1):
        order = rng.permutation(len(y_all))
        losses = []
        for i in range(0, len(order), config.batch_size):
            batch = order[i:i + config.batch_size]
            try:
                logits = network.forward_logits(x_all[batch], training=True)
                loss, dlogits = ops.softmax_cross_entropy(logits.astype(np.float64), y_all[batch])
                if not np.isfinite(loss):
                    raise ops.NonFiniteError(f"non-finite loss at epoch {epoch}")
                network.backward_logits(dlogits.astype(np.float32))
            except ops.NonFiniteError as e:
                logger.error(f"LANGID TRAINING ERROR | error_type=TrainingDivergedError | step={state.step} | error='{e}'")
                raise TrainingDivergedError(str(e), step=state.step) from e
            adam_step(network.parameters(), network.gradients(), state, config.lr, config.beta1, config.beta2, config.eps)
            losses.append(loss * len(batch))

        stats = LangIdEpoch(
            epoch=epoch,
            loss=float(np.sum(losses) / len(y_all)),
            train_accuracy=accuracy(network, x_all, y_all),
            val_accuracy=accuracy(network, vectors.val_x, vectors.val_y) if len(vectors.val_y) else None,
        )
        log.epochs.append(stats)
        val = "n/a" if stats.val_accuracy is None else f"{stats.val_accuracy:.4f}"
        logger.info(
            f"LANGID EPOCH | epoch={epoch} | loss={stats.loss:.4f} | train_accuracy={stats.train_accuracy:.4f} "
            f"| val_accuracy={val}"
        )

    logger.info(
        f"LANGID TRAINING COMPLETE | steps={state.step} | seconds={time.perf_counter() - started:.1f} "
        f"| val_accuracy={log.final_val_accuracy}"
    )
    return network, log
