"""
Language-identification evaluation over a labelled test set.

Scores are one-vs-rest per language over argmax predictions. An
indeterminate prediction is a miss for the true language and a false
positive for nobody; it gets its own confusion-matrix column.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel

from app.corpus.render import AnnotatedImage
from app.corpus.storage import read_corpus
from app.detector.network import SqueezeDetector
from app.diacritics import NUM_LANGUAGES, Language
from app.langid.network import INDETERMINATE, predict
from app.langid.presence import empty_presence
from app.nn.network import Sequential
from app.pipeline.identify import identify_language
from app.utils.logger import get_logger

logger = get_logger()

DEFAULT_WORKERS = 4


class MissingLabelError(ValueError):
    """A test image carries no language label."""


class LanguageScores(BaseModel):
    precision: float
    recall: float
    f1: float
    support: int
    true_positives: int
    false_positives: int
    false_negatives: int


class EvalReport(BaseModel):
    mode: str
    images: int
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_language: Dict[str, LanguageScores]
    columns: List[str]
    # rows: true language, columns: predicted language then indeterminate
    confusion: List[List[int]]


def _safe_ratio(numerator: int, denominator: int) -> float:
    return numerator / denominator if denominator else 0.0


def build_report(
    truth: Sequence[Language],
    predicted: Sequence[Optional[Language]],
    mode: str = "pipeline",
) -> EvalReport:
    """Scores and confusion matrix from parallel label lists (None = indeterminate)."""
    if len(truth) != len(predicted):
        raise ValueError(f"{len(truth)} labels but {len(predicted)} predictions")
    confusion = np.zeros((NUM_LANGUAGES, NUM_LANGUAGES + 1), dtype=np.int64)
    for true, guess in zip(truth, predicted):
        confusion[int(true), NUM_LANGUAGES if guess is None else int(guess)] += 1

    per_language: Dict[str, LanguageScores] = {}
    for lang in Language:
        tp = int(confusion[lang, lang])
        fp = int(confusion[:, lang].sum() - tp)
        fn = int(confusion[lang].sum() - tp)
        precision = _safe_ratio(tp, tp + fp)
        recall = _safe_ratio(tp, tp + fn)
        f1 = _safe_ratio(2 * precision * recall, precision + recall) if precision + recall else 0.0
        per_language[lang.label] = LanguageScores(
            precision=precision,
            recall=recall,
            f1=f1,
            support=tp + fn,
            true_positives=tp,
            false_positives=fp,
            false_negatives=fn,
        )

    scores = list(per_language.values())
    return EvalReport(
        mode=mode,
        images=len(truth),
        accuracy=_safe_ratio(int(np.trace(confusion[:, :NUM_LANGUAGES])), len(truth)),
        macro_precision=float(np.mean([s.precision for s in scores])),
        macro_recall=float(np.mean([s.recall for s in scores])),
        macro_f1=float(np.mean([s.f1 for s in scores])),
        per_language=per_language,
        columns=[lang.label for lang in Language] + [INDETERMINATE],
        confusion=confusion.tolist(),
    )


def ground_truth_presence(image: AnnotatedImage) -> np.ndarray:
    vector = empty_presence()
    for box in image.boxes:
        vector[box.cls] = 1
    return vector


def eval_langid(
    testset: Union[Path, Sequence[AnnotatedImage]],
    langid: Sequential,
    detector: Optional[SqueezeDetector] = None,
    ground_truth: bool = False,
    workers: int = DEFAULT_WORKERS,
) -> EvalReport:
    """
    Evaluate on a test-set directory or a list of annotated images.

    With ``ground_truth`` the presence vectors come from the annotated boxes
    and the detector is not used, which scores the classifier alone.
    """
    images = read_corpus(Path(testset)) if isinstance(testset, (str, Path)) else list(testset)
    if not images:
        raise ValueError("Test set is empty")
    unlabelled = [image.name or str(i) for i, image in enumerate(images) if image.language is None]
    if unlabelled:
        raise MissingLabelError(f"{len(unlabelled)} test images have no language label, e.g. {unlabelled[0]}")
    if not ground_truth and detector is None:
        raise ValueError("A detector model is needed unless ground-truth presence is used")

    mode = "ground_truth_presence" if ground_truth else "pipeline"
    logger.info(f"EVAL START | images={len(images)} | mode={mode} | workers={workers}")

    def run(image: AnnotatedImage) -> Optional[Language]:
        if ground_truth:
            return predict(langid, ground_truth_presence(image)).language
        return identify_language(image.raster, detector, langid).prediction.language

    # forward passes only overwrite backward caches, so the models can be shared; map() keeps input order
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        predicted = list(executor.map(run, images))

    report = build_report([image.language for image in images], predicted, mode=mode)
    logger.info(
        f"EVAL COMPLETE | images={report.images} | mode={mode} | accuracy={report.accuracy:.4f} "
        f"| macro_f1={report.macro_f1:.4f}"
    )
    return report
