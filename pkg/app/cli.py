"""
Command-line entry point: ``python -m app <command> ...``.

Exit codes: 0 success, 1 usage error, 2 data error (bad input files,
unknown names, unusable models, diverged training).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np
from dotenv import load_dotenv
from PIL import Image

from app.corpus.generate import generate_test_corpus, generate_word_corpus
from app.corpus.storage import IMAGE_FORMATS, read_corpus, write_corpus
from app.corpus.words import CORPUS_DIR, load_bundled_corpus
from app.detector.config import GRID_STRIDES, DetectorConfig
from app.detector.inference import detect
from app.detector.network import SqueezeDetector
from app.detector.train import evaluate_detector, train_detector
from app.diacritics import Language, export_csv, language_by_name
from app.langid.network import prediction_to_json, predict
from app.langid.presence import DEFAULT_MIN_CONFIDENCE, presence_from_text
from app.langid.train import LangIdConfig, gen_training_vectors, train_langid
from app.nn.network import Sequential
from app.nn.ops import NonFiniteError
from app.nn.optim import TrainingDivergedError
from app.nn.serialization import load_model, save_model
from app.pipeline.bench import MIN_BENCH_IMAGES, bench
from app.pipeline.evaluate import DEFAULT_WORKERS, eval_langid
from app.pipeline.identify import detections_to_json, identify_language
from app.utils.logger import get_logger, quiet_console

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2

logger = get_logger()


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _languages(value: str) -> List[Language]:
    """``French``, ``french,german`` or ``all``."""
    if value.strip().lower() == "all":
        return list(Language)
    return [language_by_name(name) for name in value.split(",") if name.strip()]


def _load(path: Path, kind: str):
    network = load_model(path)
    found = network.descriptor().get("kind")
    if found != kind:
        raise ValueError(f"{path} holds a '{found}' model, expected '{kind}'")
    return network


def _read_image(path: Path) -> np.ndarray:
    if not Path(path).exists():
        raise FileNotFoundError(f"Image not found: {path}")
    with Image.open(path) as image:
        return np.array(image.convert("RGB"), dtype=np.uint8)


def _corpus_texts(languages: Sequence[Language], corpus_dir: Optional[Path]) -> Dict[Language, str]:
    return {lang: load_bundled_corpus(lang, corpus_dir) for lang in languages}


# ---------------------------------------------------------------------------
# commands; each returns the JSON payload and a short human summary
# ---------------------------------------------------------------------------

def cmd_export_table(args) -> tuple:
    path = export_csv(args.out)
    return {"out": str(path)}, f"Diacritic table written to {path}"


def cmd_gen_words(args) -> tuple:
    texts = _corpus_texts(_languages(args.lang), args.corpus_dir)
    images = []
    for lang, text in texts.items():
        images.extend(generate_word_corpus(text, lang, args.count, args.seed, replace=args.allow_repeats))
    written = write_corpus(images, args.out, args.format)
    return {"out": str(args.out), "images": written}, f"{written} word images written to {args.out}"


def cmd_gen_test(args) -> tuple:
    texts = _corpus_texts(_languages(args.lang), args.corpus_dir)
    images = []
    for lang, text in texts.items():
        images.extend(generate_test_corpus(text, lang, args.count, args.seed))
    written = write_corpus(images, args.out, args.format)
    return {"out": str(args.out), "images": written}, f"{written} test images written to {args.out}"


def cmd_train_detector(args) -> tuple:
    corpus = read_corpus(args.corpus)
    config = DetectorConfig(
        architecture=args.architecture,
        lr=args.lr,
        batch_size=args.batch,
        nms_threshold=args.nms,
        width_multiplier=args.width_multiplier,
    )
    checkpoint = args.out.with_name(args.out.stem + ".last-good" + args.out.suffix)
    network, log = train_detector(
        corpus,
        config,
        args.epochs,
        args.seed,
        checkpoint_path=checkpoint,
        fit_anchors=not args.keep_anchors,
    )
    size = save_model(network, args.out)
    payload: Dict[str, Any] = {"out": str(args.out), "size_bytes": size, "log": log.to_dict()}
    summary = f"Detector saved to {args.out} ({size} bytes)"
    if args.eval_corpus:
        metrics = evaluate_detector(network, read_corpus(args.eval_corpus))
        payload["evaluation"] = metrics.to_dict()
        summary += f"; recall={metrics.recall:.3f} mean_iou={metrics.mean_iou:.3f}"
    return payload, summary


def cmd_eval_detector(args) -> tuple:
    network: SqueezeDetector = _load(args.model, "detector")
    metrics = evaluate_detector(network, read_corpus(args.corpus))
    payload = {"architecture": network.config.architecture, **metrics.to_dict()}
    summary = "\n".join(f"{key}: {value}" for key, value in payload.items())
    return payload, summary


def cmd_detect(args) -> tuple:
    detector: SqueezeDetector = _load(args.model, "detector")
    detections = detections_to_json(detect(detector, _read_image(args.image)))
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(detections, ensure_ascii=False, indent=2), encoding="utf-8")
    summary = "\n".join(f"{d['codepoint']} class={d['class']} conf={d['confidence']:.3f}" for d in detections)
    return detections, summary or "no detections"


def cmd_train_langid(args) -> tuple:
    config = LangIdConfig(epochs=args.epochs, samples_per_language=args.samples)
    vectors = gen_training_vectors(_corpus_texts(list(Language), args.corpus), seed=args.seed, config=config)
    network, log = train_langid(vectors, seed=args.seed, config=config)
    size = save_model(network, args.out)
    payload = {
        "out": str(args.out),
        "size_bytes": size,
        "val_accuracy": log.final_val_accuracy,
        "log": log.to_dict(),
    }
    return payload, f"Language classifier saved to {args.out} ({size} bytes); val_accuracy={log.final_val_accuracy:.4f}"


def _prediction_summary(payload: Dict[str, Any]) -> str:
    return f"{payload['language']} (confidence {payload['confidence']:.3f})"


def cmd_identify_text(args) -> tuple:
    langid: Sequential = _load(args.model, "shallow")
    payload = prediction_to_json(predict(langid, presence_from_text(args.text)))
    return payload, _prediction_summary(payload)


def cmd_identify(args) -> tuple:
    result = identify_language(
        _read_image(args.image),
        _load(args.detector, "detector"),
        _load(args.langid, "shallow"),
        min_confidence=args.min_confidence,
    )
    payload = result.to_json()
    return payload, _prediction_summary(payload)


def cmd_eval(args) -> tuple:
    detector = None if args.ground_truth else _load(args.detector, "detector")
    report = eval_langid(
        args.testset,
        _load(args.langid, "shallow"),
        detector=detector,
        ground_truth=args.ground_truth,
        workers=args.workers,
    )
    rows = [
        f"{name:<12} P={s.precision:.2f} R={s.recall:.2f} F1={s.f1:.2f} n={s.support}"
        for name, s in report.per_language.items()
    ]
    rows.append(f"macro F1={report.macro_f1:.3f} accuracy={report.accuracy:.3f}")
    return report.model_dump(), "\n".join(rows)


def cmd_bench(args) -> tuple:
    images = [image.raster for image in read_corpus(args.images)][:args.count]
    report = bench(args.detector, args.langid, images)
    rows = [f"{stage:<9} median={s.median:.1f}ms p95={s.p95:.1f}ms" for stage, s in report.latency_ms.items()]
    rows.append(f"sizes: {report.sizes_bytes}")
    return report.model_dump(), "\n".join(rows)


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", help="Write the result to stdout as one JSON document")

    parser = _Parser(prog="diacritic-langid", description="Diacritic-based language identification")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents=[common], help=help_text)
        sub.set_defaults(handler=handler)
        return sub

    sub = add("export-table", cmd_export_table, "Write the diacritic table as CSV")
    sub.add_argument("--out", type=Path, required=True)

    for name, handler, help_text in (
        ("gen-words", cmd_gen_words, "Generate annotated word images for detector training"),
        ("gen-test", cmd_gen_test, "Generate 150x150 language-labelled test images"),
    ):
        sub = add(name, handler, help_text)
        sub.add_argument("--lang", required=True, help="Language name, comma-separated names, or 'all'")
        sub.add_argument("--count", type=int, required=True, help="Images per language")
        sub.add_argument("--out", type=Path, required=True)
        sub.add_argument("--seed", type=int, default=0)
        sub.add_argument("--corpus-dir", type=Path, default=None, help=f"Directory of <Language>.txt (default {CORPUS_DIR})")
        sub.add_argument("--format", choices=sorted(IMAGE_FORMATS), default="png")
        if name == "gen-words":
            sub.add_argument("--allow-repeats", action="store_true", help="Sample words with replacement")

    defaults = DetectorConfig()
    sub = add("train-detector", cmd_train_detector, "Train the diacritic detector")
    sub.add_argument("--corpus", type=Path, required=True)
    sub.add_argument("--out", type=Path, required=True)
    sub.add_argument("--epochs", type=int, required=True)
    sub.add_argument(
        "--architecture",
        choices=list(GRID_STRIDES),
        default=defaults.architecture,
        help="squeezedet trains the stock network for comparison",
    )
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--lr", type=float, default=defaults.lr)
    sub.add_argument("--batch", type=int, default=defaults.batch_size)
    sub.add_argument("--nms", type=float, default=defaults.nms_threshold)
    sub.add_argument("--width-multiplier", type=float, default=defaults.width_multiplier)
    sub.add_argument("--keep-anchors", action="store_true", help="Do not refit anchor shapes to the corpus")
    sub.add_argument("--eval-corpus", type=Path, default=None, help="Held-out corpus to evaluate after training")

    sub = add("eval-detector", cmd_eval_detector, "Losses, recall and mean IoU of a detector on a corpus")
    sub.add_argument("--model", type=Path, required=True)
    sub.add_argument("--corpus", type=Path, required=True)

    sub = add("detect", cmd_detect, "Detect diacritics in a word image")
    sub.add_argument("--model", type=Path, required=True)
    sub.add_argument("--image", type=Path, required=True)
    sub.add_argument("--out", type=Path, default=None)

    sub = add("train-langid", cmd_train_langid, "Train the shallow language classifier")
    sub.add_argument("--corpus", type=Path, default=None, help=f"Directory of <Language>.txt (default {CORPUS_DIR})")
    sub.add_argument("--out", type=Path, required=True)
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--epochs", type=int, default=LangIdConfig().epochs)
    sub.add_argument("--samples", type=int, default=LangIdConfig().samples_per_language, help="Vectors per language")

    sub = add("identify-text", cmd_identify_text, "Identify the language of a text from its diacritics")
    sub.add_argument("--model", type=Path, required=True)
    sub.add_argument("--text", required=True)

    sub = add("identify", cmd_identify, "Identify the language of the text in an image")
    sub.add_argument("--image", type=Path, required=True)
    sub.add_argument("--detector", type=Path, required=True)
    sub.add_argument("--langid", type=Path, required=True)
    sub.add_argument("--min-confidence", type=float, default=DEFAULT_MIN_CONFIDENCE)

    sub = add("eval", cmd_eval, "Per-language precision, recall and F1 on a test set")
    sub.add_argument("--testset", type=Path, required=True)
    sub.add_argument("--langid", type=Path, required=True)
    sub.add_argument("--detector", type=Path, default=None)
    sub.add_argument("--ground-truth", action="store_true", help="Use annotated diacritics instead of the detector")
    sub.add_argument("--workers", type=int, default=DEFAULT_WORKERS)

    sub = add("bench", cmd_bench, "Model sizes and per-stage latency")
    sub.add_argument("--detector", type=Path, required=True)
    sub.add_argument("--langid", type=Path, required=True)
    sub.add_argument("--images", type=Path, required=True, help="Corpus directory of sample images")
    sub.add_argument("--count", type=int, default=MIN_BENCH_IMAGES)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(e, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:
        # --help
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    if args.command == "eval" and not args.ground_truth and args.detector is None:
        parser.print_usage(sys.stderr)
        print("eval: --detector is required unless --ground-truth is given", file=sys.stderr)
        return EXIT_USAGE

    if args.json:
        quiet_console()
    try:
        payload, summary = args.handler(args)
    except (ValueError, FileNotFoundError, KeyError, NonFiniteError, TrainingDivergedError) as e:
        logger.error(f"CLI ERROR | command={args.command} | error_type={type(e).__name__} | error='{e}'")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA

    if args.json:
        print(json.dumps(payload, ensure_ascii=False))
    else:
        print(summary)
    return EXIT_OK
