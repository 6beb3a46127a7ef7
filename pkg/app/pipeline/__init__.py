from .bench import BenchReport, LatencyStats, bench, hardware_descriptor, latency_stats
from .evaluate import EvalReport, LanguageScores, MissingLabelError, build_report, eval_langid, ground_truth_presence
from .identify import IdentifyResult, LineInput, detect_lines, detections_to_json, identify_language, line_input
from .localize import LineBox, ink_mask, localize_lines

__all__ = [
    "BenchReport",
    "EvalReport",
    "IdentifyResult",
    "LanguageScores",
    "LatencyStats",
    "LineBox",
    "LineInput",
    "MissingLabelError",
    "bench",
    "build_report",
    "detect_lines",
    "detections_to_json",
    "eval_langid",
    "ground_truth_presence",
    "hardware_descriptor",
    "identify_language",
    "ink_mask",
    "latency_stats",
    "line_input",
    "localize_lines",
]
