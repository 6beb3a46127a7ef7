"""
Model footprint and per-stage latency of the full pipeline.
"""

from __future__ import annotations

import os
import platform
from pathlib import Path
from typing import Dict, List, Sequence

import numpy as np
from pydantic import BaseModel

from app.nn.serialization import load_model
from app.pipeline.identify import STAGES, identify_language
from app.utils.logger import get_logger

logger = get_logger()

MIN_BENCH_IMAGES = 50


class LatencyStats(BaseModel):
    median: float
    p95: float
    mean: float


class BenchReport(BaseModel):
    hardware: str
    images: int
    sizes_bytes: Dict[str, int]
    latency_ms: Dict[str, LatencyStats]


def hardware_descriptor() -> str:
    cpu = platform.processor() or platform.machine()
    return f"{cpu} | {os.cpu_count()} cpus | {platform.system()} {platform.release()} | python {platform.python_version()}"


def latency_stats(samples_ms: Sequence[float]) -> LatencyStats:
    values = np.asarray(samples_ms, dtype=np.float64)
    return LatencyStats(
        median=float(np.median(values)),
        p95=float(np.percentile(values, 95)),
        mean=float(values.mean()),
    )


def bench(
    detector_path: Path,
    langid_path: Path,
    images: Sequence[np.ndarray],
    min_images: int = MIN_BENCH_IMAGES,
) -> BenchReport:
    """Run every image through the pipeline once, single-threaded, after one warm-up call."""
    if len(images) < min_images:
        raise ValueError(f"Benchmark needs at least {min_images} images, got {len(images)}")
    detector_path, langid_path = Path(detector_path), Path(langid_path)
    detector = load_model(detector_path)
    langid = load_model(langid_path)

    sizes = {"detector": detector_path.stat().st_size, "langid": langid_path.stat().st_size}
    sizes["total"] = sizes["detector"] + sizes["langid"]

    logger.info(f"BENCH START | images={len(images)} | detector_bytes={sizes['detector']} | langid_bytes={sizes['langid']}")
    identify_language(images[0], detector, langid)
    samples: Dict[str, List[float]] = {stage: [] for stage in STAGES + ("total",)}
    for raster in images:
        timings = identify_language(raster, detector, langid).timings_ms
        for stage in samples:
            samples[stage].append(timings[stage])

    report = BenchReport(
        hardware=hardware_descriptor(),
        images=len(images),
        sizes_bytes=sizes,
        latency_ms={stage: latency_stats(values) for stage, values in samples.items()},
    )
    total = report.latency_ms["total"]
    logger.info(f"BENCH COMPLETE | total_median_ms={total.median:.1f} | total_p95_ms={total.p95:.1f}")
    return report
