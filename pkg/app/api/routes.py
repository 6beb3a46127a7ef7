"""
Identification endpoints.

Models are loaded once, on first use, from ``DIACRITIC_DETECTOR_MODEL`` and
``DIACRITIC_LANGID_MODEL``. A missing model file answers 503.
"""

import base64
import binascii
import io
import os
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
from fastapi import APIRouter, HTTPException
from PIL import Image, UnidentifiedImageError
from pydantic import BaseModel, Field

from app.detector.network import SqueezeDetector
from app.langid.network import predict, prediction_to_json
from app.langid.presence import DEFAULT_MIN_CONFIDENCE, presence_from_text
from app.nn.network import Sequential
from app.nn.serialization import ModelFormatError, load_model
from app.pipeline.identify import identify_language
from app.utils.logger import PROJECT_ROOT, get_logger

router = APIRouter()
logger = get_logger()

DETECTOR_MODEL = Path(os.getenv("DIACRITIC_DETECTOR_MODEL", str(PROJECT_ROOT / "models" / "detector.dkrt")))
LANGID_MODEL = Path(os.getenv("DIACRITIC_LANGID_MODEL", str(PROJECT_ROOT / "models" / "langid.dkrt")))

_detector: Optional[SqueezeDetector] = None
_langid: Optional[Sequential] = None


class IdentifyTextRequest(BaseModel):
    text: str = Field(..., min_length=1, max_length=20000, description="UTF-8 text to classify")


class IdentifyImageRequest(BaseModel):
    image_base64: str = Field(..., min_length=1, description="PNG (or any Pillow-readable) image, base64 encoded")
    min_confidence: float = Field(DEFAULT_MIN_CONFIDENCE, gt=0.0, le=1.0, description="Detection confidence cut-off")


class PredictionResponse(BaseModel):
    language: str = Field(..., description="Language name, or 'indeterminate' without diacritic evidence")
    confidence: float
    distribution: Dict[str, float]


class DetectionInfo(BaseModel):
    cx: float
    cy: float
    w: float
    h: float
    # "class" is a keyword
    cls: int = Field(..., alias="class")
    codepoint: str
    confidence: float


class LineInfo(BaseModel):
    x: int
    y: int
    w: int
    h: int


class IdentifyImageResponse(PredictionResponse):
    detections: List[DetectionInfo] = []
    lines: List[LineInfo] = []


def _load(path: Path, kind: str):
    if not path.exists():
        logger.error(f"API ERROR | model_missing | kind={kind} | path={path}")
        raise HTTPException(status_code=503, detail=f"{kind} model not available at {path}")
    try:
        network = load_model(path)
    except ModelFormatError as e:
        logger.error(
            f"API ERROR | model_unreadable | kind={kind} | path={path} | error_type={type(e).__name__} | error='{e}'"
        )
        raise HTTPException(status_code=503, detail=f"{kind} model at {path} is unreadable: {e}") from e
    logger.info(f"MODEL LOADED | kind={kind} | path={path}")
    return network


def get_detector() -> SqueezeDetector:
    """Get or load the global detector instance."""
    global _detector
    if _detector is None:
        _detector = _load(DETECTOR_MODEL, "detector")
    return _detector


def get_langid() -> Sequential:
    """Get or load the global language classifier instance."""
    global _langid
    if _langid is None:
        _langid = _load(LANGID_MODEL, "langid")
    return _langid


def reset_models() -> None:
    """Drop the loaded models (tests, or after replacing the files)."""
    global _detector, _langid
    _detector = None
    _langid = None


def model_status() -> Dict[str, bool]:
    return {"detector": DETECTOR_MODEL.exists(), "langid": LANGID_MODEL.exists()}


def _decode_image(payload: str) -> np.ndarray:
    try:
        data = base64.b64decode(payload, validate=True)
        with Image.open(io.BytesIO(data)) as image:
            return np.array(image.convert("RGB"), dtype=np.uint8)
    except (binascii.Error, UnidentifiedImageError, OSError) as e:
        raise ValueError(f"image_base64 is not a readable image: {e}") from e


@router.post("/identify-text", response_model=PredictionResponse, tags=["identify"])
def identify_text(payload: IdentifyTextRequest) -> PredictionResponse:
    """Classify text from the diacritics it contains (no image stage)."""
    logger.info(f"API | /identify-text | chars={len(payload.text)}")
    try:
        prediction = predict(get_langid(), presence_from_text(payload.text))
    except HTTPException:
        raise
    except ValueError as e:
        logger.error(f"API ERROR | /identify-text | error_type=ValueError | error='{e}'")
        raise HTTPException(status_code=400, detail=str(e)) from e
    except Exception as e:
        logger.error(f"API ERROR | /identify-text | error_type={type(e).__name__} | error='{e}'")
        raise HTTPException(status_code=500, detail=f"Failed to identify text: {e}") from e
    return PredictionResponse(**prediction_to_json(prediction))


@router.post("/identify", response_model=IdentifyImageResponse, tags=["identify"])
def identify_image(payload: IdentifyImageRequest) -> IdentifyImageResponse:
    """Full pipeline on one image: lines, diacritic detection, language."""
    try:
        raster = _decode_image(payload.image_base64)
        result = identify_language(raster, get_detector(), get_langid(), payload.min_confidence)
    except HTTPException:
        raise
    except ValueError as e:
        logger.error(f"API ERROR | /identify | error_type=ValueError | error='{e}'")
        raise HTTPException(status_code=400, detail=str(e)) from e
    except Exception as e:
        logger.error(f"API ERROR | /identify | error_type={type(e).__name__} | error='{e}'")
        raise HTTPException(status_code=500, detail=f"Failed to identify image: {e}") from e

    logger.info(
        f"API | /identify | size={raster.shape[1]}x{raster.shape[0]} | lines={len(result.lines)} "
        f"| language={result.prediction.label}"
    )
    return IdentifyImageResponse(**result.to_json())
