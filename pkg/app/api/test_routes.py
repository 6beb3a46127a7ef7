"""
Tests for the HTTP surface, with small untrained models written to tmp_path.
"""

import base64
import io

import numpy as np
import pytest
from fastapi.testclient import TestClient
from PIL import Image

from app.api import routes
from app.corpus.render import RenderStyle, render_test_image
from app.detector.config import DetectorConfig
from app.detector.network import build_detector
from app.diacritics import Language
from app.langid.network import build_shallow
from app.main import app
from app.nn.serialization import save_model


@pytest.fixture
def client(tmp_path, monkeypatch):
    detector_path, langid_path = tmp_path / "detector.dkrt", tmp_path / "langid.dkrt"
    save_model(build_detector(DetectorConfig(width_multiplier=0.0625)), detector_path)
    save_model(build_shallow(), langid_path)
    monkeypatch.setattr(routes, "DETECTOR_MODEL", detector_path)
    monkeypatch.setattr(routes, "LANGID_MODEL", langid_path)
    routes.reset_models()
    yield TestClient(app)
    routes.reset_models()


def _png_base64(raster):
    buffer = io.BytesIO()
    Image.fromarray(raster).save(buffer, format="PNG")
    return base64.b64encode(buffer.getvalue()).decode("ascii")


def test_health_reports_models(client):
    body = client.get("/health").json()
    assert body["detector_model"] and body["langid_model"]
    assert body["message"] == "Service is healthy"


def test_identify_text(client):
    body = client.post("/api/identify-text", json={"text": "mañana"}).json()
    assert set(body) == {"language", "confidence", "distribution"}
    assert len(body["distribution"]) == 13


def test_identify_text_without_diacritics_is_indeterminate(client):
    body = client.post("/api/identify-text", json={"text": "hello"}).json()
    assert body["language"] == "indeterminate"


def test_identify_text_rejects_empty_text(client):
    assert client.post("/api/identify-text", json={"text": ""}).status_code == 422


def test_identify_image(client):
    image = render_test_image(["forêt", "déjà"], Language.FRENCH, RenderStyle())
    response = client.post("/api/identify", json={"image_base64": _png_base64(image.raster)})
    assert response.status_code == 200
    body = response.json()
    assert len(body["lines"]) == 1
    for detection in body["detections"]:
        assert set(detection) == {"cx", "cy", "w", "h", "class", "codepoint", "confidence"}


def test_identify_blank_image(client):
    blank = np.full((150, 150, 3), 255, dtype=np.uint8)
    body = client.post("/api/identify", json={"image_base64": _png_base64(blank)}).json()
    assert body["language"] == "indeterminate"
    assert body["lines"] == []


def test_unreadable_image_is_a_bad_request(client):
    response = client.post("/api/identify", json={"image_base64": base64.b64encode(b"not an image").decode()})
    assert response.status_code == 400


def test_missing_model_is_unavailable(client, tmp_path, monkeypatch):
    monkeypatch.setattr(routes, "LANGID_MODEL", tmp_path / "absent.dkrt")
    routes.reset_models()
    assert client.post("/api/identify-text", json={"text": "mañana"}).status_code == 503
    assert client.get("/health").json()["langid_model"] is False


def test_corrupt_model_is_unavailable(client, tmp_path, monkeypatch):
    corrupt = tmp_path / "corrupt.dkrt"
    corrupt.write_bytes(b"XXXX" + bytes(40))
    monkeypatch.setattr(routes, "LANGID_MODEL", corrupt)
    routes.reset_models()
    response = client.post("/api/identify-text", json={"text": "mañana"})
    assert response.status_code == 503
    assert "unreadable" in response.json()["detail"]

    image = render_test_image(["forêt"], Language.FRENCH, RenderStyle())
    assert client.post("/api/identify", json={"image_base64": _png_base64(image.raster)}).status_code == 503
