"""
Command-line surface: exit codes, JSON output and seed determinism.
"""

import json

import pytest

from app.cli import EXIT_DATA, EXIT_OK, EXIT_USAGE, main


def _run_json(capsys, *argv):
    code = main(list(argv) + ["--json"])
    out = capsys.readouterr().out.strip()
    assert code == EXIT_OK, out
    assert len(out.splitlines()) == 1
    return json.loads(out)


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    """Small corpora and models shared by the end-to-end CLI tests."""
    root = tmp_path_factory.mktemp("cli")
    assert main(["gen-test", "--lang", "all", "--count", "4", "--out", str(root / "test"), "--seed", "7"]) == EXIT_OK
    assert main(["gen-words", "--lang", "Czech,French", "--count", "6", "--out", str(root / "words"), "--seed", "1"]) == EXIT_OK
    assert main([
        "train-detector", "--corpus", str(root / "words"), "--out", str(root / "detector.dkrt"),
        "--epochs", "1", "--seed", "0", "--width-multiplier", "0.0625", "--batch", "4",
    ]) == EXIT_OK
    assert main([
        "train-langid", "--out", str(root / "langid.dkrt"), "--seed", "0", "--epochs", "2", "--samples", "50",
    ]) == EXIT_OK
    return root


def test_export_table(tmp_path, capsys):
    payload = _run_json(capsys, "export-table", "--out", str(tmp_path / "table.csv"))
    lines = (tmp_path / "table.csv").read_text(encoding="utf-8").splitlines()
    assert payload["out"].endswith("table.csv")
    assert lines[0] == "index,codepoint,languages"
    assert len(lines) == 86


def test_unknown_flag_is_a_usage_error(capsys):
    assert main(["identify-text", "--model", "m.dkrt", "--text", "x", "--bogus"]) == EXIT_USAGE
    assert "usage" in capsys.readouterr().err


def test_missing_command_is_a_usage_error(capsys):
    assert main([]) == EXIT_USAGE


def test_eval_without_detector_is_a_usage_error(tmp_path, capsys):
    assert main(["eval", "--testset", str(tmp_path), "--langid", "l.dkrt"]) == EXIT_USAGE


def test_unknown_language_is_a_data_error(tmp_path, capsys):
    code = main(["gen-test", "--lang", "Klingon", "--count", "1", "--out", str(tmp_path / "x")])
    assert code == EXIT_DATA
    assert "Klingon" in capsys.readouterr().err


def test_missing_model_is_a_data_error(tmp_path, capsys):
    assert main(["identify-text", "--model", str(tmp_path / "absent.dkrt"), "--text", "año"]) == EXIT_DATA


def test_gen_test_is_deterministic(tmp_path):
    for name in ("a", "b"):
        args = ["gen-test", "--lang", "French", "--count", "5", "--seed", "7", "--out", str(tmp_path / name)]
        assert main(args) == EXIT_OK
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert len(files) == 6
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_train_langid_is_deterministic(tmp_path, workspace):
    args = ["train-langid", "--out", str(tmp_path / "again.dkrt"), "--seed", "0", "--epochs", "2", "--samples", "50"]
    assert main(args) == EXIT_OK
    assert (tmp_path / "again.dkrt").read_bytes() == (workspace / "langid.dkrt").read_bytes()


def test_identify_text(capsys, workspace):
    payload = _run_json(capsys, "identify-text", "--model", str(workspace / "langid.dkrt"), "--text", "hello")
    assert payload["language"] == "indeterminate"
    payload = _run_json(capsys, "identify-text", "--model", str(workspace / "langid.dkrt"), "--text", "mañana")
    assert len(payload["distribution"]) == 13


def test_model_kind_is_checked(capsys, workspace):
    code = main(["identify-text", "--model", str(workspace / "detector.dkrt"), "--text", "año"])
    assert code == EXIT_DATA


def test_detect_writes_detections(tmp_path, capsys, workspace):
    out = tmp_path / "detections.json"
    payload = _run_json(
        capsys, "detect", "--model", str(workspace / "detector.dkrt"),
        "--image", str(workspace / "words" / "000000.png"), "--out", str(out),
    )
    assert json.loads(out.read_text(encoding="utf-8")) == payload


def test_identify_image(capsys, workspace):
    payload = _run_json(
        capsys, "identify", "--image", str(workspace / "test" / "000000.png"),
        "--detector", str(workspace / "detector.dkrt"), "--langid", str(workspace / "langid.dkrt"),
    )
    assert {"language", "confidence", "distribution", "detections", "lines"} <= set(payload)


def test_eval_ground_truth(capsys, workspace):
    payload = _run_json(
        capsys, "eval", "--testset", str(workspace / "test"), "--langid", str(workspace / "langid.dkrt"), "--ground-truth",
    )
    assert len(payload["per_language"]) == 13
    assert payload["images"] == 52
    assert payload["mode"] == "ground_truth_presence"


def test_eval_detector(capsys, workspace):
    payload = _run_json(
        capsys, "eval-detector", "--model", str(workspace / "detector.dkrt"), "--corpus", str(workspace / "words"),
    )
    assert payload["images"] == 12
    assert 0.0 <= payload["recall"] <= 1.0


def test_bench(capsys, workspace):
    payload = _run_json(
        capsys, "bench", "--detector", str(workspace / "detector.dkrt"), "--langid", str(workspace / "langid.dkrt"),
        "--images", str(workspace / "test"),
    )
    assert set(payload["latency_ms"]) == {"localize", "detect", "langid", "total"}
    assert payload["sizes_bytes"]["total"] == payload["sizes_bytes"]["detector"] + payload["sizes_bytes"]["langid"]
    assert payload["images"] == 50


def test_baseline_architecture_round_trip(tmp_path, capsys, workspace):
    out = tmp_path / "baseline.dkrt"
    payload = _run_json(
        capsys, "train-detector", "--corpus", str(workspace / "words"), "--out", str(out), "--epochs", "1",
        "--architecture", "squeezedet", "--width-multiplier", "0.0625", "--batch", "4", "--keep-anchors",
    )
    assert payload["log"]["steps"] == 3
    payload = _run_json(capsys, "eval-detector", "--model", str(out), "--corpus", str(workspace / "words"))
    assert payload["architecture"] == "squeezedet"
    assert payload["images"] == 12


def test_unknown_architecture_is_a_usage_error(tmp_path, capsys, workspace):
    code = main([
        "train-detector", "--corpus", str(workspace / "words"), "--out", str(tmp_path / "x.dkrt"),
        "--epochs", "1", "--architecture", "resnet",
    ])
    assert code == EXIT_USAGE
