"""
Tests for presence vectors, the shallow classifier and its training data.
"""

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from app.corpus.words import InsufficientWordsError, load_bundled_corpus
from app.detector.boxes import Detection
from app.diacritics import DIACRITIC_TABLE, Language, canonical_index, unique_diacritics
from app.langid.network import INDETERMINATE, build_shallow, predict, predict_batch, prediction_to_json
from app.langid.presence import (
    PRESENCE_SIZE,
    presence_codepoints,
    presence_from_detections,
    presence_from_text,
    presence_union,
)
from app.langid.train import LangIdConfig, accuracy, gen_training_vectors, train_langid
from app.nn.network import parameter_count
from app.nn.optim import TrainingDivergedError
from app.nn.serialization import load_model, save_model


def _bits(vector):
    return set(np.flatnonzero(vector).tolist())


def _singleton(ch):
    vector = np.zeros(PRESENCE_SIZE, dtype=np.uint8)
    vector[canonical_index(ch)] = 1
    return vector


@pytest.fixture(scope="module")
def all_corpora():
    return {lang: load_bundled_corpus(lang) for lang in Language}


# ---------------------------------------------------------------------------
# presence vectors
# ---------------------------------------------------------------------------

def test_presence_from_text_examples():
    assert _bits(presence_from_text("mañana")) == {canonical_index("ñ")}
    assert not presence_from_text("hello").any()
    assert _bits(presence_from_text("Grüße")) == {canonical_index("ü"), canonical_index("ß")}
    assert presence_from_text("").shape == (PRESENCE_SIZE,)


def test_presence_counts_presence_not_occurrences():
    vector = presence_from_text("ñññ ñ")
    assert vector.max() == 1
    assert vector.sum() == 1


def test_presence_is_a_union_homomorphism():
    rng = np.random.default_rng(0)
    alphabet = list("abc ") + list(DIACRITIC_TABLE.codepoints)
    for _ in range(200):
        a = "".join(rng.choice(alphabet, size=int(rng.integers(0, 12))))
        b = "".join(rng.choice(alphabet, size=int(rng.integers(0, 12))))
        assert_array_equal(presence_from_text(a + b), presence_from_text(a) | presence_from_text(b))
        assert_array_equal(presence_union([presence_from_text(a), presence_from_text(b)]), presence_from_text(a + b))


def test_presence_from_detections():
    o = canonical_index("ö")
    assert not presence_from_detections([]).any()
    twice = [Detection(5, 8, 4, 10, o, 0.9), Detection(20, 8, 4, 10, o, 0.9)]
    assert _bits(presence_from_detections(twice)) == {o}
    assert not presence_from_detections([Detection(5, 8, 4, 10, o, 0.3)], min_confidence=0.5).any()


def test_presence_from_detections_rejects_unknown_class():
    with pytest.raises(ValueError):
        presence_from_detections([Detection(5, 8, 4, 10, 85, 0.9)])


def test_presence_codepoints():
    assert presence_codepoints(presence_from_text("Grüße")) == "üß"


# ---------------------------------------------------------------------------
# network and predictions
# ---------------------------------------------------------------------------

def test_shallow_network_size():
    network = build_shallow()
    assert parameter_count(network) == 85 * 50 + 50 + 50 * 30 + 30 + 30 * 13 + 13 == 6233


def test_shallow_output_is_a_distribution():
    network = build_shallow(seed=3)
    x = (np.random.default_rng(1).random((16, PRESENCE_SIZE)) > 0.9).astype(np.float32)
    assert_allclose(network.forward(x).sum(axis=1), 1.0, atol=1e-6)


def test_shallow_model_file_size(tmp_path):
    size = save_model(build_shallow(), tmp_path / "langid.dkrt")
    assert 6233 * 4 < size <= 0.3 * 2 ** 20
    loaded = load_model(tmp_path / "langid.dkrt")
    x = presence_from_text("forêt déjà")
    assert_allclose(loaded.forward(x[None].astype(np.float32)), build_shallow().forward(x[None].astype(np.float32)))


def test_zero_vector_is_indeterminate():
    prediction = predict(build_shallow(), np.zeros(PRESENCE_SIZE))
    assert prediction.indeterminate
    assert prediction.label == INDETERMINATE
    assert prediction_to_json(prediction)["language"] == "indeterminate"
    assert sum(prediction.distribution.values()) == pytest.approx(1.0, abs=1e-6)


def test_prediction_json_shape():
    prediction = predict(build_shallow(), presence_from_text("mañana"))
    payload = prediction_to_json(prediction)
    assert set(payload) == {"language", "confidence", "distribution"}
    assert set(payload["distribution"]) == {lang.label for lang in Language}
    assert payload["confidence"] == pytest.approx(max(payload["distribution"].values()))
    assert payload["language"] == max(payload["distribution"], key=payload["distribution"].get)


def test_predict_rejects_wrong_length():
    with pytest.raises(ValueError, match="85"):
        predict(build_shallow(), np.zeros(84))


def test_predict_batch_matches_single_predictions():
    network = build_shallow()
    vectors = np.stack([presence_from_text(t) for t in ("mañana", "Grüße", "hello", "přítel")])
    batch = predict_batch(network, vectors)
    assert [p.label for p in batch] == [predict(network, v).label for v in vectors]
    assert batch[2].indeterminate


# ---------------------------------------------------------------------------
# training data
# ---------------------------------------------------------------------------

def test_training_vector_counts_and_split(all_corpora):
    data = gen_training_vectors(all_corpora, seed=0)
    assert len(data.train_y) == 11_700
    assert len(data.val_y) == 1_300
    assert data.train_x.shape == (11_700, PRESENCE_SIZE)
    assert np.all(np.bincount(data.train_y, minlength=13) == 900)
    assert np.all(data.train_x.sum(axis=1) >= 1)


def test_training_vectors_stay_inside_language_row(all_corpora):
    data = gen_training_vectors(all_corpora, samples_per_language=100, seed=1)
    for lang in Language:
        allowed = {canonical_index(ch) for ch in DIACRITIC_TABLE.members(lang)}
        rows = np.concatenate([data.train_x[data.train_y == lang], data.val_x[data.val_y == lang]])
        assert len(rows) == 100
        assert _bits(rows.max(axis=0)) <= allowed, lang.label


def test_training_vectors_are_deterministic(all_corpora):
    subset = {Language.GERMAN: all_corpora[Language.GERMAN], Language.CZECH: all_corpora[Language.CZECH]}
    first = gen_training_vectors(subset, samples_per_language=50, seed=5)
    second = gen_training_vectors(subset, samples_per_language=50, seed=5)
    assert_array_equal(first.train_x, second.train_x)
    assert_array_equal(first.val_y, second.val_y)
    other = gen_training_vectors(subset, samples_per_language=50, seed=6)
    assert not np.array_equal(first.train_x, other.train_x)


def test_training_vectors_need_diacritics():
    with pytest.raises(InsufficientWordsError):
        gen_training_vectors({Language.SPANISH: "the quick brown fox jumps over the lazy dog"}, samples_per_language=10)


def test_langid_config_validation():
    with pytest.raises(ValueError):
        LangIdConfig(min_chunk_words=10, max_chunk_words=5)
    assert LangIdConfig().train_per_language == 900


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------

def test_training_reduces_loss_and_is_deterministic(all_corpora):
    data = gen_training_vectors(all_corpora, samples_per_language=100, seed=2)
    first, log = train_langid(data, epochs=5, seed=4)
    second, _ = train_langid(data, epochs=5, seed=4)
    assert len(log.epochs) == 5
    assert log.epochs[-1].loss < log.epochs[0].loss
    for name, value in first.parameters().items():
        assert_array_equal(second.parameters()[name], value)


def test_single_language_training_predicts_that_language(all_corpora):
    data = gen_training_vectors({Language.GERMAN: all_corpora[Language.GERMAN]}, seed=0)
    network, _ = train_langid(data, epochs=20, seed=0)
    assert accuracy(network, data.val_x, data.val_y) == 1.0
    for ch in "äöüß":
        assert predict(network, _singleton(ch)).language == Language.GERMAN


def test_training_rejects_zero_epochs(all_corpora):
    data = gen_training_vectors({Language.DANISH: all_corpora[Language.DANISH]}, samples_per_language=20, seed=0)
    with pytest.raises(ValueError):
        train_langid(data, epochs=0)


def test_non_finite_vectors_abort_training(all_corpora):
    data = gen_training_vectors({Language.DANISH: all_corpora[Language.DANISH]}, samples_per_language=20, seed=0)
    data.train_x = np.full(data.train_x.shape, np.nan, dtype=np.float32)
    with pytest.raises(TrainingDivergedError, match="non-finite") as info:
        train_langid(data, epochs=1)
    assert info.value.step == 0


@pytest.mark.slow
def test_full_training_separates_languages(all_corpora):
    data = gen_training_vectors(all_corpora, seed=0)
    network, log = train_langid(data, seed=0)
    assert log.final_val_accuracy >= 0.85
    assert predict(network, _singleton("ß")).language == Language.GERMAN
    assert predict(network, _singleton("Ñ")).language == Language.SPANISH
    for lang in Language:
        for ch in unique_diacritics(lang):
            assert predict(network, _singleton(ch)).language == lang, ch
