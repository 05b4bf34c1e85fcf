import numpy as np
import pytest

from ironyinterp.corpus import Role, Utterance
from ironyinterp.rq import (INFO, RQ, RqConfig, RqModel, extract_rq_features, loss_and_grad, predict_rq, sigmoid,
                            train_on_matrix, train_rq_classifier)


def utt(text):
    return Utterance("u", text, Role.SpeakerIronic)


def test_features_hand_counts(lexicons):
    f = extract_rq_features(utt("don't you love fighting?"), lexicons)
    assert (f.interrogative, f.negation, f.qmark_position) == (0, 1, 1.0)
    assert f.pronoun == 1 and f.modal == 0 and f.n_tokens == 4
    assert extract_rq_features(utt("what time does the store open?"), lexicons).interrogative == 1
    f = extract_rq_features(utt("nice?"), lexicons)
    assert f.qmark_position == 1.0
    assert (f.modal, f.pronoun, f.interrogative, f.negation) == (0, 0, 0, 0)


def test_features_question_position_and_modals(lexicons):
    f = extract_rq_features(utt("couldn't you see? it was obvious"), lexicons)
    assert f.modal == 1 and f.negation == 1
    assert f.qmark_position == pytest.approx(3 / 6)


def test_features_need_question_mark(lexicons):
    with pytest.raises(ValueError):
        extract_rq_features(utt("no question here"), lexicons)


def test_embedding_features(lexicons):
    emb = {"love": np.array([1.0, 0.0]), "fighting": np.array([0.0, 1.0])}
    f = extract_rq_features(utt("don't you love fighting?"), lexicons, emb)
    assert f.embedding == (0.5, 0.5)
    f = extract_rq_features(utt("who?"), lexicons, emb)
    assert f.embedding == (0.0, 0.0)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    worst = 0.0
    for _ in range(100):
        n, d = rng.integers(3, 20), rng.integers(1, 8)
        X = rng.normal(size=(n, d))
        y = rng.integers(0, 2, size=n).astype(float)
        params = rng.normal(size=d + 1)
        l2 = float(rng.uniform(0, 0.1))
        _, g = loss_and_grad(params, X, y, l2)
        h = 1e-6
        num = np.array([(loss_and_grad(params + h * e, X, y, l2)[0] - loss_and_grad(params - h * e, X, y, l2)[0])
                        / (2 * h) for e in np.eye(d + 1)])
        worst = max(worst, np.linalg.norm(num - g) / max(np.linalg.norm(num), 1e-12))
    assert worst < 1e-4


def separable(lexicons):
    rq = ["don't you love it?", "isn't that great?", "can't you see?", "won't you stop?", "aren't we lucky?",
          "didn't they try?", "never happy?", "doesn't it hurt?"]
    info = ["you love it?", "is that great?", "can you see?", "will you stop?", "are we lucky?",
            "did they try?", "ever happy?", "does it hurt?"]
    return [(utt(t), RQ) for t in rq] + [(utt(t), INFO) for t in info]


def test_separable_set_fits_perfectly(lexicons):
    data = separable(lexicons)
    model = train_rq_classifier(data, lexicons)
    assert all(predict_rq(model, m, lexicons)[0] == lab for m, lab in data)
    assert predict_rq(model, utt("wasn't it fun?"), lexicons)[0] == RQ


def test_single_class_rejected(lexicons):
    with pytest.raises(ValueError):
        train_rq_classifier([(utt("why?"), RQ), (utt("how?"), RQ)], lexicons)


def test_identical_features_give_chance():
    X = np.ones((10, 3))
    y = np.array([1.0, 0.0] * 5)
    model = train_on_matrix(X, y)
    # standardised features are all zero; only the tiny random init remains
    assert np.allclose(model.weights, 0.0, atol=1e-3)
    assert np.all(model.std == 1.0)
    preds = [model.margin(x) >= 0 for x in X]
    assert np.mean(np.array(preds) == (y == 1)) == 0.5


def test_zero_model_scores_half(lexicons):
    model = RqModel(np.zeros(6), 0.0, np.zeros(6), np.ones(6))
    assert predict_rq(model, utt("what now?"), lexicons) == (RQ, 0.5)


def test_persistence_is_bit_identical(tmp_path, lexicons):
    model = train_rq_classifier(separable(lexicons), lexicons, RqConfig(seed=3))
    model.save(tmp_path / "m.json")
    back = RqModel.load(tmp_path / "m.json")
    for m, _ in separable(lexicons):
        assert predict_rq(back, m, lexicons) == predict_rq(model, m, lexicons)
    assert back.meta["seed"] == 3 and "loss" in back.meta


def test_training_is_deterministic(lexicons):
    a = train_rq_classifier(separable(lexicons), lexicons)
    b = train_rq_classifier(separable(lexicons), lexicons)
    assert np.array_equal(a.weights, b.weights) and a.bias == b.bias


def test_score_monotone_in_margin():
    z = np.linspace(-30, 30, 601)
    s = sigmoid(z)
    assert np.all(np.diff(s) >= 0) and s.min() >= 0 and s.max() <= 1


def test_seed_model_gates_quoted_example(rq_model, lexicons):
    assert predict_rq(rq_model, utt("don't you love fighting?"), lexicons)[0] == RQ
    assert predict_rq(rq_model, utt("what time does the store open?"), lexicons)[0] == INFO
