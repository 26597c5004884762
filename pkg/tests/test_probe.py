"""Linear probe: gradients, convergence, determinism, serialization."""

import math

import numpy as np
import pytest

from dqde.errors import DataError
from dqde.probe import (
    ProbeConfig,
    ProbeModel,
    load_model,
    loss_and_grad,
    probe_score,
    save_model,
    train_probe,
)
from dqde.store import EmbeddingSet


def labeled_set(vectors, labels):
    return EmbeddingSet(
        vectors=np.asarray(vectors, dtype=np.float32),
        labels=np.asarray(labels, dtype=np.uint8),
    )


class TestGradient:
    def test_matches_central_finite_differences(self):
        rng = np.random.default_rng(42)
        h = 1e-6
        for _ in range(20):
            n, dim = int(rng.integers(3, 30)), int(rng.integers(1, 9))
            X = rng.normal(size=(n, dim))
            y = rng.integers(0, 2, size=n).astype(np.float64)
            w = rng.normal(size=dim)
            b = float(rng.normal())
            l2 = float(rng.uniform(0.0, 0.1))
            _, grad_w, grad_b = loss_and_grad(w, b, X, y, l2)

            fd_w = np.empty(dim)
            for j in range(dim):
                e = np.zeros(dim)
                e[j] = h
                up, _, _ = loss_and_grad(w + e, b, X, y, l2)
                dn, _, _ = loss_and_grad(w - e, b, X, y, l2)
                fd_w[j] = (up - dn) / (2 * h)
            up, _, _ = loss_and_grad(w, b + h, X, y, l2)
            dn, _, _ = loss_and_grad(w, b - h, X, y, l2)
            fd_b = (up - dn) / (2 * h)

            scale = max(1.0, float(np.abs(grad_w).max()), abs(grad_b))
            assert np.abs(grad_w - fd_w).max() / scale < 1e-4
            assert abs(grad_b - fd_b) / scale < 1e-4


class TestTraining:
    def test_separable_two_points_classified_perfectly(self):
        store = labeled_set([[1.0, 0.0], [-1.0, 0.0]], [1, 0])
        model = train_probe(store, ProbeConfig(learning_rate=1.0, epochs=200, l2=0.0))
        scores = dict(probe_score(model, store))
        assert scores[0] > 0.5 > scores[1]

    def test_identical_config_identical_weights(self):
        rng = np.random.default_rng(43)
        store = labeled_set(rng.normal(size=(50, 6)), rng.integers(0, 2, size=50))
        a = train_probe(store, ProbeConfig(seed=11))
        b = train_probe(store, ProbeConfig(seed=11))
        assert a.weights.tolist() == b.weights.tolist()
        assert a.bias == b.bias
        assert a.final_loss == b.final_loss

    def test_loss_non_increasing_with_small_step(self):
        rng = np.random.default_rng(44)
        store = labeled_set(rng.normal(size=(80, 5)), rng.integers(0, 2, size=80))
        X = store.vectors.astype(np.float64)
        y = store.labels.astype(np.float64)
        config = ProbeConfig(learning_rate=0.05, epochs=1, l2=1e-3, seed=3)
        losses = []
        w, b = train_probe(store, ProbeConfig(epochs=0, seed=3)).weights, 0.0
        for _ in range(50):
            loss, gw, gb = loss_and_grad(w, b, X, y, config.l2)
            losses.append(loss)
            w = w - config.learning_rate * gw
            b = b - config.learning_rate * gb
        assert all(b <= a + 1e-12 for a, b in zip(losses, losses[1:]))

    def test_single_class_rejected(self):
        store = labeled_set([[1.0, 0.0], [0.5, 1.0]], [1, 1])
        with pytest.raises(DataError, match="both classes"):
            train_probe(store)

    def test_unlabeled_rejected(self):
        store = EmbeddingSet(vectors=np.ones((2, 2), dtype=np.float32))
        with pytest.raises(DataError, match="labeled"):
            train_probe(store)

    def test_divergence_reported(self):
        rng = np.random.default_rng(45)
        store = labeled_set(rng.normal(size=(20, 3)), rng.integers(0, 2, size=20))
        with pytest.raises(DataError, match="diverged"):
            train_probe(store, ProbeConfig(learning_rate=1e200, epochs=50))


class TestScoring:
    def test_zero_model_scores_half(self):
        model = ProbeModel(weights=np.zeros(3), bias=0.0, config=ProbeConfig(), final_loss=0.0)
        targets = EmbeddingSet(vectors=np.random.default_rng(1).normal(size=(5, 3)).astype(np.float32))
        assert all(s == 0.5 for _, s in probe_score(model, targets))

    def test_hand_computed_sigmoid(self):
        # sigma(ln 3) = 3/4, second coordinate ignored by w
        model = ProbeModel(
            weights=np.array([1.0, 0.0]), bias=0.0, config=ProbeConfig(), final_loss=0.0
        )
        targets = EmbeddingSet(vectors=np.array([[math.log(3.0), 5.0]], dtype=np.float32))
        [(_, score)] = probe_score(model, targets)
        assert score == pytest.approx(0.75, abs=1e-6)

    def test_ranking_equals_affine_ranking(self):
        rng = np.random.default_rng(46)
        model = ProbeModel(
            weights=rng.normal(size=4), bias=0.3, config=ProbeConfig(), final_loss=0.0
        )
        targets = EmbeddingSet(vectors=rng.normal(size=(30, 4)).astype(np.float32))
        scores = np.array([s for _, s in probe_score(model, targets)])
        affine = targets.vectors.astype(np.float64) @ model.weights + model.bias
        assert np.argsort(scores).tolist() == np.argsort(affine).tolist()
        assert np.all((scores > 0.0) & (scores < 1.0))

    def test_dimension_mismatch(self):
        model = ProbeModel(weights=np.zeros(3), bias=0.0, config=ProbeConfig(), final_loss=0.0)
        targets = EmbeddingSet(vectors=np.ones((2, 5), dtype=np.float32))
        with pytest.raises(DataError, match="dimension"):
            probe_score(model, targets)


class TestSerialization:
    def test_round_trip_exact(self, tmp_path):
        rng = np.random.default_rng(47)
        store = labeled_set(rng.normal(size=(40, 7)), rng.integers(0, 2, size=40))
        model = train_probe(store, ProbeConfig(epochs=50, seed=2))
        path = tmp_path / "model.tsv"
        save_model(model, path)
        back = load_model(path)
        assert back.weights.tolist() == model.weights.tolist()
        assert back.bias == model.bias
        assert back.config == model.config
        assert back.final_loss == model.final_loss

    def test_malformed_model_rejected(self, tmp_path):
        path = tmp_path / "model.tsv"
        path.write_text("dim\t3\nweights\t0.1\t0.2\n")
        with pytest.raises(DataError):
            load_model(path)

    def test_dim_mismatch_rejected(self, tmp_path):
        rng = np.random.default_rng(48)
        store = labeled_set(rng.normal(size=(10, 2)), [1, 0] * 5)
        model = train_probe(store, ProbeConfig(epochs=5))
        path = tmp_path / "model.tsv"
        save_model(model, path)
        text = path.read_text().replace("dim\t2", "dim\t5")
        path.write_text(text)
        with pytest.raises(DataError, match="dim"):
            load_model(path)
