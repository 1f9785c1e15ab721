import math

import numpy as np
import pytest

from simcal.distances import DistanceKind
from simcal.errors import (
    NonFiniteGradientError,
    SingleClassDatasetError,
    UnresolvedIdError,
)
from simcal.model import Gradients, forward_batch, initialize_model
from simcal.training import Adam, TrainConfig, clip_gradients, fit, load_model, save_model

from support import embed_corpus, make_toy_corpus


class TestClipping:
    def test_norm_four_halves_everything(self):
        grads = Gradients(np.array([[math.sqrt(8.0)]]), np.array([math.sqrt(8.0)]))
        clipped, norm = clip_gradients(grads, clip_norm=2.0)
        assert norm == pytest.approx(4.0, rel=1e-12)
        assert clipped.weights[0, 0] == pytest.approx(math.sqrt(8.0) / 2.0, rel=1e-12)
        assert clipped.bias[0] == pytest.approx(math.sqrt(8.0) / 2.0, rel=1e-12)

    def test_small_gradients_pass_through(self):
        grads = Gradients(np.array([[0.3]]), np.array([0.4]))
        clipped, norm = clip_gradients(grads, clip_norm=2.0)
        assert norm == pytest.approx(0.5)
        np.testing.assert_array_equal(clipped.weights, grads.weights)
        np.testing.assert_array_equal(clipped.bias, grads.bias)

    def test_post_clip_norm_bounded(self):
        rng = np.random.default_rng(12)
        for _ in range(200):
            grads = Gradients(rng.normal(size=(5, 7)) * 10, rng.normal(size=5) * 10)
            clipped, _ = clip_gradients(grads, clip_norm=2.0)
            post = math.sqrt(
                float(np.sum(clipped.weights**2) + np.sum(clipped.bias**2))
            )
            assert post <= 2.0 + 1e-9


class TestAdam:
    @staticmethod
    def _scalar_model(theta: float):
        model = initialize_model(in_dim=1, out_dim=1, seed=0)
        model.weights[:] = theta
        model.bias[:] = 0.0
        return model

    def test_zero_gradient_leaves_parameters(self):
        model = self._scalar_model(0.7)
        Adam(TrainConfig()).step(model, Gradients(np.zeros((1, 1)), np.zeros(1)))
        assert model.weights[0, 0] == 0.7
        assert model.bias[0] == 0.0

    def test_single_step_matches_hand_formula(self):
        config = TrainConfig(learning_rate=0.005, clip_norm=2.0)
        g = 0.25
        theta = 1.5
        model = self._scalar_model(theta)
        Adam(config).step(model, Gradients(np.array([[g]]), np.zeros(1)))
        # fresh state: m-hat = g, v-hat = g^2, so the step is lr * g / (|g| + eps)
        expected = theta - 0.005 * g / (abs(g) + 1e-7)
        assert model.weights[0, 0] == pytest.approx(expected, rel=1e-12)

    def test_two_steps_match_hand_formula(self):
        beta1, beta2, lr, eps = 0.9, 0.999, 0.005, 1e-7
        config = TrainConfig(learning_rate=lr, clip_norm=100.0)
        g1, g2 = 0.25, -0.1
        theta = 1.5
        model = self._scalar_model(theta)
        optimizer = Adam(config)
        optimizer.step(model, Gradients(np.array([[g1]]), np.zeros(1)))
        optimizer.step(model, Gradients(np.array([[g2]]), np.zeros(1)))

        m1 = (1 - beta1) * g1
        v1 = (1 - beta2) * g1 * g1
        theta1 = theta - lr * (m1 / (1 - beta1)) / (math.sqrt(v1 / (1 - beta2)) + eps)
        m2 = beta1 * m1 + (1 - beta1) * g2
        v2 = beta2 * v1 + (1 - beta2) * g2 * g2
        theta2 = theta1 - lr * (m2 / (1 - beta1**2)) / (math.sqrt(v2 / (1 - beta2**2)) + eps)
        assert model.weights[0, 0] == pytest.approx(theta2, rel=1e-12)

    def test_clipping_happens_before_adam(self):
        config = TrainConfig(learning_rate=0.005, clip_norm=2.0)
        model = self._scalar_model(0.0)
        Adam(config).step(model, Gradients(np.array([[4.0]]), np.zeros(1)))
        # gradient clips from 4 to 2 before entering the moment updates
        expected = -0.005 * 2.0 / (2.0 + 1e-7)
        assert model.weights[0, 0] == pytest.approx(expected, rel=1e-12)

    def test_non_finite_gradient_rejected(self):
        model = self._scalar_model(0.0)
        with pytest.raises(NonFiniteGradientError):
            Adam(TrainConfig()).step(model, Gradients(np.array([[np.nan]]), np.zeros(1)))


@pytest.fixture(scope="module")
def small_corpus():
    texts, pairs = make_toy_corpus(n_pairs=300, seed=11)
    return embed_corpus(texts, dim=128, seed=11), pairs


SMALL_CONFIG = TrainConfig(batch_size=64, max_epochs=40, patience=5, seed=11, out_dim=32)


class TestFit:
    def test_learns_separable_corpus(self, small_corpus):
        embeddings, pairs = small_corpus
        model, history = fit(pairs, embeddings, SMALL_CONFIG)
        assert history.val_accuracy[history.best_epoch] >= 0.90

    def test_best_epoch_has_minimum_val_loss(self, small_corpus):
        embeddings, pairs = small_corpus
        _, history = fit(pairs, embeddings, SMALL_CONFIG)
        best = history.val_loss[history.best_epoch]
        assert best == min(history.val_loss)
        assert history.val_loss.index(best) == history.best_epoch

    def test_returned_model_is_best_snapshot(self, small_corpus):
        embeddings, pairs = small_corpus
        model, history = fit(pairs, embeddings, SMALL_CONFIG)
        a = np.array([embeddings[p.driver_id] for p in pairs])
        b = np.array([embeddings[p.target_id] for p in pairs])
        y = np.array([float(p.label) for p in pairs])
        yhat, _ = forward_batch(model, a, b)
        # not asserting equality with the best recorded loss (different split),
        # but the snapshot must beat an untrained model by a wide margin
        assert float(np.mean((y - yhat) ** 2)) < 0.1

    def test_patience_zero_stops_at_first_non_improvement(self, small_corpus):
        embeddings, pairs = small_corpus
        config = TrainConfig(
            batch_size=64, max_epochs=60, patience=0, seed=3, out_dim=16
        )
        _, history = fit(pairs, embeddings, config)
        losses = history.val_loss
        expected = len(losses)
        for epoch in range(1, len(losses)):
            if losses[epoch] >= min(losses[:epoch]):
                expected = epoch + 1
                break
        assert history.epochs_run == expected

    def test_early_stopping_waits_out_patience(self, small_corpus):
        embeddings, pairs = small_corpus
        config = TrainConfig(batch_size=64, max_epochs=100, patience=3, seed=11, out_dim=16)
        _, history = fit(pairs, embeddings, config)
        if history.epochs_run < 100:
            tail = history.val_loss[history.best_epoch + 1 :]
            assert len(tail) == 3
            assert all(loss >= history.val_loss[history.best_epoch] for loss in tail)

    def test_bitwise_deterministic(self, small_corpus):
        embeddings, pairs = small_corpus
        model1, history1 = fit(pairs, embeddings, SMALL_CONFIG)
        model2, history2 = fit(pairs, embeddings, SMALL_CONFIG)
        assert history1.train_loss == history2.train_loss
        assert history1.val_loss == history2.val_loss
        assert history1.val_accuracy == history2.val_accuracy
        assert history1.best_epoch == history2.best_epoch
        np.testing.assert_array_equal(model1.weights, model2.weights)
        np.testing.assert_array_equal(model1.bias, model2.bias)

    def test_unresolved_id(self, small_corpus):
        embeddings, pairs = small_corpus
        broken = dict(embeddings)
        del broken[pairs[0].driver_id]
        with pytest.raises(UnresolvedIdError):
            fit(pairs, broken, SMALL_CONFIG)

    def test_single_class_rejected(self, small_corpus):
        embeddings, pairs = small_corpus
        only_right = [p for p in pairs if p.label == 0]
        with pytest.raises(SingleClassDatasetError):
            fit(only_right, embeddings, SMALL_CONFIG)


class TestPersistence:
    def test_round_trip_reproduces_outputs(self, tmp_path, small_corpus):
        embeddings, pairs = small_corpus
        model, history = fit(
            pairs, embeddings, SMALL_CONFIG, DistanceKind.minkowski(3)
        )
        path = tmp_path / "model.json"
        save_model(model, path, seed=SMALL_CONFIG.seed, history=history)
        loaded, seed, loaded_history = load_model(path)

        assert seed == SMALL_CONFIG.seed
        assert loaded.distance_kind == model.distance_kind
        assert loaded_history is not None
        assert loaded_history.val_loss == history.val_loss
        assert loaded_history.best_epoch == history.best_epoch

        rng = np.random.default_rng(0)
        a = rng.normal(size=(50, model.in_dim))
        b = rng.normal(size=(50, model.in_dim))
        original, _ = forward_batch(model, a, b)
        reloaded, _ = forward_batch(loaded, a, b)
        np.testing.assert_allclose(reloaded, original, atol=1e-6)
        np.testing.assert_array_equal(reloaded, original)  # JSON floats round-trip exactly
