import numpy as np
import pytest

from simcal.distances import DistanceKind
from simcal.errors import DimensionMismatchError, EmptyBatchError
from simcal.model import (
    ProjectionModel,
    forward_pair,
    initialize_model,
    loss_and_grad,
)

from support import (
    finite_difference_grad,
    gradient_check_instance,
    reference_forward,
    relative_error,
)

KINDS = [DistanceKind.manhattan(), DistanceKind.euclidean(), DistanceKind.minkowski(3)]


class TestForward:
    @pytest.mark.parametrize("kind", KINDS, ids=str)
    def test_identical_inputs_give_zero(self, kind):
        model = initialize_model(in_dim=6, out_dim=4, distance_kind=kind, seed=1)
        a = np.linspace(-1, 1, 6)
        yhat, cache = forward_pair(model, a, a)
        assert yhat == 0.0
        assert cache.d[0] == 0.0

    def test_zero_parameters_give_zero(self):
        model = ProjectionModel(np.zeros((3, 5)), np.zeros(3), DistanceKind.minkowski(3))
        rng = np.random.default_rng(2)
        yhat, _ = forward_pair(model, rng.normal(size=5), rng.normal(size=5))
        assert yhat == 0.0

    @pytest.mark.parametrize("kind", KINDS, ids=str)
    def test_matches_step_by_step_reference(self, kind):
        rng = np.random.default_rng(3)
        for _ in range(10):
            weights = rng.normal(size=(3, 4))
            bias = rng.normal(size=3)
            a = rng.normal(size=4)
            b = rng.normal(size=4)
            model = ProjectionModel(weights, bias, kind)
            yhat, _ = forward_pair(model, a, b)
            expected = reference_forward(weights, bias, a, b, kind.p)
            assert yhat == pytest.approx(expected, rel=1e-12)

    def test_tied_weights_make_order_irrelevant(self):
        rng = np.random.default_rng(4)
        model = initialize_model(in_dim=8, out_dim=5, seed=9)
        for _ in range(20):
            a, b = rng.normal(size=8), rng.normal(size=8)
            ab, _ = forward_pair(model, a, b)
            ba, _ = forward_pair(model, b, a)
            assert ab == pytest.approx(ba, rel=1e-12, abs=1e-15)

    def test_dimension_mismatch(self):
        model = initialize_model(in_dim=4, out_dim=2, seed=0)
        with pytest.raises(DimensionMismatchError):
            forward_pair(model, np.zeros(5), np.zeros(5))

    def test_output_stays_below_one(self):
        big = ProjectionModel(
            np.full((4, 4), 50.0), np.zeros(4), DistanceKind.manhattan()
        )
        yhat, _ = forward_pair(big, np.full(4, 10.0), np.full(4, -10.0))
        assert 0.0 <= yhat < 1.0


class TestLossAndGrad:
    def test_matching_pair_label_zero(self):
        model = initialize_model(in_dim=4, out_dim=3, seed=5)
        a = np.ones((1, 4))
        loss, grads = loss_and_grad(model, a, a.copy(), np.array([0.0]))
        assert loss == 0.0
        assert np.all(grads.weights == 0.0)
        assert np.all(grads.bias == 0.0)

    def test_matching_pair_label_one(self):
        model = initialize_model(in_dim=4, out_dim=3, seed=5)
        a = np.ones((1, 4))
        loss, _ = loss_and_grad(model, a, a.copy(), np.array([1.0]))
        assert loss == 1.0

    def test_empty_batch(self):
        model = initialize_model(in_dim=4, out_dim=3, seed=5)
        with pytest.raises(EmptyBatchError):
            loss_and_grad(model, np.empty((0, 4)), np.empty((0, 4)), np.array([]))

    def test_loss_invariant_under_batch_reordering(self):
        model = initialize_model(in_dim=6, out_dim=4, seed=6)
        rng = np.random.default_rng(7)
        a = rng.normal(size=(32, 6))
        b = rng.normal(size=(32, 6))
        y = rng.integers(0, 2, size=32).astype(float)
        perm = rng.permutation(32)
        loss1, grads1 = loss_and_grad(model, a, b, y)
        loss2, grads2 = loss_and_grad(model, a[perm], b[perm], y[perm])
        assert loss1 == pytest.approx(loss2, rel=1e-12)
        np.testing.assert_allclose(grads1.weights, grads2.weights, rtol=1e-10, atol=1e-14)

    @pytest.mark.parametrize("kind", KINDS, ids=str)
    def test_gradients_match_finite_differences(self, kind):
        for seed in range(12):
            model, a, b, y = gradient_check_instance(kind, seed=1000 + seed)
            _, grads = loss_and_grad(model, a, b, y)
            numeric = finite_difference_grad(model, a, b, y, h=1e-4)
            assert relative_error(grads.weights, numeric.weights) <= 1e-4
            assert relative_error(grads.bias, numeric.bias) <= 1e-4

    def test_gradient_zero_at_coincident_projection(self):
        # Identical inputs sit on the d=0 kink; the guard returns zero.
        model = initialize_model(in_dim=5, out_dim=3, seed=8)
        a = np.full((2, 5), 0.3)
        loss, grads = loss_and_grad(model, a, a.copy(), np.array([1.0, 1.0]))
        assert loss == 1.0
        assert np.all(grads.weights == 0.0)
