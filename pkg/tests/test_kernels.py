"""Backend-agreement checks between the compiled and numpy kernels."""

import numpy as np
import pytest

from simcal import _kernels
from simcal._kernels import _numpy_impl

try:
    from simcal._kernels import _native
except ImportError:
    _native = None

needs_native = pytest.mark.skipif(_native is None, reason="native kernels not built")

CASES = [(1, False), (2, False), (1, True), (2, True), (3, True), (5, True)]


def _random_batch(seed, n=64, dim=24):
    rng = np.random.default_rng(seed)
    x = np.ascontiguousarray(rng.normal(size=(n, dim)))
    y = np.ascontiguousarray(rng.normal(size=(n, dim)))
    return x, y


@needs_native
@pytest.mark.parametrize("p,general", CASES)
def test_distance_backends_agree(p, general):
    x, y = _random_batch(101)
    a = _native.pairwise_distance(x, y, p, general)
    b = _numpy_impl.pairwise_distance(x, y, p, general)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


@needs_native
@pytest.mark.parametrize("p,general", CASES)
def test_grad_backends_agree(p, general):
    x, y = _random_batch(202)
    d = _numpy_impl.pairwise_distance(x, y, p, general)
    a = _native.distance_grad(x, y, d, p, general, 1e-12)
    b = _numpy_impl.distance_grad(x, y, d, p, general, 1e-12)
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("p,general", CASES)
def test_grad_zero_at_coincident_points(p, general):
    x, _ = _random_batch(303, n=8)
    d = _kernels.pairwise_distance(x, x, p, general)
    grad = _kernels.distance_grad(x, x, d, p, general, 1e-12)
    assert np.all(d == 0.0)
    assert np.all(grad == 0.0)


def test_active_backend_is_reported():
    assert _kernels.backend_name() in ("native", "numpy")
    import os

    if _native is not None and os.environ.get("SIMCAL_BACKEND", "auto") in ("", "auto"):
        assert _kernels.backend_name() == "native"
