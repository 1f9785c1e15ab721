"""Pure numpy implementation of the hot kernels.

This is the fallback backend: always importable, vectorized, and the
reference the compiled backend is checked against. Inputs are assumed to
be validated, C-contiguous float64 arrays; validation lives in the public
API layer, not here.
"""

import numpy as np

NAME = "numpy"


def pairwise_distance(x: np.ndarray, y: np.ndarray, p: int, general: bool) -> np.ndarray:
    """Row-wise order-p distance between two (n, dim) arrays.

    With ``general`` unset, p=1 and p=2 take dedicated absolute-sum and
    root-of-squares paths; the general path evaluates the pow form for any
    p (including 1 and 2, so the specializations can be cross-checked
    against it).
    """
    delta = x - y
    if not general and p == 1:
        return np.abs(delta).sum(axis=1)
    if not general and p == 2:
        return np.sqrt(np.square(delta).sum(axis=1))
    return (np.abs(delta) ** p).sum(axis=1) ** (1.0 / p)


def distance_grad(
    x: np.ndarray,
    y: np.ndarray,
    d: np.ndarray,
    p: int,
    general: bool,
    eps: float,
) -> np.ndarray:
    """Row-wise gradient of the order-p distance w.r.t. the first argument.

    Rows with d <= eps get a zero gradient (the distance is not
    differentiable at coincident points; zero is the subgradient choice
    that keeps training finite). The gradient w.r.t. the second argument
    is the negation of the returned array.
    """
    delta = x - y
    live = d > eps
    if not general and p == 1:
        grad = np.sign(delta)
    elif not general and p == 2:
        safe_d = np.where(live, d, 1.0)
        grad = delta / safe_d[:, None]
    else:
        safe_d = np.where(live, d, 1.0)
        grad = np.sign(delta) * np.abs(delta) ** (p - 1) * (safe_d ** (1 - p))[:, None]
    grad[~live] = 0.0
    return grad
