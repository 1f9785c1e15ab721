"""The tied-weight projection head and its forward/backward pass.

Both sides of a pair flow through one parameter set: a dense layer with
ReLU, then the configured distance between the two projections, then a
tanh squash. The output is therefore in [0, 1) with 0 meaning identical.

Gradients are analytic. The chain runs through tanh (derivative
1 - tanh^2), the order-p distance (handled by the kernel backend, with a
zero subgradient below d = 1e-12), and the ReLU mask, with both branch
contributions summed into the single tied parameter set.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .distances import BELOW_ONE, DistanceKind
from .errors import DimensionMismatchError, EmptyBatchError

GRAD_EPS = 1e-12
"""Distances at or below this get a zero gradient (tanh(d) is flat there anyway)."""


@dataclass
class ProjectionModel:
    """Dense projection parameters plus the distance configuration."""

    weights: np.ndarray  # (out_dim, in_dim)
    bias: np.ndarray  # (out_dim,)
    distance_kind: DistanceKind

    def __post_init__(self) -> None:
        self.weights = np.ascontiguousarray(self.weights, dtype=np.float64)
        self.bias = np.ascontiguousarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise DimensionMismatchError(
                f"weights {self.weights.shape} and bias {self.bias.shape} are inconsistent"
            )
        if not (np.isfinite(self.weights).all() and np.isfinite(self.bias).all()):
            raise ValueError("model parameters must be finite")

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    def copy(self) -> "ProjectionModel":
        return ProjectionModel(self.weights.copy(), self.bias.copy(), self.distance_kind)


def initialize_model(
    in_dim: int = 512,
    out_dim: int = 50,
    distance_kind: DistanceKind | None = None,
    seed: int = 0,
) -> ProjectionModel:
    """Glorot-uniform weights, zero bias, seeded."""
    if in_dim < 1 or out_dim < 1:
        raise ValueError("in_dim and out_dim must be >= 1")
    rng = np.random.default_rng(seed)
    limit = np.sqrt(6.0 / (in_dim + out_dim))
    weights = rng.uniform(-limit, limit, size=(out_dim, in_dim))
    return ProjectionModel(
        weights, np.zeros(out_dim), distance_kind or DistanceKind.minkowski(3)
    )


@dataclass
class BatchCache:
    """Intermediates of a batch forward pass, kept for backprop."""

    a: np.ndarray  # (n, in_dim) driver embeddings
    b: np.ndarray  # (n, in_dim) target embeddings
    za: np.ndarray  # pre-activation of the driver branch
    zb: np.ndarray  # pre-activation of the target branch
    u: np.ndarray  # (n, out_dim) projected drivers
    v: np.ndarray  # (n, out_dim) projected targets
    d: np.ndarray  # (n,) raw distances
    yhat: np.ndarray  # (n,) squashed outputs


def _as_batch(model: ProjectionModel, x: np.ndarray, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[1] != model.in_dim:
        raise DimensionMismatchError(
            f"{name} has shape {np.shape(x)}, expected (*, {model.in_dim})"
        )
    return arr


def forward_batch(
    model: ProjectionModel, a: np.ndarray, b: np.ndarray
) -> tuple[np.ndarray, BatchCache]:
    """Squashed distances for n pairs of embeddings, plus the cache."""
    a = _as_batch(model, a, "driver batch")
    b = _as_batch(model, b, "target batch")
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError(
            f"driver and target batches differ in length: {a.shape[0]} vs {b.shape[0]}"
        )
    za = a @ model.weights.T + model.bias
    zb = b @ model.weights.T + model.bias
    u = np.maximum(za, 0.0)
    v = np.maximum(zb, 0.0)
    kind = model.distance_kind
    d = _kernels.pairwise_distance(u, v, kind.p, kind.general)
    # float64 tanh saturates to exactly 1.0 for d >~ 19; keep outputs in [0, 1).
    yhat = np.minimum(np.tanh(d), BELOW_ONE)
    return yhat, BatchCache(a=a, b=b, za=za, zb=zb, u=u, v=v, d=d, yhat=yhat)


def forward_pair(model: ProjectionModel, a, b) -> tuple[float, BatchCache]:
    """Model output for a single pair (symmetric in a and b)."""
    yhat, cache = forward_batch(model, np.atleast_2d(a), np.atleast_2d(b))
    return float(yhat[0]), cache


@dataclass
class Gradients:
    """Loss gradients for the tied parameter set."""

    weights: np.ndarray
    bias: np.ndarray

    def as_flat(self) -> np.ndarray:
        return np.concatenate([self.weights.ravel(), self.bias.ravel()])


def loss_and_grad(
    model: ProjectionModel, a: np.ndarray, b: np.ndarray, labels: np.ndarray
) -> tuple[float, Gradients]:
    """Mean squared error over a batch and its parameter gradients.

    loss = mean((y - yhat)^2) with yhat = tanh(d(u, v)). Both branches
    backpropagate into the one shared (weights, bias) pair.
    """
    labels = np.asarray(labels, dtype=np.float64).ravel()
    if labels.size == 0:
        raise EmptyBatchError("loss_and_grad needs a non-empty batch")
    yhat, cache = forward_batch(model, a, b)
    if yhat.shape != labels.shape:
        raise DimensionMismatchError(
            f"{labels.size} labels for a batch of {yhat.size} pairs"
        )
    n = labels.size
    residual = yhat - labels
    loss = float(np.mean(residual * residual))

    # d(loss)/d(distance), folding in the tanh derivative 1 - tanh^2.
    ddist = (2.0 / n) * residual * (1.0 - yhat * yhat)
    kind = model.distance_kind
    ggeom = _kernels.distance_grad(cache.u, cache.v, cache.d, kind.p, kind.general, GRAD_EPS)
    gu = ddist[:, None] * ggeom
    gv = -gu
    pu = np.where(cache.za > 0.0, gu, 0.0)
    pv = np.where(cache.zb > 0.0, gv, 0.0)
    dw = pu.T @ cache.a + pv.T @ cache.b
    db = pu.sum(axis=0) + pv.sum(axis=0)
    return loss, Gradients(dw, db)
