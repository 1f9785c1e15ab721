"""Training loop: Adam with global-norm gradient clipping, seeded
stratified validation split, early stopping, and model persistence.

Every source of randomness (init, split, batch shuffling) flows from the
single config seed, so two runs with identical inputs produce
bit-identical histories and parameters.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .dataio import PairExample
from .distances import DistanceKind
from .errors import (
    DimensionMismatchError,
    NonFiniteGradientError,
    SingleClassDatasetError,
    UnresolvedIdError,
)
from .model import Gradients, ProjectionModel, forward_batch, initialize_model, loss_and_grad


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.005
    clip_norm: float = 2.0
    batch_size: int = 512
    max_epochs: int = 100
    patience: int = 10
    validation_fraction: float = 0.2
    seed: int = 0
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_epsilon: float = 1e-7
    out_dim: int = 50

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.clip_norm <= 0:
            raise ValueError("clip_norm must be positive")
        if not 0.0 < self.validation_fraction < 1.0:
            raise ValueError("validation_fraction must be in (0, 1)")
        if self.batch_size < 1 or self.max_epochs < 1 or self.out_dim < 1:
            raise ValueError("batch_size, max_epochs and out_dim must be >= 1")
        if self.patience < 0:
            raise ValueError("patience must be >= 0")


@dataclass
class TrainHistory:
    """Per-epoch curves plus the index of the best epoch."""

    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)
    val_accuracy: list[float] = field(default_factory=list)
    best_epoch: int = 0

    @property
    def epochs_run(self) -> int:
        return len(self.val_loss)

    def to_dict(self) -> dict:
        return {
            "train_loss": self.train_loss,
            "val_loss": self.val_loss,
            "val_accuracy": self.val_accuracy,
            "best_epoch": self.best_epoch,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "TrainHistory":
        return cls(
            train_loss=[float(x) for x in d["train_loss"]],
            val_loss=[float(x) for x in d["val_loss"]],
            val_accuracy=[float(x) for x in d["val_accuracy"]],
            best_epoch=int(d["best_epoch"]),
        )


def clip_gradients(grads: Gradients, clip_norm: float) -> tuple[Gradients, float]:
    """Rescale so the global L2 norm over all parameters is <= clip_norm.

    Returns the (possibly rescaled) gradients and the pre-clip norm.
    Gradients at or under the limit pass through unchanged.
    """
    norm = float(np.sqrt(np.sum(grads.weights**2) + np.sum(grads.bias**2)))
    if norm > clip_norm:
        scale = clip_norm / norm
        return Gradients(grads.weights * scale, grads.bias * scale), norm
    return grads, norm


class Adam:
    """Adam with bias correction, applied after global-norm clipping."""

    def __init__(self, config: TrainConfig):
        self.config = config
        self.step_count = 0
        self.m_w: np.ndarray | None = None
        self.v_w: np.ndarray | None = None
        self.m_b: np.ndarray | None = None
        self.v_b: np.ndarray | None = None

    def step(self, model: ProjectionModel, grads: Gradients) -> None:
        """One clipped Adam update, in place on the model parameters."""
        if not (np.isfinite(grads.weights).all() and np.isfinite(grads.bias).all()):
            raise NonFiniteGradientError("gradients contain NaN or infinity")
        if grads.weights.shape != model.weights.shape or grads.bias.shape != model.bias.shape:
            raise DimensionMismatchError("gradient shapes do not match the parameters")
        grads, _ = clip_gradients(grads, self.config.clip_norm)
        if self.m_w is None:
            self.m_w = np.zeros_like(model.weights)
            self.v_w = np.zeros_like(model.weights)
            self.m_b = np.zeros_like(model.bias)
            self.v_b = np.zeros_like(model.bias)
        self.step_count += 1
        b1, b2 = self.config.adam_beta1, self.config.adam_beta2
        lr, eps = self.config.learning_rate, self.config.adam_epsilon
        correct1 = 1.0 - b1**self.step_count
        correct2 = 1.0 - b2**self.step_count
        for params, m, v, g in (
            (model.weights, self.m_w, self.v_w, grads.weights),
            (model.bias, self.m_b, self.v_b, grads.bias),
        ):
            m *= b1
            m += (1.0 - b1) * g
            v *= b2
            v += (1.0 - b2) * g * g
            params -= lr * (m / correct1) / (np.sqrt(v / correct2) + eps)


def _resolve(
    pairs: Sequence[PairExample], embeddings: Mapping[str, np.ndarray]
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pairs of ids -> stacked embedding arrays plus the label vector."""
    if not pairs:
        raise SingleClassDatasetError("no pairs to train on")
    missing = {p.driver_id for p in pairs if p.driver_id not in embeddings}
    missing |= {p.target_id for p in pairs if p.target_id not in embeddings}
    if missing:
        preview = ", ".join(sorted(missing)[:5])
        raise UnresolvedIdError(f"{len(missing)} pair id(s) have no embedding: {preview}")
    a = np.ascontiguousarray([embeddings[p.driver_id] for p in pairs], dtype=np.float64)
    b = np.ascontiguousarray([embeddings[p.target_id] for p in pairs], dtype=np.float64)
    y = np.array([p.label for p in pairs], dtype=np.float64)
    if len(set(y.tolist())) < 2:
        raise SingleClassDatasetError("training data must contain both labels")
    return a, b, y


def _stratified_split(
    y: np.ndarray, fraction: float, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Seeded per-class split into (train_idx, val_idx)."""
    train_parts, val_parts = [], []
    for label in (0.0, 1.0):
        idx = np.flatnonzero(y == label)
        idx = rng.permutation(idx)
        k = int(round(fraction * idx.size))
        if idx.size >= 2:
            k = min(max(k, 1), idx.size - 1)
        else:
            k = 0
        val_parts.append(idx[:k])
        train_parts.append(idx[k:])
    return np.sort(np.concatenate(train_parts)), np.sort(np.concatenate(val_parts))


def _evaluate(
    model: ProjectionModel, a: np.ndarray, b: np.ndarray, y: np.ndarray
) -> tuple[float, float]:
    """(MSE loss, accuracy at the fixed 0.5 cut) on a held-out set."""
    yhat, _ = forward_batch(model, a, b)
    loss = float(np.mean((y - yhat) ** 2))
    predicted = (yhat >= 0.5).astype(np.float64)
    return loss, float(np.mean(predicted == y))


def fit(
    pairs: Sequence[PairExample],
    embeddings: Mapping[str, np.ndarray],
    config: TrainConfig | None = None,
    distance_kind: DistanceKind | None = None,
) -> tuple[ProjectionModel, TrainHistory]:
    """Train the projection head on labeled pairs.

    Mini-batch MSE training with clipped Adam, a seeded stratified
    validation split, and early stopping that restores the best-epoch
    snapshot. Stops once validation loss has failed to improve for
    max(1, patience) consecutive epochs.
    """
    config = config or TrainConfig()
    a, b, y = _resolve(pairs, embeddings)
    rng = np.random.default_rng(config.seed)
    train_idx, val_idx = _stratified_split(y, config.validation_fraction, rng)
    a_tr, b_tr, y_tr = a[train_idx], b[train_idx], y[train_idx]
    a_val, b_val, y_val = a[val_idx], b[val_idx], y[val_idx]

    model = initialize_model(
        in_dim=a.shape[1],
        out_dim=config.out_dim,
        distance_kind=distance_kind or DistanceKind.minkowski(3),
        seed=config.seed,
    )
    optimizer = Adam(config)
    history = TrainHistory()
    best_loss = np.inf
    best_snapshot = model.copy()
    wait = 0

    for _ in range(config.max_epochs):
        order = rng.permutation(y_tr.size)
        epoch_loss = 0.0
        for start in range(0, order.size, config.batch_size):
            batch = order[start : start + config.batch_size]
            loss, grads = loss_and_grad(model, a_tr[batch], b_tr[batch], y_tr[batch])
            optimizer.step(model, grads)
            epoch_loss += loss * batch.size
        val_loss, val_acc = _evaluate(model, a_val, b_val, y_val)
        history.train_loss.append(epoch_loss / order.size)
        history.val_loss.append(val_loss)
        history.val_accuracy.append(val_acc)

        if val_loss < best_loss:
            best_loss = val_loss
            best_snapshot = model.copy()
            history.best_epoch = len(history.val_loss) - 1
            wait = 0
        else:
            wait += 1
            if wait >= max(1, config.patience):
                break
    return best_snapshot, history


def save_model(
    model: ProjectionModel,
    path: str | Path,
    seed: int = 0,
    history: TrainHistory | None = None,
) -> None:
    """Persist a model as JSON (full-precision floats, row-major weights)."""
    payload = {
        "in_dim": model.in_dim,
        "out_dim": model.out_dim,
        "weights": [float(w) for w in model.weights.ravel()],
        "bias": [float(x) for x in model.bias],
        "distance_kind": model.distance_kind.family,
        "p": model.distance_kind.p,
        "seed": seed,
        "history": history.to_dict() if history is not None else None,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_model(path: str | Path) -> tuple[ProjectionModel, int, TrainHistory | None]:
    """Load a persisted model; returns (model, seed, history)."""
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    in_dim, out_dim = int(payload["in_dim"]), int(payload["out_dim"])
    weights = np.array(payload["weights"], dtype=np.float64).reshape(out_dim, in_dim)
    bias = np.array(payload["bias"], dtype=np.float64)
    kind = DistanceKind.from_name(payload["distance_kind"], int(payload["p"]))
    history = (
        TrainHistory.from_dict(payload["history"]) if payload.get("history") else None
    )
    return ProjectionModel(weights, bias, kind), int(payload["seed"]), history
