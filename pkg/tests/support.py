"""Shared test helpers: synthetic corpora and independent oracles.

Everything here is deliberately implemented from first principles
(explicit loops, no calls into the code paths under test) so the tests
have a second, independent route to the expected values.
"""

from __future__ import annotations

import math
import random

import numpy as np

from simcal.dataio import EmbeddingRecord, PairExample, toy_embed
from simcal.model import Gradients, ProjectionModel, loss_and_grad


def reference_distance(x, y, p: int) -> float:
    """Order-p distance via plain Python loops (the test-side oracle)."""
    total = 0.0
    for xi, yi in zip(x, y, strict=True):
        total += abs(xi - yi) ** p
    return total ** (1.0 / p)


def reference_forward(weights, bias, a, b, p: int) -> float:
    """Step-by-step forward pass: matvec, ReLU, distance, tanh."""
    def project(vec):
        out = []
        for row, bias_j in zip(weights, bias):
            acc = bias_j
            for w_ij, v_i in zip(row, vec):
                acc += w_ij * v_i
            out.append(max(acc, 0.0))
        return out

    return math.tanh(reference_distance(project(a), project(b), p))


def finite_difference_grad(
    model: ProjectionModel, a: np.ndarray, b: np.ndarray, labels: np.ndarray, h: float = 1e-4
) -> Gradients:
    """Central finite differences of the batch loss over every parameter."""

    def loss_at(weights: np.ndarray, bias: np.ndarray) -> float:
        probe = ProjectionModel(weights, bias, model.distance_kind)
        loss, _ = loss_and_grad(probe, a, b, labels)
        return loss

    dw = np.zeros_like(model.weights)
    for idx in np.ndindex(model.weights.shape):
        w_plus = model.weights.copy()
        w_minus = model.weights.copy()
        w_plus[idx] += h
        w_minus[idx] -= h
        dw[idx] = (loss_at(w_plus, model.bias) - loss_at(w_minus, model.bias)) / (2 * h)
    db = np.zeros_like(model.bias)
    for j in range(model.bias.size):
        b_plus = model.bias.copy()
        b_minus = model.bias.copy()
        b_plus[j] += h
        b_minus[j] -= h
        db[j] = (loss_at(model.weights, b_plus) - loss_at(model.weights, b_minus)) / (2 * h)
    return Gradients(dw, db)


def gradient_check_instance(
    kind, seed: int, in_dim: int = 8, out_dim: int = 4, batch: int = 3
):
    """A random small model + batch kept away from ReLU and d=0 kinks.

    Finite differences step across non-differentiable points otherwise;
    instances whose pre-activations sit within 1e-2 of zero are
    regenerated from the next seed.
    """
    rng = np.random.default_rng(seed)
    for _ in range(100):
        weights = rng.normal(0.0, 0.6, size=(out_dim, in_dim))
        bias = rng.normal(0.0, 0.3, size=out_dim)
        a = rng.normal(0.0, 1.0, size=(batch, in_dim))
        b = rng.normal(0.0, 1.0, size=(batch, in_dim))
        labels = rng.integers(0, 2, size=batch).astype(np.float64)
        za = a @ weights.T + bias
        zb = b @ weights.T + bias
        if min(np.abs(za).min(), np.abs(zb).min()) > 1e-2:
            u = np.maximum(za, 0.0)
            v = np.maximum(zb, 0.0)
            if np.abs(u - v).sum(axis=1).min() > 1e-2:
                return ProjectionModel(weights, bias, kind), a, b, labels
        weights = None
    raise AssertionError("could not draw a kink-free instance")


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Worst-case per-coordinate relative error with a small absolute floor."""
    scale = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-4)
    return float((np.abs(analytic - numeric) / scale).max())


def make_toy_corpus(
    n_pairs: int = 2000,
    dim: int = 512,
    seed: int = 7,
) -> tuple[list[tuple[str, str]], list[PairExample]]:
    """Synthetic driver/target corpus with a clean similarity structure.

    Positive pairs share at least 60% of their tokens (drawn from one
    shared vocabulary); negative pairs draw driver and target from two
    disjoint vocabularies, so they share none. Returns (texts, pairs)
    where texts is a list of (id, text).
    """
    rng = random.Random(seed)
    shared_vocab = [f"base{i:03d}" for i in range(400)]
    neg_driver_vocab = [f"left{i:03d}" for i in range(250)]
    neg_target_vocab = [f"right{i:03d}" for i in range(250)]

    texts: list[tuple[str, str]] = []
    pairs: list[PairExample] = []
    n_pos = n_pairs // 2

    for k in range(n_pos):
        n_tokens = rng.randint(8, 12)
        driver_tokens = rng.sample(shared_vocab, n_tokens)
        n_keep = math.ceil(0.6 * n_tokens) + rng.randint(0, n_tokens - math.ceil(0.6 * n_tokens))
        kept = rng.sample(driver_tokens, n_keep)
        extras = rng.sample([w for w in shared_vocab if w not in driver_tokens], n_tokens - n_keep)
        target_tokens = kept + extras
        rng.shuffle(target_tokens)
        d_id, t_id = f"d{k:05d}", f"t{k:05d}"
        texts.append((d_id, " ".join(driver_tokens)))
        texts.append((t_id, " ".join(target_tokens)))
        pairs.append(PairExample(d_id, t_id, 0))

    for k in range(n_pos, n_pairs):
        d_id, t_id = f"d{k:05d}", f"t{k:05d}"
        texts.append((d_id, " ".join(rng.sample(neg_driver_vocab, rng.randint(8, 12)))))
        texts.append((t_id, " ".join(rng.sample(neg_target_vocab, rng.randint(8, 12)))))
        pairs.append(PairExample(d_id, t_id, 1))

    return texts, pairs


def embed_corpus(texts, dim: int = 512, seed: int = 7) -> dict[str, np.ndarray]:
    return {text_id: toy_embed(text, dim=dim, seed=seed) for text_id, text in texts}


def corpus_records(texts, dim: int = 512, seed: int = 7) -> list[EmbeddingRecord]:
    return [EmbeddingRecord(text_id, toy_embed(text, dim=dim, seed=seed)) for text_id, text in texts]
