"""Vector distances and the squash functions that map them into [0, 1].

Three distance families are supported: Manhattan, Euclidean, and the
order-p generalization of both. Manhattan and Euclidean run dedicated
fast paths; the generalized family always evaluates the pow form, even
for p = 1 or 2, so the two routes stay independently checkable against
each other.

Everything here is a pure function over immutable inputs and safe for
unrestricted concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from . import _kernels
from .errors import DimensionMismatchError, NegativeDistanceError

_FAMILIES = ("manhattan", "euclidean", "minkowski")


@dataclass(frozen=True)
class DistanceKind:
    """A distance family plus its effective order.

    Use the constructors (:meth:`manhattan`, :meth:`euclidean`,
    :meth:`minkowski`) rather than instantiating directly. ``general``
    is True only for the minkowski family, which keeps the pow-form code
    path even at p = 1 or 2.
    """

    family: str
    p: int

    def __post_init__(self) -> None:
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown distance family {self.family!r}")
        if not isinstance(self.p, int) or isinstance(self.p, bool) or self.p < 1:
            raise ValueError(f"distance order must be an integer >= 1, got {self.p!r}")
        if self.family == "manhattan" and self.p != 1:
            raise ValueError("manhattan distance has fixed order 1")
        if self.family == "euclidean" and self.p != 2:
            raise ValueError("euclidean distance has fixed order 2")

    @classmethod
    def manhattan(cls) -> "DistanceKind":
        return cls("manhattan", 1)

    @classmethod
    def euclidean(cls) -> "DistanceKind":
        return cls("euclidean", 2)

    @classmethod
    def minkowski(cls, p: int = 3) -> "DistanceKind":
        return cls("minkowski", p)

    @classmethod
    def from_name(cls, family: str, p: int = 3) -> "DistanceKind":
        """Build from a CLI/config string, e.g. ('minkowski', 3)."""
        family = family.strip().lower()
        if family == "manhattan":
            return cls.manhattan()
        if family == "euclidean":
            return cls.euclidean()
        if family == "minkowski":
            return cls.minkowski(p)
        raise ValueError(f"unknown distance family {family!r}")

    @property
    def general(self) -> bool:
        return self.family == "minkowski"

    def __str__(self) -> str:
        if self.family == "minkowski":
            return f"minkowski(p={self.p})"
        return self.family


class SquashKind(str, Enum):
    """Monotone maps from a raw distance into the unit interval.

    TANH is distance-oriented (0 stays 0, output in [0, 1)) and is what
    the trained model emits. NEG_EXP is the similarity-oriented exp(-x)
    variant, kept as a utility only; calibration assumes the
    distance orientation throughout.
    """

    TANH = "tanh"
    NEG_EXP = "neg-exp"


def as_vector(values) -> np.ndarray:
    """Validate and convert one vector to a float64 array.

    Rejects empty vectors and non-finite coordinates.
    """
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatchError("a vector must be one-dimensional and non-empty")
    if not np.isfinite(arr).all():
        raise ValueError("vector coordinates must be finite")
    return arr


def distance(kind: DistanceKind, x, y) -> float:
    """Order-p distance between two equal-length vectors.

    Accumulation is always double precision. Symmetric in x and y, zero
    exactly when x == y.
    """
    xv, yv = as_vector(x), as_vector(y)
    if xv.shape != yv.shape:
        raise DimensionMismatchError(
            f"vectors of length {xv.size} and {yv.size} are not comparable"
        )
    d = _kernels.pairwise_distance(
        xv.reshape(1, -1), yv.reshape(1, -1), kind.p, kind.general
    )
    return float(d[0])


def pairwise_distance(kind: DistanceKind, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Row-wise distances between two (n, dim) arrays of paired vectors."""
    xa = np.ascontiguousarray(x, dtype=np.float64)
    ya = np.ascontiguousarray(y, dtype=np.float64)
    if xa.ndim != 2 or xa.shape != ya.shape:
        raise DimensionMismatchError(
            f"paired arrays must share one (n, dim) shape, got {xa.shape} and {ya.shape}"
        )
    return _kernels.pairwise_distance(xa, ya, kind.p, kind.general)


BELOW_ONE = float(np.nextafter(1.0, 0.0))
"""Largest double below 1; tanh outputs clamp here so they stay in [0, 1)."""


def squash(kind: SquashKind, d: float) -> float:
    """Map a nonnegative raw distance into the unit interval.

    TANH outputs are strictly below 1: float64 tanh saturates to exactly
    1.0 near d = 19, so saturated values clamp to the largest double
    below 1 (an error under one ulp).
    """
    if not (d >= 0.0) or math.isinf(d):
        raise NegativeDistanceError(f"squash needs a finite nonnegative distance, got {d!r}")
    if kind is SquashKind.TANH:
        return min(math.tanh(d), BELOW_ONE)
    return math.exp(-d)


def pair_output(kind: DistanceKind, x, y) -> float:
    """The model output for a pair: tanh of the raw distance, in [0, 1)."""
    return squash(SquashKind.TANH, distance(kind, x, y))
