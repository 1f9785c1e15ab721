"""Accuracy tables: a 0-100 score for each prediction by distance.

Each side of the threshold gets its own table built from the calibration
distances. Two per-bin scales are combined: a closeness ramp rewarding
proximity to the side's optimal value (0 for right matches, 1 for wrong
matches), and a distribution scale rewarding proximity to the side's
histogram peak, where new predictions are most likely to land. Their sum
is min-max rescaled to [0, 100], and new predictions are scored by
linear interpolation over the bin centers.

Tables are immutable once built; scoring is pure and concurrency-safe.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .calibration import classify
from .errors import (
    DegenerateScaleError,
    EmptySideError,
    ThresholdMismatchError,
    WrongSideSampleError,
)

ACCURACY_BINS = 1000


class Side(str, Enum):
    RIGHT = "right"
    WRONG = "wrong"


@dataclass
class AccuracyTable:
    """Per-bin scores for one side of the threshold.

    The right side spans [0, threshold], the wrong side [threshold, 1].
    ``distribution_scale`` is None on tables reloaded from disk (it is
    an intermediate; the persisted score is what scoring needs).
    """

    side: Side
    threshold: float
    bin_edges: np.ndarray  # (n_bins + 1,)
    closeness_scale: np.ndarray  # (n_bins,) ints, n_bins down to 1 toward the threshold
    distribution_scale: np.ndarray | None  # (n_bins,)
    score: np.ndarray  # (n_bins,) in [0, 100]

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])

    @property
    def n_bins(self) -> int:
        return self.score.size


@dataclass(frozen=True)
class ScoredPrediction:
    distance: float
    label: int
    accuracy_score: float


def rescale(values) -> np.ndarray:
    """Affine map of an array onto [0, 100] (min to 0, max to 100)."""
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        raise DegenerateScaleError("rescaling needs at least two values")
    lo, hi = float(arr.min()), float(arr.max())
    if hi == lo:
        raise DegenerateScaleError("all values are equal; the rescale is undefined")
    return (arr - lo) / (hi - lo) * 100.0


def closeness_ramp(side: Side, n_bins: int) -> np.ndarray:
    """Integer ramp rewarding closeness to the side's optimal distance.

    Bin 0 of the right side (distance near 0) scores n_bins, falling to
    1 at the threshold; the wrong side mirrors it, rising to n_bins at
    distance 1.
    """
    if side is Side.RIGHT:
        return np.arange(n_bins, 0, -1, dtype=np.int64)
    return np.arange(1, n_bins + 1, dtype=np.int64)


def distribution_ramp(counts: np.ndarray) -> np.ndarray:
    """Peak-anchored scale: 1.0 at bin 0, +0.5 per bin through the peak
    (histogram argmax, lowest index on ties), -0.5 per bin after.

    Values may go negative on long tails; the later rescale absorbs
    that. Empty bins are scaled like any other: the scale is a function
    of bin index, not occupancy.
    """
    peak = int(np.argmax(counts))
    idx = np.arange(counts.size, dtype=np.float64)
    up = 1.0 + 0.5 * idx
    return np.where(idx <= peak, up, up[peak] - 0.5 * (idx - peak))


def build_accuracy_table(
    distances,
    side: Side,
    threshold: float,
    n_bins: int = ACCURACY_BINS,
) -> AccuracyTable:
    """Build one side's table from that side's calibration distances."""
    if not 0.0 < threshold < 1.0:
        raise ValueError(f"threshold must be inside (0, 1), got {threshold!r}")
    d = np.asarray(distances, dtype=np.float64).ravel()
    if d.size == 0:
        raise EmptySideError(f"no distances supplied for the {side.value} side")
    if side is Side.RIGHT:
        onside = (d >= 0.0) & (d < threshold)
        lo, hi = 0.0, threshold
    else:
        onside = (d >= threshold) & (d <= 1.0)
        lo, hi = threshold, 1.0
    if not onside.all():
        offender = float(d[~onside][0])
        raise WrongSideSampleError(
            f"distance {offender} is not on the {side.value} side of threshold {threshold}"
        )
    edges = np.linspace(lo, hi, n_bins + 1)
    counts, _ = np.histogram(d, bins=edges)
    closeness = closeness_ramp(side, n_bins)
    dist_scale = distribution_ramp(counts)
    score = rescale(closeness + dist_scale)
    return AccuracyTable(
        side=side,
        threshold=float(threshold),
        bin_edges=edges,
        closeness_scale=closeness,
        distribution_scale=dist_scale,
        score=score,
    )


def score_prediction(
    distance: float,
    threshold: float,
    right_table: AccuracyTable,
    wrong_table: AccuracyTable,
) -> ScoredPrediction:
    """Classify a distance and score it against the matching table.

    The score interpolates linearly between bin-center scores; distances
    outside the center range clamp to the nearest endpoint (scores never
    leave [0, 100]).
    """
    if right_table.side is not Side.RIGHT or wrong_table.side is not Side.WRONG:
        raise ValueError("tables passed in the wrong order")
    for table in (right_table, wrong_table):
        if table.threshold != threshold:
            raise ThresholdMismatchError(
                f"table was built at threshold {table.threshold}, scoring asked for {threshold}"
            )
    if not 0.0 <= distance < 1.0:
        raise ValueError(f"distance must be in [0, 1), got {distance!r}")
    label = classify(distance, threshold)
    table = right_table if label == 0 else wrong_table
    accuracy = float(np.interp(distance, table.bin_centers, table.score))
    return ScoredPrediction(distance=float(distance), label=label, accuracy_score=accuracy)


def save_accuracy_table(table: AccuracyTable, path: str | Path) -> None:
    """Persist the scoring-relevant fields as JSON."""
    payload = {
        "side": table.side.value,
        "threshold": table.threshold,
        "bin_edges": [float(e) for e in table.bin_edges],
        "score": [float(s) for s in table.score],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_accuracy_table(path: str | Path) -> AccuracyTable:
    """Reload a persisted table.

    The closeness ramp is a pure function of the side and is recomputed;
    the distribution scale is not persisted and comes back as None.
    Scoring behavior is bit-identical to the table that was saved.
    """
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    side = Side(payload["side"])
    edges = np.array(payload["bin_edges"], dtype=np.float64)
    score = np.array(payload["score"], dtype=np.float64)
    if edges.size != score.size + 1 or score.size < 1:
        raise ValueError(f"{path}: inconsistent accuracy table")
    return AccuracyTable(
        side=side,
        threshold=float(payload["threshold"]),
        bin_edges=edges,
        closeness_scale=closeness_ramp(side, score.size),
        distribution_scale=None,
        score=score,
    )
