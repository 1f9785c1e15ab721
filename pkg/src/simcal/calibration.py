"""Per-class distance distributions and the similarity threshold.

The two classes of squashed distances (right matches near 0, wrong
matches near 1) are binned over [0, 1] on a shared grid. The threshold
is the crossing point of the two distributions in the cumulative sense:
scanning the bin edges from left to right, the fraction of wrong-match
mass below an edge grows while the fraction of right-match mass at or
above it shrinks, and the threshold is the midpoint of the span where
the two balance. For overlapping unimodal classes this lands where the
densities cross; for fully separated classes it lands mid-gap; and it is
robust when the densities run flat against each other, where a
bin-by-bin density comparison would be decided by sampling noise.

Distances below the threshold classify as right (0), at or above as
wrong (1). All computations are pure over immutable inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .distances import DistanceKind
from .errors import (
    DistanceOutOfRangeError,
    DistributionsInvertedError,
    NoCrossingError,
    SingleClassInputError,
)


@dataclass
class DistributionPair:
    """Shared-grid histograms of both classes, with per-class peaks.

    Densities are normalized per class (sum of density * bin width is 1)
    and optionally smoothed; ``right_bin_counts``/``wrong_bin_counts``
    keep the raw integer histograms the threshold rule works from.
    """

    bin_edges: np.ndarray  # (n_bins + 1,)
    right_density: np.ndarray  # (n_bins,)
    wrong_density: np.ndarray  # (n_bins,)
    right_peak_bin: int
    wrong_peak_bin: int
    right_count: int
    wrong_count: int
    right_bin_counts: np.ndarray  # (n_bins,) ints
    wrong_bin_counts: np.ndarray  # (n_bins,) ints

    @property
    def n_bins(self) -> int:
        return self.right_density.size

    @property
    def bin_centers(self) -> np.ndarray:
        return 0.5 * (self.bin_edges[:-1] + self.bin_edges[1:])


@dataclass(frozen=True)
class CalibrationResult:
    """The derived threshold plus the per-class mislabel fractions."""

    threshold: float
    mislabeled_wrong_fraction: float
    mislabeled_right_fraction: float
    distance_kind: DistanceKind


def _smooth3(values: np.ndarray) -> np.ndarray:
    """Centered moving average, window 3, edges averaged over what exists."""
    out = np.empty_like(values)
    out[1:-1] = (values[:-2] + values[1:-1] + values[2:]) / 3.0
    out[0] = values[:2].mean()
    out[-1] = values[-2:].mean()
    return out


def build_distributions(
    distances,
    labels,
    n_bins: int = 200,
    smooth: bool = True,
) -> DistributionPair:
    """Bin squashed distances per class over a shared [0, 1] grid.

    Densities are per-class normalized (also after smoothing, which
    otherwise leaks mass at the edge bins). Peak bins are the argmax of
    the final densities, lowest index on ties.
    """
    d = np.asarray(distances, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel()
    if d.size != y.size:
        raise ValueError(f"{d.size} distances but {y.size} labels")
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    if d.size == 0 or not ((d >= 0.0) & (d <= 1.0)).all():
        raise DistanceOutOfRangeError("distances must be within [0, 1]")
    if n_bins < 2:
        raise ValueError("n_bins must be >= 2")
    right = d[y == 0]
    wrong = d[y == 1]
    if right.size == 0 or wrong.size == 0:
        raise SingleClassInputError("both classes must be present")

    edges = np.linspace(0.0, 1.0, n_bins + 1)
    width = 1.0 / n_bins
    right_counts, _ = np.histogram(right, bins=edges)
    wrong_counts, _ = np.histogram(wrong, bins=edges)

    densities = []
    for counts, total in ((right_counts, right.size), (wrong_counts, wrong.size)):
        density = counts / (total * width)
        if smooth:
            density = _smooth3(density)
            density /= density.sum() * width
        densities.append(density)
    right_density, wrong_density = densities

    return DistributionPair(
        bin_edges=edges,
        right_density=right_density,
        wrong_density=wrong_density,
        right_peak_bin=int(np.argmax(right_density)),
        wrong_peak_bin=int(np.argmax(wrong_density)),
        right_count=int(right.size),
        wrong_count=int(wrong.size),
        right_bin_counts=right_counts.astype(np.int64),
        wrong_bin_counts=wrong_counts.astype(np.int64),
    )


def find_threshold(dp: DistributionPair) -> float:
    """Crossing point of the two class distributions.

    At each bin edge, compare the fraction of wrong-match mass strictly
    below it against the fraction of right-match mass at or above it.
    The first quantity only grows along the axis and the second only
    shrinks, so they cross exactly once, possibly along a flat span
    (ties count as part of the crossing); the threshold is the midpoint
    of that span. Comparisons use exact integer arithmetic on the raw
    bin counts.

    Raises NoCrossingError when the two densities are identical
    everywhere, and DistributionsInvertedError when the right-match peak
    does not precede the wrong-match peak.
    """
    if np.array_equal(dp.right_density, dp.wrong_density):
        raise NoCrossingError("right and wrong distributions are identical")
    if dp.right_peak_bin >= dp.wrong_peak_bin:
        raise DistributionsInvertedError(
            f"right peak bin {dp.right_peak_bin} is at or beyond "
            f"wrong peak bin {dp.wrong_peak_bin}"
        )
    n_r, n_w = dp.right_count, dp.wrong_count
    cum_right = np.concatenate([[0], np.cumsum(dp.right_bin_counts)])
    cum_wrong = np.concatenate([[0], np.cumsum(dp.wrong_bin_counts)])
    # balance(i) = wrong_below(edge_i)/n_w - right_at_or_above(edge_i)/n_r,
    # compared in integers: cum_wrong * n_r  vs  (n_r - cum_right) * n_w.
    lhs = cum_wrong * n_r
    rhs = (n_r - cum_right) * n_w
    nonneg = np.flatnonzero(lhs >= rhs)
    nonpos = np.flatnonzero(lhs <= rhs)
    first_nonneg = int(nonneg[0])  # exists: the last edge has all wrong mass below
    last_nonpos = int(nonpos[-1])  # exists: the first edge has all right mass above
    return float(0.5 * (dp.bin_edges[first_nonneg] + dp.bin_edges[last_nonpos]))


def classify(distance: float, threshold: float) -> int:
    """0 (right match) below the threshold, 1 (wrong match) at or above."""
    return 0 if distance < threshold else 1


def mislabel_rate(distances, labels, threshold: float) -> tuple[float, float]:
    """Per-class fractions landing on the other class's side.

    Returns (wrong_fraction, right_fraction): the share of wrong matches
    below the threshold and of right matches at or above it. Counting is
    exact.
    """
    d = np.asarray(distances, dtype=np.float64).ravel()
    y = np.asarray(labels).ravel()
    right = d[y == 0]
    wrong = d[y == 1]
    if right.size == 0 or wrong.size == 0:
        raise SingleClassInputError("both classes must be present")
    wrong_fraction = int((wrong < threshold).sum()) / wrong.size
    right_fraction = int((right >= threshold).sum()) / right.size
    return wrong_fraction, right_fraction


def write_density_csv(dp: DistributionPair, path) -> None:
    """Write the per-bin densities (bin_center,right_density,wrong_density)."""
    centers = dp.bin_centers
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write("bin_center,right_density,wrong_density\n")
        for i in range(dp.n_bins):
            fh.write(
                f"{float(centers[i])!r},{float(dp.right_density[i])!r},"
                f"{float(dp.wrong_density[i])!r}\n"
            )


def calibrate(
    distances,
    labels,
    distance_kind: DistanceKind,
    n_bins: int = 200,
    smooth: bool = True,
) -> tuple[CalibrationResult, DistributionPair]:
    """Distributions, threshold, and mislabel rates in one step."""
    dp = build_distributions(distances, labels, n_bins=n_bins, smooth=smooth)
    threshold = find_threshold(dp)
    wrong_fraction, right_fraction = mislabel_rate(distances, labels, threshold)
    return (
        CalibrationResult(threshold, wrong_fraction, right_fraction, distance_kind),
        dp,
    )
