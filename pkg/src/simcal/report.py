"""Deterministic SVG rendering of the two class distributions.

The plot overlays the right-match and wrong-match density polylines over
the [0, 1] distance axis and marks the threshold with a vertical line.
Output is a plain SVG string with fixed formatting: identical inputs
produce identical bytes.
"""

from __future__ import annotations

import csv
from pathlib import Path

from .errors import MalformedReportInputError

WIDTH, HEIGHT = 800, 500
MARGIN_LEFT, MARGIN_RIGHT, MARGIN_TOP, MARGIN_BOTTOM = 64, 20, 20, 56

RIGHT_COLOR = "#2a7fff"
WRONG_COLOR = "#d94f30"
THRESHOLD_COLOR = "#222222"


def read_density_csv(path: str | Path) -> list[tuple[float, float, float]]:
    """Parse a density CSV (bin_center,right_density,wrong_density)."""
    rows: list[tuple[float, float, float]] = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        required = {"bin_center", "right_density", "wrong_density"}
        if reader.fieldnames is None or not required.issubset(reader.fieldnames):
            raise MalformedReportInputError(
                f"{path}: expected columns bin_center,right_density,wrong_density"
            )
        for lineno, row in enumerate(reader, start=2):
            try:
                rows.append(
                    (
                        float(row["bin_center"]),
                        float(row["right_density"]),
                        float(row["wrong_density"]),
                    )
                )
            except (TypeError, ValueError) as exc:
                raise MalformedReportInputError(f"{path}:{lineno}: {exc}") from exc
    if not rows:
        raise MalformedReportInputError(f"{path}: no density rows")
    return rows


def _x_px(x: float) -> float:
    return MARGIN_LEFT + x * (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)


def _polyline(points: list[tuple[float, float]], color: str, cls: str) -> str:
    coords = " ".join(f"{px:.3f},{py:.3f}" for px, py in points)
    return f'<polyline class="{cls}" fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>'


def emit_report(
    rows: list[tuple[float, float, float]], threshold: float, title: str = "distance distributions"
) -> str:
    """Render density rows plus a threshold marker as an SVG document."""
    if not rows:
        raise MalformedReportInputError("no density rows to plot")
    if not all(len(r) == 3 for r in rows):
        raise MalformedReportInputError("each density row needs (center, right, wrong)")
    top = max(max(r[1], r[2]) for r in rows)
    if top <= 0:
        top = 1.0
    y_span = top * 1.05
    plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM

    def y_px(v: float) -> float:
        return MARGIN_TOP + (1.0 - v / y_span) * plot_h

    right_line = _polyline([(_x_px(c), y_px(r)) for c, r, _ in rows], RIGHT_COLOR, "right-density")
    wrong_line = _polyline([(_x_px(c), y_px(w)) for c, _, w in rows], WRONG_COLOR, "wrong-density")
    tx = _x_px(threshold)

    x_ticks = []
    for value in (0.0, 0.25, 0.5, 0.75, 1.0):
        px = _x_px(value)
        x_ticks.append(
            f'<line x1="{px:.3f}" y1="{HEIGHT - MARGIN_BOTTOM}" x2="{px:.3f}" '
            f'y2="{HEIGHT - MARGIN_BOTTOM + 6}" stroke="#555"/>'
            f'<text x="{px:.3f}" y="{HEIGHT - MARGIN_BOTTOM + 20}" font-size="12" '
            f'text-anchor="middle">{value:g}</text>'
        )

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<title>{title}</title>',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{MARGIN_LEFT}" y1="{HEIGHT - MARGIN_BOTTOM}" x2="{WIDTH - MARGIN_RIGHT}" '
        f'y2="{HEIGHT - MARGIN_BOTTOM}" stroke="#555"/>',
        f'<line x1="{MARGIN_LEFT}" y1="{MARGIN_TOP}" x2="{MARGIN_LEFT}" '
        f'y2="{HEIGHT - MARGIN_BOTTOM}" stroke="#555"/>',
        *x_ticks,
        right_line,
        wrong_line,
        f'<line class="threshold" x1="{tx:.3f}" y1="{MARGIN_TOP}" x2="{tx:.3f}" '
        f'y2="{HEIGHT - MARGIN_BOTTOM}" stroke="{THRESHOLD_COLOR}" stroke-width="1.2" '
        f'stroke-dasharray="5,4"/>',
        f'<text x="{tx:.3f}" y="{MARGIN_TOP + 12}" font-size="12" text-anchor="middle" '
        f'fill="{THRESHOLD_COLOR}">threshold {threshold:.4f}</text>',
        f'<text x="{(MARGIN_LEFT + WIDTH - MARGIN_RIGHT) / 2:.1f}" y="{HEIGHT - 10}" '
        f'font-size="13" text-anchor="middle">squashed distance</text>',
        f'<text x="16" y="{(MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2:.1f}" font-size="13" '
        f'text-anchor="middle" transform="rotate(-90 16 '
        f'{(MARGIN_TOP + HEIGHT - MARGIN_BOTTOM) / 2:.1f})">density</text>',
        f'<rect x="{WIDTH - 200}" y="{MARGIN_TOP + 8}" width="12" height="12" fill="{RIGHT_COLOR}"/>',
        f'<text x="{WIDTH - 182}" y="{MARGIN_TOP + 18}" font-size="12">right matches</text>',
        f'<rect x="{WIDTH - 200}" y="{MARGIN_TOP + 28}" width="12" height="12" fill="{WRONG_COLOR}"/>',
        f'<text x="{WIDTH - 182}" y="{MARGIN_TOP + 38}" font-size="12">wrong matches</text>',
        "</svg>",
    ]
    return "\n".join(parts) + "\n"


def threshold_pixel_to_value(px: float) -> float:
    """Invert the x transform (used to check a rendered threshold line)."""
    return (px - MARGIN_LEFT) / (WIDTH - MARGIN_LEFT - MARGIN_RIGHT)
