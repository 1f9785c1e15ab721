import xml.etree.ElementTree as ET

import numpy as np
import pytest

from simcal.calibration import calibrate, write_density_csv
from simcal.distances import DistanceKind
from simcal.errors import MalformedReportInputError
from simcal.report import emit_report, read_density_csv, threshold_pixel_to_value

SVG_NS = "{http://www.w3.org/2000/svg}"


def _threshold_x(svg: str) -> float:
    root = ET.fromstring(svg)
    lines = [el for el in root.iter(f"{SVG_NS}line") if el.get("class") == "threshold"]
    assert len(lines) == 1
    return float(lines[0].get("x1"))


def test_threshold_line_matches_calibration(tmp_path):
    rng = np.random.default_rng(6)
    d = np.concatenate(
        [np.clip(rng.normal(0.3, 0.05, 4000), 0, 1), np.clip(rng.normal(0.7, 0.05, 4000), 0, 1)]
    )
    y = np.concatenate([np.zeros(4000, dtype=int), np.ones(4000, dtype=int)])
    result, dp = calibrate(d, y, DistanceKind.minkowski(3))
    path = tmp_path / "densities.csv"
    write_density_csv(dp, path)
    svg = emit_report(read_density_csv(path), result.threshold)
    recovered = threshold_pixel_to_value(_threshold_x(svg))
    assert recovered == pytest.approx(result.threshold, abs=1e-5)


def test_separated_spikes_have_threshold_between(tmp_path):
    rows = [(0.2, 10.0, 0.0), (0.5, 0.0, 0.0), (0.8, 0.0, 10.0)]
    svg = emit_report(rows, 0.5)
    root = ET.fromstring(svg)
    polylines = {el.get("class"): el for el in root.iter(f"{SVG_NS}polyline")}
    assert set(polylines) == {"right-density", "wrong-density"}
    tx = _threshold_x(svg)
    right_pts = polylines["right-density"].get("points").split()
    wrong_pts = polylines["wrong-density"].get("points").split()
    right_peak_x = float(right_pts[0].split(",")[0])
    wrong_peak_x = float(wrong_pts[-1].split(",")[0])
    assert right_peak_x < tx < wrong_peak_x


def test_deterministic_output():
    rows = [(0.1, 1.0, 0.2), (0.9, 0.1, 2.0)]
    assert emit_report(rows, 0.42) == emit_report(rows, 0.42)


def test_empty_rows_rejected():
    with pytest.raises(MalformedReportInputError):
        emit_report([], 0.5)


def test_empty_csv_body_rejected(tmp_path):
    path = tmp_path / "densities.csv"
    path.write_text("bin_center,right_density,wrong_density\n")
    with pytest.raises(MalformedReportInputError):
        read_density_csv(path)


def test_missing_columns_rejected(tmp_path):
    path = tmp_path / "densities.csv"
    path.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(MalformedReportInputError):
        read_density_csv(path)


def test_svg_is_well_formed_xml():
    rows = [(i / 10, float(i), float(10 - i)) for i in range(11)]
    root = ET.fromstring(emit_report(rows, 0.31))
    assert root.tag == f"{SVG_NS}svg"
