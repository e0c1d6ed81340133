import json
import math
import os
import xml.etree.ElementTree as ET

import pytest
import yaml

from annulus_conformal import __main__ as cli
from annulus_conformal.__main__ import main
from annulus_conformal.config import get_global_conf
from annulus_conformal.core.composite import build_composite
from annulus_conformal.utils.cli_helper import RunConfig, build_outer_map, build_target
from annulus_conformal.utils.export_helper import build_curves
from annulus_conformal.utils.logger import logger
from tests.test_base import last_digit_unit, read_csv_rows

TABLE_MAP_FLAGS = ["--n", "2", "--m", "0.25", "--rout", "1"]
SOLVE_KEYS = ["C", "n", "m_or_terms", "e", "r1", "lambda", "rho1", "h", "R", "epsilon", "s", "delta_max"]


def solve_stdout(capsys: pytest.CaptureFixture[str], *flags: str) -> dict:
    assert main(["solve", *flags]) == 0
    return json.loads(capsys.readouterr().out)


def write_file(path: str, content: str) -> str:
    with open(path, "w", encoding="utf-8") as f:
        f.write(content)
    return path


def test_solve_prints_report(capsys: pytest.CaptureFixture[str]) -> None:
    report = solve_stdout(capsys, *TABLE_MAP_FLAGS, "--R", "0.25", "--d", "1")
    assert list(report) == SOLVE_KEYS
    assert report["C"] == pytest.approx(0.8)
    assert report["n"] == 2
    assert report["m_or_terms"] == 0.25
    assert report["h"] == pytest.approx(2.25)
    assert report["epsilon"] == pytest.approx(0.1151, abs=1e-4)
    assert report["delta_max"] == pytest.approx(0.0012, abs=1e-4)
    assert report["rho1"] < 1.0 / report["lambda"] < 1.0


def test_solve_auto_m(capsys: pytest.CaptureFixture[str]) -> None:
    report = solve_stdout(capsys, "--n", "3", "--m", "auto", "--C", "1", "--R", "0.5", "--d", "1")
    assert report["m_or_terms"] == pytest.approx(1.0 / 9.0)


def test_solve_circular_outer_hole(capsys: pytest.CaptureFixture[str]) -> None:
    report = solve_stdout(capsys, "--n", "2", "--m", "0", "--C", "1", "--R", "0.5", "--h", "3")
    assert report["e"] == pytest.approx(3.0)
    assert report["delta_max"] < 1e-12


def test_solve_polygon(capsys: pytest.CaptureFixture[str]) -> None:
    report = solve_stdout(capsys, "--shape", "polygon", "--nsides", "4", "--C", "1", "--R", "1", "--d", "1", "--gap-from", "norm")
    assert report["n"] == 4
    assert report["m_or_terms"] == 5
    assert report["delta_max"] == pytest.approx(0.0089, rel=0.1)


def test_solve_round_trip_through_centre(capsys: pytest.CaptureFixture[str]) -> None:
    by_gap = solve_stdout(capsys, *TABLE_MAP_FLAGS, "--R", "2", "--d", "0.1")
    by_centre = solve_stdout(capsys, *TABLE_MAP_FLAGS, "--R", "2", "--h", repr(by_gap["h"]))
    assert by_centre["e"] == pytest.approx(by_gap["e"], rel=1e-10)
    assert by_centre["r1"] == pytest.approx(by_gap["r1"], rel=1e-10)


def test_gap_measured_from_curve_for_every_normalization(capsys: pytest.CaptureFixture[str]) -> None:
    by_radius = solve_stdout(capsys, *TABLE_MAP_FLAGS, "--R", "0.25", "--d", "1e-5")
    by_scale = solve_stdout(capsys, "--n", "2", "--m", "0.25", "--C", "0.8", "--R", "0.25", "--d", "1e-5")
    assert by_radius["h"] == pytest.approx(1.25001, abs=1e-10)
    assert by_scale["h"] == pytest.approx(by_radius["h"], abs=1e-12)
    assert by_scale["e"] == pytest.approx(by_radius["e"], rel=1e-12)


def test_gap_from_normalization_value(capsys: pytest.CaptureFixture[str]) -> None:
    report = solve_stdout(capsys, "--n", "2", "--m", "0.25", "--C", "0.8", "--R", "0.25", "--d", "1", "--gap-from", "norm")
    assert report["h"] == pytest.approx(0.8 + 1.0 + 0.25, abs=1e-12)


def test_solve_to_file(run_data: str, capsys: pytest.CaptureFixture[str]) -> None:
    path = os.path.join(run_data, "solve.json")
    assert main(["solve", *TABLE_MAP_FLAGS, "--R", "1", "--d", "0.1", "--output", path]) == 0
    assert capsys.readouterr().out == ""
    with open(path, "r", encoding="utf-8") as f:
        assert json.load(f)["delta_max"] == pytest.approx(0.0587, abs=2e-4)


def test_curve_csv(run_data: str) -> None:
    path = os.path.join(run_data, "curve.csv")
    assert main(["curve", *TABLE_MAP_FLAGS, "--R", "0.5", "--d", "0.1", "--samples", "36", "--output", path]) == 0
    rows = read_csv_rows(path)
    assert list(rows[0]) == ["curve", "theta", "x", "y"]
    assert len(rows) == 3 * 36
    assert [row["curve"] for row in rows[::36]] == ["outer", "hole", "hole_circle_ref"]
    reference = rows[72]
    assert float(reference["theta"]) == 0.0
    assert float(reference["x"]) == pytest.approx(1.1 + 0.5 + 0.5, abs=1e-9)
    assert float(rows[0]["x"]) == pytest.approx(1.0, abs=1e-9)


def test_curve_csv_values_within_last_digit(run_data: str) -> None:
    path = os.path.join(run_data, "curve_digits.csv")
    assert main(["curve", *TABLE_MAP_FLAGS, "--R", "0.5", "--d", "0.1", "--samples", "36", "--precision", "6", "--output", path]) == 0
    config = RunConfig(n=2, m=0.25, r_out=1.0, R=0.5, d=0.1)
    curves = build_curves(build_composite(build_outer_map(config), build_target(config)), 36)
    exact = [(float(t), float(z.real), float(z.imag)) for c in curves for t, z in zip(c.thetas, c.points)]
    rows = read_csv_rows(path)
    assert len(rows) == len(exact)
    for row, values in zip(rows, exact):
        for text, value in zip((row["theta"], row["x"], row["y"]), values):
            assert abs(float(text) - value) <= last_digit_unit(value, 6)


def test_curve_svg(run_data: str) -> None:
    path = os.path.join(run_data, "curve.svg")
    assert main(["curve", *TABLE_MAP_FLAGS, "--R", "0.5", "--d", "0.1", "--format", "svg", "--samples", "90", "--output", path]) == 0
    root = ET.parse(path).getroot()
    polygons = root.findall("{http://www.w3.org/2000/svg}polygon")
    assert [p.get("class") for p in polygons] == ["outer", "hole", "hole_circle_ref"]
    assert all(len(p.get("points", "").split()) == 90 for p in polygons)
    assert polygons[2].get("stroke-dasharray") == "6 4"


def test_curve_json(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["curve", *TABLE_MAP_FLAGS, "--R", "0.5", "--d", "0.1", "--format", "json", "--samples", "12"]) == 0
    records = json.loads(capsys.readouterr().out)
    assert len(records) == 36
    assert set(records[0]) == {"curve", "theta", "x", "y"}


def test_curve_output_is_deterministic(run_data: str) -> None:
    paths = [os.path.join(run_data, f"repeat_{i}.csv") for i in range(2)]
    for path in paths:
        assert main(["curve", "--shape", "polygon", "--nsides", "3", "--C", "1", "--R", "1", "--d", "1", "--output", path]) == 0
    with open(paths[0], "rb") as first, open(paths[1], "rb") as second:
        assert first.read() == second.read()


def test_table1(run_data: str) -> None:
    path = os.path.join(run_data, "table1.csv")
    assert main(["table1", "--precision", "4", "--output", path]) == 0
    rows = read_csv_rows(path)
    assert len(rows) == 21
    assert list(rows[0]) == ["R", "d", "epsilon", "delta_max"]
    assert rows[0]["R"] == "0.25"
    assert rows[0]["d"] == "1e-05"
    assert float(rows[-1]["delta_max"]) == pytest.approx(0.0320, abs=2e-3)


def test_grid(run_data: str) -> None:
    path = os.path.join(run_data, "grid.csv")
    assert main(["grid", *TABLE_MAP_FLAGS, "--R", "1", "--d", "0.1", "--rings", "4", "--rays", "8", "--output", path]) == 0
    rows = read_csv_rows(path)
    assert len(rows) == 32
    assert list(rows[0]) == ["ring", "ray", "x", "y", "at_infinity"]
    assert all(row["at_infinity"] == "0" for row in rows)


def test_grid_flags_pole_from_config_file(run_data: str) -> None:
    config = write_file(
        os.path.join(run_data, "grid.env"),
        "POLE_TOLERANCE=0.05\nn=2\nm=0\nC=1\nR=0.5\nh=3\nrings=41\nrays=36\n",
    )
    path = os.path.join(run_data, "grid_pole.csv")
    assert main(["grid", "--config", config, "--output", path]) == 0
    assert get_global_conf().get_pole_tolerance() == 0.05
    flagged = [row for row in read_csv_rows(path) if row["at_infinity"] == "1"]
    assert flagged
    assert all(row["x"] == "" and row["y"] == "" for row in flagged)


def test_benchmarks(run_data: str) -> None:
    path = os.path.join(run_data, "benchmarks.csv")
    assert main(["benchmarks", "--output", path]) == 0
    rows = read_csv_rows(path)
    assert len(rows) == 15
    assert [row["name"] for row in rows if row["matched"] == "0"] == ["polygon n=8 terms=3 rotated a=1 d=0.5 R=2"]


def test_yaml_config_with_flag_override(run_data: str, capsys: pytest.CaptureFixture[str]) -> None:
    config = os.path.join(run_data, "cell.yaml")
    with open(config, "w", encoding="utf-8") as f:
        yaml.safe_dump({"n": 2, "m": 0.25, "rout": 1.0, "R": 0.25, "d": 1.0, "COARSE_SAMPLES": 360}, f)
    report = solve_stdout(capsys, "--config", config, "--R", "0.5")
    assert report["R"] == pytest.approx(0.5)
    assert report["epsilon"] == pytest.approx(0.2051, abs=1e-4)
    assert get_global_conf().get_coarse_samples() == 360


def test_json_config_strips_dashes(run_data: str, capsys: pytest.CaptureFixture[str]) -> None:
    config = write_file(
        os.path.join(run_data, "cell.json"),
        json.dumps({"--n": 2, "--m": "auto", "--rout": 1, "--R": 0.25, "--d": 1}),
    )
    report = solve_stdout(capsys, "--config", config)
    assert report["epsilon"] == pytest.approx(0.1151, abs=1e-4)


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", *TABLE_MAP_FLAGS, "--d", "1"],
        ["solve", *TABLE_MAP_FLAGS, "--R", "1", "--d", "1", "--h", "3"],
        ["solve", "--n", "2", "--m", "0.25", "--R", "1", "--d", "1"],
        ["solve", "--n", "2", "--m", "0.25", "--C", "1", "--a", "1", "--R", "1", "--d", "1"],
        ["solve", "--shape", "polygon", "--C", "1", "--R", "1", "--d", "1"],
        ["solve", *TABLE_MAP_FLAGS, "--R", "-1", "--d", "1"],
        ["solve", "--n", "2", "--m", "0.25", "--C", "-1", "--R", "1", "--d", "1"],
        ["solve", "--n", "2", "--m", "0.25", "--rout", "0", "--R", "1", "--d", "1"],
        ["solve", *TABLE_MAP_FLAGS, "--R", "1", "--d", "1", "--gap-from", "centre"],
        ["curve", *TABLE_MAP_FLAGS, "--R", "1", "--d", "1", "--samples", "2"],
        ["transform", "--R", "1"],
        [],
    ],
)
def test_usage_errors(argv: list[str]) -> None:
    assert main(argv) == 1


def test_config_file_errors(run_data: str) -> None:
    assert main(["solve", "--config", os.path.join(run_data, "missing.env")]) == 1
    unknown = write_file(os.path.join(run_data, "unknown.env"), "R=1\nWIDTH=3\n")
    assert main(["solve", "--config", unknown]) == 1
    broken = write_file(os.path.join(run_data, "broken.yaml"), "n: [2\nR: 1\n")
    assert main(["solve", "--config", broken]) == 1


def test_config_file_debug_mode(run_data: str, capsys: pytest.CaptureFixture[str]) -> None:
    config = write_file(os.path.join(run_data, "debug.env"), "MODE=debug\n")
    solve_stdout(capsys, "--config", config, *TABLE_MAP_FLAGS, "--R", "1", "--d", "1")
    assert get_global_conf().get_log_level() == "DEBUG"
    assert logger.level == 10


@pytest.mark.parametrize(
    "argv",
    [
        ["solve", *TABLE_MAP_FLAGS, "--R", "0.1", "--h", "0.4"],
        ["solve", "--n", "2", "--m", "0", "--C", "1", "--R", "0.5", "--h", "1.2"],
        ["solve", "--n", "2", "--m", "0.9", "--C", "1", "--R", "0.5", "--d", "1"],
    ],
)
def test_computation_failures(argv: list[str]) -> None:
    assert main(argv) == 2


def test_value_error_while_computing_is_a_failure(monkeypatch: pytest.MonkeyPatch) -> None:
    def broken_scan(*args: object, **kwargs: object) -> None:
        raise ValueError("scan failed")

    monkeypatch.setattr(cli, "max_discrepancy", broken_scan)
    assert main(["solve", *TABLE_MAP_FLAGS, "--R", "1", "--d", "1"]) == 2


def test_unwritable_output(run_data: str) -> None:
    path = os.path.join(run_data, "no_such_dir", "curve.csv")
    assert main(["curve", *TABLE_MAP_FLAGS, "--R", "1", "--d", "1", "--output", path]) == 2


def test_log_level_flag(capsys: pytest.CaptureFixture[str]) -> None:
    report = solve_stdout(capsys, *TABLE_MAP_FLAGS, "--R", "1", "--d", "1", "--log-level", "debug")
    assert report["epsilon"] == pytest.approx(0.3382, abs=1e-4)


def test_curve_hole_within_delta_max(run_data: str, capsys: pytest.CaptureFixture[str]) -> None:
    flags = ["--n", "2", "--m", "auto", "--rout", "1", "--R", "1", "--d", "0.1"]
    delta_max = solve_stdout(capsys, *flags)["delta_max"]
    path = os.path.join(run_data, "hole_vs_circle.csv")
    assert main(["curve", *flags, "--samples", "180", "--output", path]) == 0
    rows = read_csv_rows(path)
    hole = [complex(float(r["x"]), float(r["y"])) for r in rows if r["curve"] == "hole"]
    circle = [complex(float(r["x"]), float(r["y"])) for r in rows if r["curve"] == "hole_circle_ref"]
    gaps = [abs(a - b) for a, b in zip(hole, circle)]
    assert max(gaps) <= delta_max + 1e-9
    assert max(gaps) == pytest.approx(delta_max, abs=1e-9)


def test_curve_triangle_symmetry(run_data: str) -> None:
    path = os.path.join(run_data, "triangle.csv")
    argv = ["curve", "--shape", "polygon", "--nsides", "3", "--terms", "5", "--C", "1", "--R", "1", "--d", "1", "--samples", "36"]
    assert main([*argv, "--output", path]) == 0
    outer = [complex(float(r["x"]), float(r["y"])) for r in read_csv_rows(path) if r["curve"] == "outer"]
    turn = complex(math.cos(2.0 * math.pi / 3.0), math.sin(2.0 * math.pi / 3.0))
    for j in range(36):
        assert outer[(j + 12) % 36] == pytest.approx(turn * outer[j], abs=1e-9)


def test_table1_rows(run_data: str) -> None:
    path = os.path.join(run_data, "table1_default.csv")
    assert main(["table1", "--output", path]) == 0
    rows = {(float(r["R"]), float(r["d"])): r for r in read_csv_rows(path)}
    assert float(rows[(0.5, 0.1)]["epsilon"]) == pytest.approx(0.3474, abs=1e-4)
    assert float(rows[(0.5, 0.1)]["delta_max"]) == pytest.approx(0.0350, abs=2e-3)
    assert float(rows[(8.0, 1.0)]["epsilon"]) == pytest.approx(0.8003, abs=1e-4)
    assert float(rows[(8.0, 1.0)]["delta_max"]) == pytest.approx(0.0288, abs=2e-3)
