import csv
import io
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from casimirkick import analytic
from casimirkick.cli import main, simulate_report
from casimirkick.svg import emit_svg
from casimirkick.sweep import run_sweep
from conftest import MINIMAL, make_config

OMEGA = 6.283185307179586e9
V0 = 1e7


def rows_of(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(io.StringIO("\n".join(body))))


def flight_for(theta):
    return theta * V0 / OMEGA


def test_analytic_resonant_null(write_config, capsys):
    path = write_config(MINIMAL.replace("flight_length = 0.01", f"flight_length = {flight_for(math.pi)!r}"))
    assert main(["analytic", "--config", path]) == 0
    (row,) = rows_of(capsys.readouterr().out)
    assert abs(float(row["delta_k"])) <= 1e-12 * float(row["eps_kick"])


def test_analytic_deterministic(write_config, tmp_path):
    path = write_config(MINIMAL)
    out1, out2 = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["analytic", "--config", path, "--out", str(out1)]) == 0
    assert main(["analytic", "--config", path, "--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert out1.read_text().startswith("# [cavity]")


def test_simulate_resonant_null(write_config, capsys):
    path = write_config(MINIMAL.replace("flight_length = 0.01", f"flight_length = {flight_for(math.pi)!r}"))
    assert main(["simulate", "--config", path]) == 0
    out = capsys.readouterr().out
    assert "within_bound = True" in out


def test_simulate_json_output(write_config, tmp_path):
    path = write_config(MINIMAL)
    dest = tmp_path / "sim.json"
    assert main(["simulate", "--config", path, "--out", str(dest)]) == 0
    data = json.loads(dest.read_text())
    assert data["within_bound"] is True and data["flags"]["rwa"] is True


def test_simulate_near_zero_flight_keeps_initial_energy():
    cfg = make_config(base=MINIMAL.replace("flight_length = 0.01", "flight_length = 1e-12"))
    rep = simulate_report(cfg)
    g = cfg.groups
    initial = g.k0 + 0.5 * g.recoil * 0.25 * g.hbar_omega
    assert rep["mean_k"] == pytest.approx(initial, rel=1e-12)


def test_simulate_backaction_matches_canonical():
    # same relative measure as the approximation audit: |d mean_k| / mean_k
    base = make_config()
    cfg_ba = make_config("[model]\nbackaction = true\n")
    assert cfg_ba.groups.g_over < 1e-3
    a, b = simulate_report(base), simulate_report(cfg_ba)
    assert abs(a["mean_k"] - b["mean_k"]) / a["mean_k"] <= a["deviation_bound"]


def test_validate_default_passes(capsys):
    assert main(["validate", "--config", "configs/default.ini"]) == 0
    assert "ALL PASS" in capsys.readouterr().out


def test_validate_loose_tol_fails(capsys):
    assert main(["validate", "--config", "configs/default.ini", "--tol", "1e-4"]) == 1
    out = capsys.readouterr().out
    assert "FAIL symplectic_integrity" in out and "bound=1e-07" in out


def test_validate_small_fock_dim_fails(tmp_path, capsys):
    text = open("configs/default.ini").read() + "\n[fock]\ndim = 10\n"
    path = tmp_path / "small.ini"
    path.write_text(text)
    assert main(["validate", "--config", str(path)]) == 1
    assert "truncation failure" in capsys.readouterr().out


@pytest.mark.parametrize(
    "text, needle",
    [
        (MINIMAL.replace("volume = 1e-6", "volume = -1e-6"), "volume"),
        (MINIMAL.replace("volume = 1e-6", "volume = 1e-6\nlamda = 1"), "lambda_sq"),
    ],
)
def test_input_errors_exit_two(write_config, caplog, text, needle):
    assert main(["analytic", "--config", write_config(text)]) == 2
    assert needle in caplog.text


def test_bad_tol_and_workers_exit_two(write_config):
    path = write_config(MINIMAL)
    assert main(["simulate", "--config", path, "--tol", "1e-2"]) == 2
    assert main(["analytic", "--config", path, "--workers", "0"]) == 2
    assert main(["sweep", "--config", path]) == 2


def test_sweep_two_by_two(write_config, capsys):
    path = write_config(MINIMAL + "[sweep]\naxis1 = theta, 0.5, 1.5, 2\naxis2 = r, 0.0, 0.1, 2\n")
    assert main(["sweep", "--config", path]) == 0
    text = capsys.readouterr().out
    rows = rows_of(text)
    assert len(rows) == 4
    header = [line for line in text.splitlines() if not line.startswith("#")][0]
    assert header == "axis1_theta,axis2_r,r,theta,n_th,eps_kick,delta_k,f,dvar_paper,mean_n,snr,error"


def test_sweep_theta_vacuum_law():
    cfg = make_config("[sweep]\naxis1 = theta, 0.0, 12.0, 41\noutputs = delta_k\n")
    for row in run_sweep(cfg):
        assert row["delta_k"] == pytest.approx(row["eps_kick"] * math.sin(row["theta"]) ** 2, rel=1e-12, abs=1e-40)


def test_sweep_thermal_ratio():
    cfg = make_config("[sweep]\naxis1 = n_th, 0.0, 1.0, 2\n")
    cold, hot = run_sweep(cfg)
    assert hot["delta_k"] / cold["delta_k"] == pytest.approx(3.0, rel=1e-14)
    assert hot["snr"] > cold["snr"]


def test_sweep_worker_independence(write_config, tmp_path):
    path = write_config(MINIMAL + "[sweep]\naxis1 = theta, 0.0, 6.0, 7\naxis2 = r, 0.0, 0.2, 5\n")
    outs = []
    for w in (1, 3):
        dest = tmp_path / f"w{w}.csv"
        assert main(["sweep", "--config", path, "--workers", str(w), "--out", str(dest)]) == 0
        outs.append(dest.read_bytes())
    assert outs[0] == outs[1]


def test_sweep_records_row_failures(write_config, capsys):
    # r * theta beyond the closed-form range fails per row, not globally
    path = write_config(MINIMAL + "[sweep]\naxis1 = r, 0.0, 60.0, 2\n")
    assert main(["sweep", "--config", path]) == 0
    rows = rows_of(capsys.readouterr().out)
    assert rows[0]["error"] == "" and rows[1]["error"].startswith("RangeError")
    assert rows[1]["delta_k"] == "nan"


def test_sweep_svg_written(write_config, tmp_path):
    svg = tmp_path / "map.svg"
    path = write_config(MINIMAL + "[sweep]\naxis1 = theta, 0.0, 6.0, 4\naxis2 = r, 0.0, 0.2, 3\n")
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "m.csv"), "--svg", str(svg)]) == 0
    root = ET.fromstring(svg.read_text())
    assert root.tag.endswith("svg")
    texts = " ".join(t.text or "" for t in root.iter() if t.tag.endswith("text"))
    assert "theta [rad]" in texts and "r [-]" in texts and "delta_k [J]" in texts


def _line_rows(values):
    return [{"axis1_theta": float(i), "delta_k": v, "error": ""} for i, v in enumerate(values)]


def test_svg_single_row():
    doc = emit_svg(_line_rows([1.0]), "delta_k", "theta")
    root = ET.fromstring(doc)
    circles = [e for e in root.iter() if e.tag.endswith("circle")]
    assert len(circles) == 1
    assert not [e for e in root.iter() if e.tag.endswith("polyline")]


def test_svg_monotone_polyline():
    doc = emit_svg(_line_rows(list(np.linspace(0, 1, 9) ** 2)), "delta_k", "theta")
    root = ET.fromstring(doc)
    (line,) = [e for e in root.iter() if e.tag.endswith("polyline")]
    pts = [tuple(map(float, p.split(","))) for p in line.get("points").split()]
    xs, ys = zip(*pts)
    assert all(b > a for a, b in zip(xs, xs[1:]))
    # SVG y grows downward, so rising data means falling y
    assert all(b < a for a, b in zip(ys, ys[1:]))


def test_svg_deterministic():
    rows = _line_rows([0.3, 0.1, 0.7])
    assert emit_svg(rows, "delta_k", "theta") == emit_svg(rows, "delta_k", "theta")


def test_svg_skips_failed_rows():
    rows = _line_rows([0.3, math.nan, 0.7])
    root = ET.fromstring(emit_svg(rows, "delta_k", "theta"))
    assert len([e for e in root.iter() if e.tag.endswith("circle")]) == 2


def test_analytic_matches_closed_form(write_config, capsys):
    path = write_config(open("configs/default.ini").read())
    assert main(["analytic", "--config", path]) == 0
    (row,) = rows_of(capsys.readouterr().out)
    expect = analytic.mean_kinetic_shift(float(row["r"]), float(row["theta"]), 0.0, float(row["eps_kick"])).delta_k
    assert float(row["delta_k"]) == expect
