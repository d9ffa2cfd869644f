"""Command line behavior: exit codes, formats, determinism."""

import json
import subprocess
import sys

import pytest

from renormlab.cli import main

FAST = ["--depth", "3", "--grid", "48", "--tol", "1e-8"]


# ---------------------------------------------------------------- failures


def test_usage_errors_exit_1():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["orbit", "--alpha", "2"])  # missing -k
    assert exc.value.code == 1
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 1


def test_validation_errors_exit_1(capsys):
    assert main(["fixed-point", "--alpha", "0.9"]) == 1
    assert "alpha must exceed 1" in capsys.readouterr().err

    assert main(["fixed-point"]) == 1
    assert "--alpha is required" in capsys.readouterr().err


def test_nonconvergence_exits_2_with_trace(capsys):
    code = main(["fixed-point", "--alpha", "2", *FAST, "--max-iter", "1"])
    assert code == 2
    err = capsys.readouterr().err
    assert "residual trace" in err


def test_spectrum_requires_readable_report(tmp_path, capsys):
    missing = tmp_path / "nowhere.json"
    assert main(["spectrum", "--alpha", "2", "--in", str(missing)]) == 1


# ------------------------------------------------------------ fixed point


@pytest.fixture(scope="module")
def report_file(tmp_path_factory):
    out = tmp_path_factory.mktemp("cli") / "report.json"
    code = main(["fixed-point", "--alpha", "2", *FAST, "--out", str(out)])
    assert code == 0
    return out


def test_fixed_point_report_content(report_file):
    data = json.loads(report_file.read_text())
    assert data["alpha"] == 2.0
    assert data["depth"] == 3
    assert abs(data["t_star"] - 0.886659) < 1e-4
    assert data["residual_geometry"] <= 1e-8
    assert data["residual_peak"] <= 1e-7


def test_fixed_point_output_is_deterministic(report_file, tmp_path):
    again = tmp_path / "again.json"
    assert main(["fixed-point", "--alpha", "2", *FAST, "--out", str(again)]) == 0
    assert again.read_bytes() == report_file.read_bytes()


def test_orbit_length_one_matches_fixed_point(report_file, tmp_path):
    out = tmp_path / "orbit.json"
    assert main(["orbit", "--alpha", "2", *FAST, "-k", "1", "--out", str(out)]) == 0
    reports = json.loads(out.read_text())
    assert isinstance(reports, list) and len(reports) == 1
    t_fp = json.loads(report_file.read_text())["t_star"]
    assert abs(reports[0]["t_star"] - t_fp) < 1e-7


def test_alpha_sweep_writes_per_alpha_files(tmp_path):
    out = tmp_path / "sweep.json"
    code = main(["fixed-point", "--alpha-sweep", "2,2.5", *FAST, "--out", str(out)])
    assert code == 0
    for a in ("2", "2.5"):
        path = tmp_path / f"sweep-alpha{a}.json"
        data = json.loads(path.read_text())
        assert data["alpha"] == float(a)
        assert data["residual_geometry"] <= 1e-8


def test_alpha_sweep_needs_out():
    assert main(["fixed-point", "--alpha-sweep", "2,2.5", *FAST]) == 1


# ---------------------------------------------------------------- spectrum


def test_spectrum_round_trip(report_file, capsys):
    assert main(["spectrum", "--alpha", "2", "--in", str(report_file)]) == 0
    first = capsys.readouterr().out
    payload = json.loads(first)
    assert payload["alpha"] == 2.0
    assert 4.4 < payload["delta"] < 4.9
    assert len(payload["scaling_ratios"]) == 6
    for r in payload["scaling_ratios"]:
        assert abs(r - 0.3995) < 5e-3
    stored = json.loads(report_file.read_text())
    assert payload["residual_geometry"] == stored["residual_geometry"]
    assert payload["residual_peak"] == stored["residual_peak"]

    assert main(["spectrum", "--alpha", "2", "--in", str(report_file)]) == 0
    assert capsys.readouterr().out == first


# ------------------------------------------------------------------ window


def test_window_csv(capsys):
    assert main(["window", "--alpha", "2", "--depth", "2", "--grid", "48"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0].startswith("# window t_min=")
    head = dict(part.split("=") for part in lines[0][2:].split() if "=" in part)
    assert abs(float(head["t_min"]) - 0.5) < 1e-6
    assert abs(float(head["t_max"]) - 0.9196433776) < 1e-6
    assert lines[1] == "t,rho"
    rows = [line.split(",") for line in lines[2:]]
    assert len(rows) >= 30
    for t_str, rho_str in rows:
        assert 0.0 <= float(rho_str) <= 1.0
        assert 0.5 <= float(t_str) <= float(head["t_max"]) + 1e-12


# ----------------------------------------------------------------- cascade


def test_cascade_csv(capsys):
    assert main(["cascade", "--alpha", "2", "-m", "4"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "k,t_k,delta_k"
    assert lines[1] == "0,0.5,"
    assert abs(float(lines[2].split(",")[1]) - 0.809016994) < 1e-8
    assert len(lines) == 6


# -------------------------------------------------------------- diagnostics


def test_orbit_diagnostics_csv_deterministic(capsys):
    argv = ["orbit-diagnostics", "--alpha", "2", "--depth", "2", "--grid", "48",
            "--steps", "3", "--seed", "1"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    lines = first.strip().split("\n")
    assert lines[0] == "step,peak,distance,kappa"
    assert len(lines) == 4
    for i, line in enumerate(lines[1:]):
        step, peak, dist, kappa = line.split(",")
        assert int(step) == i
        assert 0.5 < float(peak) < 1.0
        assert float(dist) >= 0.0
        assert 0.0 < float(kappa) < 1.0
    assert main(argv) == 0
    assert capsys.readouterr().out == first


# ------------------------------------------------------------- entry point


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "renormlab.cli", "cascade", "--alpha", "2", "-m", "1"],
        capture_output=True, text=True, timeout=120,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("k,t_k,delta_k")
