"""End-to-end command-line behavior, including exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

from secrate import cli


@pytest.fixture()
def gains_file(tmp_path):
    path = tmp_path / "gains.json"
    path.write_text(json.dumps({
        "h_sr": 8.0, "h_sd": 1.0, "h_rd": 8.0, "h_se": 1.0, "h_re": [0.5, 0.25],
    }), encoding="utf-8")
    return str(path)


def run(args):
    return cli.main(args)


def test_rate_prints_breakdown(gains_file, capsys):
    rc = run(["rate", "--gains", gains_file, "--p1", "1", "--p2", "8", "--q", "0.5",
              "--c", "0.1", "--a1", "-0.5", "--a2", "-1.0", "--p", "0.9"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) >= {"mi_relay", "mi_state", "mi_main", "mi_eve",
                        "r_tilde", "r_hat", "r_s"}
    assert out["r_s"] == min(out["r_tilde"], out["r_hat"])


def test_rate_rejects_infeasible_point(gains_file, capsys):
    rc = run(["rate", "--gains", gains_file, "--p1", "1", "--p2", "8", "--q", "0",
              "--c", "1", "--a1", "0", "--a2", "0", "--p", "1"])
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_optimize_reports_result(gains_file, capsys):
    rc = run(["optimize", "--gains", gains_file, "--p1", "1.2", "--p2", "8",
              "--q", "0.5", "--grid", "7", "--starts", "2"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["status"] in ("converged", "grid-only")
    assert out["objective"] >= 0.0
    assert out["breakdown"]["r_s"] == out["objective"]


def test_verify_passes(capsys):
    rc = run(["verify", "--draws", "50", "--seed", "4", "--tol", "1e-9"])
    assert rc == 0
    assert capsys.readouterr().out.startswith("PASS")


def test_verify_can_fail(capsys):
    rc = run(["verify", "--draws", "50", "--seed", "4", "--tol", "1e-18"])
    assert rc == 1
    assert capsys.readouterr().out.startswith("FAIL")


def test_scenario_writes_csv(tmp_path, capsys):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text(
        "[sweep]\n"
        'variable = "relay_x"\nstart = 0.5\nstop = 0.6\nstep = 0.05\n'
        "[fixed]\n"
        "q_values = [0.0, 0.5]\n"
        "[fixed.opt]\n"
        "grid_steps = [5, 5, 5, 3]\nmultistarts = 1\n",
        encoding="utf-8",
    )
    out = tmp_path / "sweep.csv"
    rc = run(["scenario", "--config", str(cfg), "--out", str(out)])
    assert rc == 0
    lines = out.read_text(encoding="utf-8").strip().splitlines()
    assert lines[0] == "relay_x,q=0,q=0.5"
    assert len(lines) == 4
    assert (tmp_path / "sweep.csv.json").exists()


def test_scenario_p1_override(tmp_path):
    cfg = tmp_path / "cfg.toml"
    cfg.write_text(
        "[sweep]\n"
        'variable = "line_t"\nstart = 0.8\nstop = 0.8\nstep = 0.05\n'
        "[fixed.opt]\ngrid_steps = [5, 5, 5, 3]\nmultistarts = 1\n",
        encoding="utf-8",
    )
    out = tmp_path / "line.csv"
    rc = run(["scenario", "--config", str(cfg), "--out", str(out), "--p1", "4"])
    assert rc == 0
    side = json.loads((tmp_path / "line.csv.json").read_text())
    assert side["scenario"]["p1"] == 4.0


def test_dmc_evaluates_pmf(tmp_path, capsys):
    input_law = np.zeros((1, 2, 2, 2, 2))
    for u1 in range(2):
        for u2 in range(2):
            input_law[0, u1, u2, u1, u2] = 0.25
    channel = np.zeros((2, 2, 1, 2, 2, 1))
    for x1 in range(2):
        for x2 in range(2):
            channel[x1, x2, 0, x1, x1 ^ x2, 0] = 1.0
    pmf_path = tmp_path / "pmf.json"
    pmf_path.write_text(json.dumps({
        "state": [1.0],
        "input_law": input_law.tolist(),
        "channel": channel.tolist(),
    }), encoding="utf-8")
    rc = run(["dmc", "--pmf", str(pmf_path)])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["r_s"] == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------------------
# exit codes
# ---------------------------------------------------------------------------

def test_unknown_flag_shows_usage_and_exits_1(capsys):
    rc = run(["rate", "--bogus"])
    assert rc == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand_exits_1(capsys):
    assert run(["frobnicate"]) == 1


def test_help_exits_0(capsys):
    assert run(["--help"]) == 0
    assert "secrate" in capsys.readouterr().out


def test_missing_gains_file_exits_1(capsys):
    rc = run(["rate", "--gains", "/does/not/exist.json", "--p1", "1", "--p2", "8",
              "--q", "0", "--c", "0", "--a1", "0", "--a2", "0", "--p", "1"])
    assert rc == 1


def test_malformed_gains_file_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"h_sr": 1.0}', encoding="utf-8")
    rc = run(["rate", "--gains", str(bad), "--p1", "1", "--p2", "8", "--q", "0",
              "--c", "0", "--a1", "0", "--a2", "0", "--p", "0.5"])
    assert rc == 1
    assert "missing" in capsys.readouterr().err


def test_scenario_without_name_or_config_exits_1(tmp_path, capsys):
    assert run(["scenario", "--out", str(tmp_path / "x.csv")]) == 1


def test_internal_error_exits_2(gains_file, capsys, monkeypatch):
    def boom(*a, **k):
        raise RuntimeError("synthetic failure")

    monkeypatch.setattr(cli, "rates", boom)
    rc = run(["rate", "--gains", gains_file, "--p1", "1", "--p2", "8", "--q", "0",
              "--c", "0", "--a1", "0", "--a2", "0", "--p", "0.5"])
    assert rc == 2
    assert "internal error" in capsys.readouterr().err


def test_installed_entry_point_reports_version():
    proc = subprocess.run([sys.executable, "-m", "secrate.cli", "--version"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "secrate" in proc.stdout
