"""End-to-end tests for the command-line interface.

Every invocation goes through main(argv) in-process (exit codes 0/1/2,
stdout/stderr capture); one test exercises the installed console script.
Reruns of the same invocation must be byte-identical.
"""

import contextlib
import io
import json
import math
import re
import shutil
import subprocess

import numpy as np
import pytest

from hele_homog import barriers
from hele_homog.cli import main


def run_cli(argv):
    out, err = io.StringIO(), io.StringIO()
    with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


def parse_csv(text):
    lines = text.strip().splitlines()
    header = lines[0].split(",")
    rows = np.array([[float(v) for v in line.split(",")] for line in lines[1:]])
    return header, rows


SUPERBARRIER_PASS = [
    "barrier", "verify", "--kind", "superbarrier", "--n", "2", "--M", "1.2",
    "--mu", "1", "--chi0", "1", "--kappa", "0.01", "--t", "-0.1",
    "--eps", "1", "--samples", "32", "--medium", "1", "--c", "1e-6",
]


# ---------------------------------------------------------------------------
# medium check
# ---------------------------------------------------------------------------


class TestMediumCheck:
    def test_expression_report(self):
        code, out, err = run_cli(
            ["medium", "check", "--expr", "sin(pi*(x - t))^2 + 1"])
        assert code == 0
        data = json.loads(out)
        assert data["dim"] == 1
        assert data["m"] == pytest.approx(1.0, abs=1e-9)
        assert data["M"] == pytest.approx(2.0, abs=1e-9)
        assert data["L"] > 0
        assert data["resolution"] == 64
        assert data["periodicity_trials"] == 32
        assert data["periodicity_max_deviation"] <= 1e-9

    def test_builtin_name(self):
        code, out, _ = run_cli(["medium", "check", "--medium", "builtin:pinning"])
        assert code == 0
        assert json.loads(out)["dim"] == 1

    def test_expr_and_medium_together_rejected(self):
        code, _, err = run_cli(
            ["medium", "check", "--expr", "1", "--medium", "builtin:pinning"])
        assert code == 1
        assert "not both" in err

    def test_needs_some_medium(self):
        code, _, err = run_cli(["medium", "check"])
        assert code == 1
        assert err.startswith("error:")

    def test_out_file(self, tmp_path):
        path = tmp_path / "report.json"
        code, out, _ = run_cli(
            ["medium", "check", "--expr", "2", "--out", str(path)])
        assert code == 0
        assert out == ""
        assert json.loads(path.read_text())["m"] == pytest.approx(2.0)

    def test_medium_file_round_trip(self, tmp_path):
        path = tmp_path / "medium.json"
        path.write_text(json.dumps(
            {"version": 1, "expr": "1 + 0.5*cos(2*pi*x)^2", "dim": 1}))
        code, out, _ = run_cli(["medium", "check", "--medium", str(path)])
        assert code == 0
        data = json.loads(out)
        assert data["m"] == pytest.approx(1.0, abs=1e-9)
        assert data["M"] == pytest.approx(1.5, abs=1e-9)

    @pytest.mark.parametrize(
        "payload, message",
        [
            ({"version": 1, "expr": "1", "extra": 2}, "unknown keys"),
            ({"version": 2, "expr": "1"}, "version"),
            ({"version": 1}, "missing"),
            ({"version": 1, "expr": "1", "dim": "two"}, "integer"),
        ],
    )
    def test_medium_file_shape_errors(self, tmp_path, payload, message):
        path = tmp_path / "medium.json"
        path.write_text(json.dumps(payload))
        code, _, err = run_cli(["medium", "check", "--medium", str(path)])
        assert code == 1
        assert message in err

    def test_medium_file_invalid_json(self, tmp_path):
        path = tmp_path / "medium.json"
        path.write_text("{not json")
        code, _, err = run_cli(["medium", "check", "--medium", str(path)])
        assert code == 1
        assert "not valid JSON" in err

    def test_medium_file_non_object(self, tmp_path):
        path = tmp_path / "medium.json"
        path.write_text("[1, 2]")
        code, _, err = run_cli(["medium", "check", "--medium", str(path)])
        assert code == 1
        assert "JSON object" in err

    def test_garbled_env_seed_rejected(self, monkeypatch):
        monkeypatch.setenv("HELE_HOMOG_SEED", "abc")
        code, _, err = run_cli(["medium", "check", "--expr", "1"])
        assert code == 1
        assert "HELE_HOMOG_SEED" in err

    def test_seed_flag_overrides_env(self, monkeypatch):
        monkeypatch.setenv("HELE_HOMOG_SEED", "abc")
        code, _, _ = run_cli(["--seed", "3", "medium", "check", "--expr", "1"])
        assert code == 0


# ---------------------------------------------------------------------------
# rq curve / obstacle / candidates
# ---------------------------------------------------------------------------


class TestRqCurve:
    ARGS = ["rq", "curve", "--medium", "builtin:static_sin",
            "--qmin", "0.5", "--qmax", "1.0", "--samples", "3",
            "--T", "10", "--dt", "0.05"]

    def test_csv_units_and_values(self, tmp_path):
        csv_path = tmp_path / "curve.csv"
        svg_path = tmp_path / "curve.svg"
        code, out, _ = run_cli(
            self.ARGS + ["--out", str(csv_path), "--svg", str(svg_path)])
        assert code == 0
        assert out == ""
        header, rows = parse_csv(csv_path.read_text())
        assert header == [
            "q (gradient magnitude; dimensionless)",
            "r_hat (front speed; length per unit time)",
            "err (speed error bound 1/T; length per unit time)",
        ]
        assert rows.shape == (3, 3)
        np.testing.assert_allclose(rows[:, 0], [0.5, 0.75, 1.0])
        # medium averages to speed sqrt(2) q; T = 10 allows a 0.1 error bound
        np.testing.assert_allclose(rows[:, 1], math.sqrt(2) * rows[:, 0],
                                   atol=0.15)
        np.testing.assert_allclose(rows[:, 2], 0.1)

        svg = svg_path.read_text()
        assert svg.startswith("<svg")
        assert svg.rstrip().endswith("</svg>")
        assert "<polyline" in svg
        assert ">q</text>" in svg and ">r_hat</text>" in svg

    def test_jobs_do_not_change_output(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(self.ARGS + ["--jobs", "1", "--out", str(a)])[0] == 0
        assert run_cli(self.ARGS + ["--jobs", "3", "--out", str(b)])[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_rerun_is_byte_identical(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert run_cli(self.ARGS + ["--out", str(a)])[0] == 0
        assert run_cli(self.ARGS + ["--out", str(b)])[0] == 0
        assert a.read_bytes() == b.read_bytes()

    @pytest.mark.parametrize(
        "patch, message",
        [
            (["--qmin", "1.0", "--qmax", "0.5"], "qmin < qmax"),
            (["--samples", "1"], "samples"),
            (["--T", "5"], "T must be >= 10"),
        ],
    )
    def test_validation(self, patch, message):
        args = list(self.ARGS)
        for i in range(0, len(patch), 2):
            j = args.index(patch[i])
            args[j + 1] = patch[i + 1]
        code, _, err = run_cli(args)
        assert code == 1
        assert message in err


class TestRqObstacle:
    def test_super_side_traces_detachment(self, tmp_path):
        path = tmp_path / "obstacle.csv"
        code, _, _ = run_cli(
            ["rq", "obstacle", "--medium", "builtin:pinning", "--q", "1.0",
             "--r", "1.0", "--eps", "0.1", "--side", "super", "--T", "1",
             "--out", str(path)])
        assert code == 0
        header, rows = parse_csv(path.read_text())
        assert header[0] == "t (time units)"
        assert "front" in header[1] and "length units" in header[1]
        assert "phi (running max detachment; length units)" == header[2]
        assert np.all(np.isfinite(rows))
        assert np.all(np.diff(rows[:, 0]) > 0)
        phi = rows[:, 2]
        assert phi[0] >= 0.0
        assert np.all(np.diff(phi) >= 0)

    def test_sub_side_runs(self):
        code, out, _ = run_cli(
            ["rq", "obstacle", "--medium", "builtin:pinning", "--q", "1.0",
             "--r", "1.0", "--eps", "0.1", "--side", "sub", "--T", "1"])
        assert code == 0
        assert out.splitlines()[0].startswith("t (")

    def test_invalid_side_rejected(self):
        code, _, err = run_cli(
            ["rq", "obstacle", "--medium", "builtin:pinning", "--q", "1.0",
             "--r", "1.0", "--eps", "0.1", "--side", "both"])
        assert code == 1
        assert "invalid choice" in err


class TestRqCandidates:
    def test_two_sided_estimates(self):
        code, out, _ = run_cli(
            ["rq", "candidates", "--medium", "builtin:pinning", "--q", "0.75",
             "--eps", "0.1,0.05", "--T", "2"])
        assert code == 0
        match = re.fullmatch(
            r"r_lower = (\S+)\nr_upper = (\S+)\n", out)
        assert match is not None
        lower, upper = float(match.group(1)), float(match.group(2))
        # q = 0.75 sits on the pinned plateau where the speed locks to 1
        assert lower == pytest.approx(1.0, abs=0.1)
        assert upper == pytest.approx(1.0, abs=0.1)

    def test_bad_eps_list(self):
        code, _, err = run_cli(
            ["rq", "candidates", "--medium", "builtin:pinning", "--q", "0.75",
             "--eps", "abc"])
        assert code == 1
        assert "comma-separated" in err


# ---------------------------------------------------------------------------
# timescale eval
# ---------------------------------------------------------------------------


class TestTimescaleEval:
    def test_theta_is_identity_without_shift(self):
        code, out, _ = run_cli(
            ["timescale", "eval", "--kind", "theta", "--gamma", "2",
             "--t", "0.7"])
        assert code == 0
        assert float(out) == pytest.approx(0.7, abs=1e-12)

    @pytest.mark.parametrize("kind", ["sub", "super"])
    def test_rescalings_are_identity_without_shift(self, kind):
        code, out, _ = run_cli(
            ["timescale", "eval", "--kind", kind, "--alpha", "1",
             "--gamma", "1.5", "--t", "0.3"])
        assert code == 0
        assert float(out) == pytest.approx(0.3, abs=1e-12)

    def test_theta_starts_at_the_shift(self):
        code, out, _ = run_cli(
            ["timescale", "eval", "--kind", "theta", "--gamma", "1",
             "--lambda", "0.2", "--t", "0"])
        assert code == 0
        assert float(out) == pytest.approx(0.2, abs=1e-12)

    def test_blowup_reported_as_validation_failure(self):
        code, _, err = run_cli(
            ["timescale", "eval", "--kind", "super", "--alpha", "1.2",
             "--gamma", "1", "--lambda", "0.2", "--t", "2"])
        assert code == 1
        assert "blown up" in err


# ---------------------------------------------------------------------------
# barrier verify
# ---------------------------------------------------------------------------


class TestBarrierVerify:
    def test_expanding_reports_tiny_residual(self):
        code, out, _ = run_cli(
            ["barrier", "verify", "--kind", "expanding", "--n", "2",
             "--m", "1", "--K", "1", "--A", "0.5", "--t", "1.0"])
        assert code == 0
        data = json.loads(out)
        assert data["kind"] == "expanding"
        assert data["rho"] > 0
        assert data["alpha"] > 0
        assert abs(data["residual"]) <= 1e-10

    def test_contracting_matches_library_radius(self):
        code, out, _ = run_cli(
            ["barrier", "verify", "--kind", "contracting", "--n", "2",
             "--M", "1", "--mu", "1", "--chi0", "-0.3", "--t", "0.5"])
        assert code == 0
        data = json.loads(out)
        expected = barriers.contracting_radius(
            n=2, M=1.0, mu=1.0, Kfun=lambda s: -0.3 * s, t=0.5)
        assert data["rho"] == pytest.approx(expected, abs=1e-12)
        assert data["residual"] <= 1e-10

    def test_superbarrier_passes(self):
        code, out, _ = run_cli(SUPERBARRIER_PASS)
        assert code == 0
        data = json.loads(out)
        assert data["passed"] is True
        assert all(v > 0 for v in data["margins"].values())
        assert data["interior_count"] == 32
        assert data["front_count"] == 8
        assert 0 < data["rho"] < 1

    def test_superbarrier_failure_exits_two(self):
        args = [v if v != "1e-6" else "0.05" for v in SUPERBARRIER_PASS]
        code, out, _ = run_cli(args)
        assert code == 2
        data = json.loads(out)
        assert data["passed"] is False
        assert min(data["margins"].values()) < 0

    def test_superbarrier_needs_matching_medium_dimension(self):
        code, _, err = run_cli(SUPERBARRIER_PASS + ["--dim", "1"])
        assert code == 1
        assert "dim-2" in err


# ---------------------------------------------------------------------------
# geometry report
# ---------------------------------------------------------------------------


class TestGeometryReport:
    def test_reference_instance_values(self):
        code, out, _ = run_cli(
            ["geometry", "report", "--q", "0,-1", "--r", "1",
             "--m", "1", "--M", "2"])
        assert code == 0
        data = json.loads(out)
        assert data["theta"] == pytest.approx(math.pi / 4, abs=1e-12)
        assert data["theta_plus"] == pytest.approx(math.pi / 4, abs=1e-12)
        assert data["phi_minus"] == pytest.approx(math.pi / 3, abs=1e-12)
        assert data["theta_minus"] == pytest.approx(5 * math.pi / 12, abs=1e-12)
        assert data["rV_plus"] == pytest.approx(2.0, abs=1e-12)
        assert data["rV_minus"] == pytest.approx(math.sqrt(3) - 1, abs=1e-12)

    def test_bad_vector_rejected(self):
        code, _, err = run_cli(
            ["geometry", "report", "--q", "0,abc", "--r", "1",
             "--m", "1", "--M", "2"])
        assert code == 1
        assert "comma-separated" in err

    def test_zero_vector_rejected(self):
        code, _, err = run_cli(
            ["geometry", "report", "--q", "0,0", "--r", "1",
             "--m", "1", "--M", "2"])
        assert code == 1
        assert "nonzero" in err


# ---------------------------------------------------------------------------
# sim2d run / converge
# ---------------------------------------------------------------------------


RUN_ARGS = ["sim2d", "run", "--medium", "1", "--dim", "2", "--eps", "0.5",
            "--psi0", "1", "--T", "0.2", "--h0", "1", "--Lx", "4",
            "--Ly", "1", "--nx", "16", "--ny", "8"]


class TestSim2dRun:
    def test_outputs_and_growth_law(self, tmp_path):
        front = tmp_path / "front.csv"
        summary = tmp_path / "summary.json"
        code, out, _ = run_cli(
            RUN_ARGS + ["--out", str(front), "--summary", str(summary)])
        assert code == 0
        assert out == ""
        header, rows = parse_csv(front.read_text())
        assert header == [
            "t (time units)",
            "y (tangential position; length units)",
            "h (front depth; length units)",
        ]
        data = json.loads(summary.read_text())
        # constant medium: mean depth follows sqrt(h0^2 + 2 psi0 t)
        assert data["final_mean_depth"] == pytest.approx(
            math.sqrt(1.0 + 2 * 0.2), rel=5e-3)
        assert data["u_min"] >= -1e-12
        assert data["u_max"] <= 1.0 + 1e-12
        assert data["front_speed_fit"] > 0
        assert data["saved_fronts"] == len(set(rows[:, 0]))
        assert rows.shape[0] == data["saved_fronts"] * 8

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({
            "version": 1, "medium": "1", "dim": 2, "eps": 0.5, "psi0": 1.0,
            "T": 0.2, "h0": 1.0, "Lx": 4.0, "Ly": 1.0, "nx": 16, "ny": 8,
        }))
        summary = tmp_path / "summary.json"
        out_csv = tmp_path / "front.csv"
        code, _, _ = run_cli(
            ["sim2d", "run", "--config", str(cfg), "--T", "0.1",
             "--out", str(out_csv), "--summary", str(summary)])
        assert code == 0
        assert json.loads(summary.read_text())["T"] == 0.1

    def test_config_unknown_key(self, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"version": 1, "medium": "1", "typo": 3}))
        code, _, err = run_cli(["sim2d", "run", "--config", str(cfg)])
        assert code == 1
        assert "unknown keys" in err and "typo" in err

    def test_config_requires_version(self, tmp_path):
        cfg = tmp_path / "sim.json"
        cfg.write_text(json.dumps({"medium": "1"}))
        code, _, err = run_cli(["sim2d", "run", "--config", str(cfg)])
        assert code == 1
        assert "version" in err

    def test_medium_is_required(self):
        code, _, err = run_cli(["sim2d", "run", "--T", "0.1"])
        assert code == 1
        assert "needs a medium" in err

    def test_rerun_is_byte_identical(self, tmp_path):
        files = []
        for tag in ("a", "b"):
            front = tmp_path / f"front_{tag}.csv"
            summary = tmp_path / f"summary_{tag}.json"
            assert run_cli(RUN_ARGS + ["--out", str(front),
                                       "--summary", str(summary)])[0] == 0
            files.append((front, summary))
        assert files[0][0].read_bytes() == files[1][0].read_bytes()
        assert files[0][1].read_bytes() == files[1][1].read_bytes()

    def test_numerical_failure_exits_two(self):
        code, _, err = run_cli(
            ["sim2d", "run", "--medium", "1", "--dim", "2", "--eps", "0.5",
             "--psi0", "1", "--T", "50", "--h0", "0.5", "--Lx", "1.2",
             "--Ly", "1", "--nx", "16", "--ny", "8"])
        assert code == 2
        assert err.startswith("numerical failure:")


class TestSim2dConverge:
    BASE = ["sim2d", "converge", "--medium", "1", "--dim", "2",
            "--psi0", "0.3", "--T", "0.05", "--h0", "0.3", "--Lx", "0.8",
            "--Ly", "0.4", "--nx", "8", "--ny", "8"]

    def test_constant_medium_study(self):
        code, out, _ = run_cli(self.BASE + ["--eps", "0.8,0.6,0.4"])
        assert code == 0
        data = json.loads(out)
        assert data["eps"] == [0.8, 0.6, 0.4]
        assert len(data["pairs"]) == 2
        assert data["spacetime_distances_decreasing"] is True
        assert len(data["speeds"]) == 3

    def test_unresolved_scale_rejected(self):
        code, _, err = run_cli(self.BASE + ["--eps", "0.4,0.2,0.1"])
        assert code == 1
        assert "resolution check" in err

    def test_bad_eps_list(self):
        code, _, err = run_cli(self.BASE + ["--eps", "abc"])
        assert code == 1
        assert "comma-separated" in err


# ---------------------------------------------------------------------------
# top level behavior
# ---------------------------------------------------------------------------


class TestTopLevel:
    def test_no_arguments_is_usage_failure(self):
        code, _, err = run_cli([])
        assert code == 1
        assert err.startswith("usage:")
        assert "error:" in err

    def test_help_exits_zero(self):
        code, out, _ = run_cli(["--help"])
        assert code == 0

    def test_unknown_group_rejected(self):
        code, _, err = run_cli(["frobnicate"])
        assert code == 1
        assert "invalid choice" in err

    def test_console_script_installed(self):
        exe = shutil.which("hele-homog")
        assert exe is not None
        proc = subprocess.run(
            [exe, "timescale", "eval", "--kind", "theta", "--gamma", "2",
             "--t", "0.7"],
            capture_output=True, text=True, timeout=60)
        assert proc.returncode == 0
        assert float(proc.stdout) == pytest.approx(0.7, abs=1e-12)


class TestSeedPlumbing:
    def test_same_seed_reproduces_sampling(self):
        _, out1, _ = run_cli(["--seed", "7"] + SUPERBARRIER_PASS)
        _, out2, _ = run_cli(["--seed", "7"] + SUPERBARRIER_PASS)
        assert out1 == out2

    def test_env_seed_matches_flag(self, monkeypatch):
        _, flagged, _ = run_cli(["--seed", "7"] + SUPERBARRIER_PASS)
        monkeypatch.setenv("HELE_HOMOG_SEED", "7")
        _, via_env, _ = run_cli(SUPERBARRIER_PASS)
        assert via_env == flagged
