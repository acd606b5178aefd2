import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ginibre_extremes import cli
from ginibre_extremes.errors import NumericalFailure


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


class TestLimitCdf:
    def test_gumbel_at_zero(self, capsys):
        code, out, _ = run(["limit-cdf", "--law", "gumbel", "--x", "0"], capsys)
        assert code == 0
        header, row = out.strip().splitlines()
        assert header == "x,cdf,tail_bound"
        x, cdf, _ = row.split(",")
        assert float(x) == 0.0
        assert float(cdf) == pytest.approx(0.3678794412, abs=1e-10)

    def test_phi_alpha_grid(self, tmp_path, capsys):
        out = tmp_path / "phi.csv"
        argv = ["limit-cdf", "--law", "phi-alpha", "--alpha", "1", "--x-min", "-5",
                "--x-max", "10", "--step", "0.01", "--out", str(out), "--gnuplot"]
        assert run(argv, capsys)[0] == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 1 + 1501
        cdf = np.array([float(l.split(",")[1]) for l in lines[1:]])
        assert np.all(np.diff(cdf) >= 0)
        first = out.read_bytes()
        assert run(argv, capsys)[0] == 0
        assert out.read_bytes() == first
        meta = json.loads(out.with_suffix(".meta.json").read_text())
        assert meta["config"]["alpha"] == 1.0 and meta["config"]["law"] == "phi-alpha"
        assert "phi.csv" in out.with_suffix(".gp").read_text()

    def test_json_format(self, capsys):
        code, out, _ = run(["limit-cdf", "--law", "normal", "--x", "0", "1", "--format", "json"], capsys)
        d = json.loads(out)
        assert code == 0 and [r["x"] for r in d["rows"]] == [0.0, 1.0]
        assert d["rows"][0]["cdf"] == 0.5

    def test_missing_alpha(self, capsys):
        code, _, err = run(["limit-cdf", "--law", "phi-alpha", "--x", "0"], capsys)
        assert code == 1 and "alpha" in err

    def test_bad_alpha(self, capsys):
        assert run(["limit-cdf", "--law", "phi-alpha", "--alpha", "-1", "--x", "0"], capsys)[0] == 1


class TestRate:
    def test_infinite(self, capsys):
        code, out, _ = run(["rate", "--n", "100000", "--k", "1", "--regime", "infinite",
                            "--metric", "be"], capsys)
        d = json.loads(out)
        la = math.log(1e5)
        assert code == 0
        assert d["be"]["theoretical"] == pytest.approx(math.log(la) ** 2 / (2 * math.e * la), rel=1e-15)
        assert d["be"]["theoretical"] == pytest.approx(0.0953, abs=1e-4)
        assert d["config"]["n"] == 100000

    def test_zero_beta_gate(self, capsys):
        code, out, _ = run(["rate", "--regime", "zero", "--beta", "0", "--n", "50",
                            "--k", "10000000"], capsys)
        assert code == 0
        assert json.loads(out)["be"]["components"]["beta_n"] == pytest.approx(0.0125)
        code, _, err = run(["rate", "--regime", "zero", "--beta", "0", "--n", "50", "--k", "1000"], capsys)
        assert code == 1 and "beta" in err

    def test_finite_has_argmax(self, capsys):
        code, out, _ = run(["rate", "--regime", "finite", "--alpha", "1", "--eta", "0", "--n", "64",
                            "--k", "64", "--metric", "both", "--step", "0.05"], capsys)
        d = json.loads(out)
        assert code == 0
        assert "sup_argmax" in d["be"]["components"]
        assert d["w1"]["metric"] == "W1"

    def test_inconsistent_regime(self, capsys):
        assert run(["rate", "--n", "5", "--k", "1", "--regime", "infinite"], capsys)[0] == 1
        assert run(["rate", "--n", "5", "--k", "1", "--regime", "finite"], capsys)[0] == 1


class TestSimulate:
    def test_summary_and_determinism(self, tmp_path, capsys):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        base = ["simulate", "--n", "8", "--k", "512", "--samples", "100000", "--seed", "42",
                "--summary", "--regime", "zero", "--beta", "1"]
        code, out, _ = run(base + ["--out", str(a)], capsys)
        assert code == 0
        rep = json.loads(out)
        assert rep["method"] == "KolmogorovVsLaw"
        assert rep["dkw_radius_99"] == pytest.approx(math.sqrt(math.log(200) / 2e5))
        assert rep["dkw_radius_99"] == pytest.approx(0.00515, abs=5e-6)
        assert rep["metadata"]["root_seed"] == 42
        code, _, _ = run(base + ["--out", str(b), "--threads", "3"], capsys)
        assert code == 0
        assert a.read_bytes() == b.read_bytes()
        side_a = json.loads(a.with_suffix(".json").read_text())
        side_b = json.loads(b.with_suffix(".json").read_text())
        side_a["config"].pop("out"), side_b["config"].pop("out")
        assert side_a == side_b
        assert json.loads(a.with_suffix(".summary.json").read_text()) == rep

    def test_zero_samples(self, capsys):
        code, _, err = run(["simulate", "--n", "3", "--k", "1", "--samples", "0", "--seed", "1"], capsys)
        assert code == 1 and "samples" in err

    def test_budget_refusal(self, tmp_path, capsys):
        code, _, err = run(["simulate", "--n", "100", "--k", "100", "--samples", "1000", "--seed", "1",
                            "--budget", "1e6", "--out", str(tmp_path / "x.csv")], capsys)
        assert code == 1 and "1e+07" in err and "budget" in err

    def test_gnuplot(self, tmp_path, capsys):
        out = tmp_path / "s.csv"
        assert run(["simulate", "--n", "3", "--k", "2", "--samples", "50", "--seed", "1",
                    "--out", str(out), "--gnuplot"], capsys)[0] == 0
        assert "s.csv" in out.with_suffix(".gp").read_text()

    def test_summary_needs_regime(self, capsys):
        assert run(["simulate", "--n", "3", "--k", "1", "--samples", "5", "--seed", "1",
                    "--summary"], capsys)[0] == 1


class TestVerify:
    def test_bounds(self, capsys):
        code, out, err = run(["verify", "bounds"], capsys)
        assert code == 0
        assert json.loads(out)["passed"] is True
        assert "[PASS]" in err

    def test_unknown_suite(self, capsys):
        assert run(["verify", "nope"], capsys)[0] == 1

    def test_failing_suite_exit_code(self, capsys, monkeypatch):
        from ginibre_extremes.suites import Check, SuiteResult

        fake = lambda: SuiteResult("fake", [Check("c", False, 1.0, 0.5, None, {})], 0.0, 0)  # noqa: E731
        monkeypatch.setitem(cli.SUITES, "bounds", fake)
        code, _, err = run(["verify", "bounds"], capsys)
        assert code == 3 and "[FAIL]" in err


class TestOther:
    def test_transition(self, capsys):
        code, out, _ = run(["transition", "--alpha", "1e-4", "1e6"], capsys)
        rows = [l.split(",") for l in out.strip().splitlines()]
        assert code == 0 and rows[0] == ["alpha", "sup_distance", "argmax", "rate", "ratio"]
        assert abs(float(rows[1][4]) - 1) <= 0.05
        assert 1 / 1.5 <= float(rows[2][4]) <= 1.5

    def test_transition_gate(self, capsys):
        assert run(["transition", "--alpha", "1", "--side", "ToGumbel"], capsys)[0] == 1

    def test_exact_cdf(self, capsys):
        code, out, _ = run(["exact-cdf", "--n", "1", "--x", "0"], capsys)
        assert code == 0
        assert out.splitlines()[0] == "x,cdf,gumbel"

    def test_numerical_failure_exit(self, capsys, monkeypatch):
        def boom(args):
            raise NumericalFailure("no convergence")

        monkeypatch.setattr(cli, "cmd_exact_cdf", boom)
        parser = cli.build_parser
        monkeypatch.setattr(
            cli, "build_parser",
            lambda: _with_func(parser(), "exact-cdf", boom),
        )
        assert run(["exact-cdf", "--n", "1", "--x", "0"], capsys)[0] == 2

    def test_no_command(self, capsys):
        assert run([], capsys)[0] == 1

    def test_module_entry_point(self):
        res = subprocess.run([sys.executable, "-m", "ginibre_extremes", "limit-cdf", "--law",
                              "gumbel", "--x", "0"], capture_output=True, text=True, timeout=120)
        assert res.returncode == 0 and "0.36787944117144233" in res.stdout


def _with_func(parser, name, fn):
    sub = next(a for a in parser._actions if a.dest == "command")
    sub.choices[name].set_defaults(func=fn)
    return parser
