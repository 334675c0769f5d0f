"""Command-line pipeline: exit codes, file formats, byte reproducibility."""
import json
import subprocess
import sys

import pytest

from sstl.cli import main
from sstl.space import regular_grid, write_graph

FORMULAS = (
    "phi_spot := (xA <= 0.5) S[1,6] (xA > 0.5)\n"
    "high := xA > 0.5\n"
    "eventually_low := F[0,1] (xA <= 4)\n"
    "bad_var := missing > 0\n"
)


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "formulas.sstl").write_text(FORMULAS)
    return tmp_path


def run_cli(*args):
    return main([str(a) for a in args])


def simulate_small(workdir, name="trace.csv", seed=3, eps=0.0):
    code = run_cli(
        "simulate", "turing", "--K", 6, "--T", 4, "--step", 0.5,
        "--seed", seed, "--eps", eps, "--out", workdir / name,
    )
    assert code == 0
    return workdir / name


class TestSimulate:
    def test_writes_full_grid_trace(self, workdir):
        path = simulate_small(workdir)
        lines = path.read_text().splitlines()
        assert lines[0] == "location,time,xA,xB"
        assert len(lines) == 1 + 36 * 9

    def test_same_seed_identical_output(self, workdir):
        a = simulate_small(workdir, "a.csv", seed=5, eps=0.2)
        b = simulate_small(workdir, "b.csv", seed=5, eps=0.2)
        assert a.read_bytes() == b.read_bytes()

    def test_config_file_with_flag_override(self, workdir):
        cfg = workdir / "params.cfg"
        cfg.write_text("k = 4\nt_end = 2.0\nsample_step = 0.5\nseed = 9\n")
        out1 = workdir / "c1.csv"
        assert run_cli("simulate", "turing", "--config", cfg, "--out", out1) == 0
        out2 = workdir / "c2.csv"
        assert run_cli("simulate", "turing", "--config", cfg, "--K", 3, "--out", out2) == 0
        assert len(out1.read_text().splitlines()) == 1 + 16 * 5
        assert len(out2.read_text().splitlines()) == 1 + 9 * 5

    def test_blowup_exit_code(self, workdir, capsys):
        code = run_cli(
            "simulate", "turing", "--K", 4, "--T", 40, "--step", 1,
            "--dt", 0.1, "--seed", 3, "--out", workdir / "x.csv",
        )
        assert code == 3
        assert "diverged" in capsys.readouterr().err


class TestMonitor:
    def test_both_modes_csv(self, workdir):
        trace = simulate_small(workdir)
        out = workdir / "res.csv"
        code = run_cli(
            "monitor", "--grid", 6, "--trace", trace,
            "--formulas", workdir / "formulas.sstl", "--name", "high",
            "--mode", "both", "--out", out,
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "location,satisfied,robustness"
        assert len(lines) == 37
        cells = lines[1].split(",")
        assert cells[1] in ("0", "1")
        float(cells[2])

    def test_probe_location_filter(self, workdir):
        trace = simulate_small(workdir)
        out = workdir / "res.csv"
        code = run_cli(
            "monitor", "--grid", 6, "--trace", trace,
            "--formulas", workdir / "formulas.sstl", "--name", "phi_spot",
            "--mode", "boolean", "--location", "3_3", "--out", out,
        )
        assert code == 0
        lines = out.read_text().splitlines()
        assert len(lines) == 2 and lines[1].startswith("3_3,")

    def test_at_time_evaluation(self, workdir):
        trace = simulate_small(workdir)
        out = workdir / "res.csv"
        code = run_cli(
            "monitor", "--grid", 6, "--trace", trace,
            "--formulas", workdir / "formulas.sstl", "--name", "high",
            "--mode", "both", "--at-time", 1.5, "--out", out,
        )
        assert code == 0

    def test_missing_variable_is_eval_error(self, workdir, capsys):
        trace = simulate_small(workdir)
        code = run_cli(
            "monitor", "--grid", 6, "--trace", trace,
            "--formulas", workdir / "formulas.sstl", "--name", "bad_var",
            "--mode", "boolean", "--out", workdir / "r.csv",
        )
        assert code == 2
        assert "missing" in capsys.readouterr().err

    def test_unknown_formula_is_parse_error(self, workdir):
        trace = simulate_small(workdir)
        code = run_cli(
            "monitor", "--grid", 6, "--trace", trace,
            "--formulas", workdir / "formulas.sstl", "--name", "nope",
            "--out", workdir / "r.csv",
        )
        assert code == 1

    def test_graph_file_and_dumps(self, workdir):
        space = regular_grid(6)
        graph = workdir / "grid.tsv"
        write_graph(space, graph)
        trace = simulate_small(workdir)
        out = workdir / "res.csv"
        code = run_cli(
            "monitor", "--graph", graph, "--trace", trace,
            "--formulas", workdir / "formulas.sstl", "--name", "eventually_low",
            "--mode", "both", "--out", out,
            "--dump-intervals", workdir / "iv.csv",
            "--dump-values", workdir / "vals.csv",
        )
        assert code == 0
        assert (workdir / "iv.csv").read_text().splitlines()[0] == "location,start,end"
        vals = (workdir / "vals.csv").read_text().splitlines()
        assert vals[0] == "location,t,value"
        assert len(vals) == 1 + 36 * (9 - 2)

    def test_oracle_flag_on_small_space(self, workdir):
        trace = simulate_small(workdir)
        # ball of radius 2 on the 6x6 grid stays within the enumeration cap
        (workdir / "f2.sstl").write_text("s := (xA <= 4) S[0,2] (xA > 4)\n")
        code = run_cli(
            "monitor", "--grid", 6, "--trace", trace,
            "--formulas", workdir / "f2.sstl", "--name", "s",
            "--mode", "both", "--oracle", "--out", workdir / "r.csv",
        )
        assert code == 0


class TestSMCCommands:
    def test_estimate_json_payload(self, workdir):
        out = workdir / "est.json"
        code = run_cli(
            "smc", "estimate", "--grid", 4, "--K", 4, "--T", 2, "--step", 0.5,
            "--formulas", workdir / "formulas.sstl", "--name", "eventually_low",
            "--location", "2_2", "--runs", 10, "--seed", 1, "--eps", 0.1,
            "--out", out, "--per-run", workdir / "runs.csv",
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert set(payload) == {"runs", "successes", "p_hat", "ci", "rob"}
        assert payload["runs"] == 10
        assert 0 <= payload["ci"][0] <= payload["p_hat"] <= payload["ci"][1] <= 1
        assert set(payload["rob"]) == {"mean", "std", "mean_true", "mean_false"}
        runs = (workdir / "runs.csv").read_text().splitlines()
        assert runs[0] == "epsilon,run,verdict,robustness"
        assert len(runs) == 11

    def test_sweep_csv_and_jobs_reproducibility(self, workdir, capsys):
        args = (
            "smc", "sweep", "--grid", 4, "--K", 4, "--T", 2, "--step", 0.5,
            "--formulas", workdir / "formulas.sstl", "--name", "eventually_low",
            "--location", "2_2", "--runs", 6, "--seed", 4,
            "--eps", "0:0.2:0.1",
        )
        out1, out2 = workdir / "s1.csv", workdir / "s2.csv"
        assert run_cli(*args, "--out", out1, "--jobs", 1) == 0
        assert run_cli(*args, "--out", out2, "--jobs", 2) == 0
        assert out1.read_bytes() == out2.read_bytes()
        lines = out1.read_text().splitlines()
        assert lines[0] == "epsilon,p_hat,ci_lo,ci_hi,rob_mean,rob_std"
        assert len(lines) == 4


class TestEntryPoint:
    def test_module_invocation(self, tmp_path):
        proc = subprocess.run(
            [sys.executable, "-m", "sstl.cli", "--help"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "monitor" in proc.stdout
