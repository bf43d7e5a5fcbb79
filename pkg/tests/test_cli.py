import csv
import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from fwbench import L1Ball, mushrooms_like, synth_dataset, to_libsvm
from fwbench.cli import TRACE_HEADER, main, read_trace_csv

SYNTH = "n=50,p=10,density=1.0,seed=7"
BASE = ["--synth", SYNTH, "--loss", "logistic", "--reg", "l1ball", "--delta", "1"]


def fwbench(*argv):
    """Run the CLI in-process, capturing the exit code."""
    try:
        return main(list(argv))
    except SystemExit as e:  # argparse flag errors
        return e.code


def fwbench_subprocess(*argv, env=None):
    cmd = [sys.executable, "-m", "fwbench"] + list(argv)
    full_env = dict(os.environ)
    if env:
        full_env.update(env)
    return subprocess.run(cmd, capture_output=True, text=True, env=full_env)


class TestRun:
    def test_writes_schema_exact_csv(self, tmp_path):
        out = tmp_path / "t.csv"
        code = fwbench("run", "--algo", "gsfw", *BASE, "--iters", "300",
                       "--eval-stride", "100", "--seed", "1", "--out", str(out))
        assert code == 0
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == TRACE_HEADER
        assert len(rows) == 4
        # floats round-trip and the gap column is the printed difference
        for row in rows[1:]:
            primal, dual, gap = float(row[6]), float(row[7]), float(row[8])
            assert abs(gap - (primal - dual)) <= np.spacing(max(abs(gap), 1e-300))
        # sidecar records the run configuration
        meta = json.loads((tmp_path / "t.csv.meta.json").read_text())
        assert meta["algo"] == "gsfw" and meta["n"] == 50

    def test_deterministic_modulo_wall_time(self, tmp_path):
        args = ["run", "--algo", "gsfw", *BASE, "--iters", "200",
                "--eval-stride", "50", "--seed", "3"]
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        assert fwbench(*args, "--out", str(a)) == 0
        assert fwbench(*args, "--out", str(b)) == 0

        def strip_wall(path):
            with open(path) as fh:
                return [row[:-1] for row in csv.reader(fh)]

        assert strip_wall(a) == strip_wall(b)

    def test_gap_target_termination(self, tmp_path):
        out = tmp_path / "t.csv"
        code = fwbench("run", "--algo", "gsfw", "--synth", "n=30,p=6,seed=2",
                       "--loss", "squared", "--reg", "quadball", "--mu", "1",
                       "--rho", "1", "--schedule", "strong", "--iters", "5000",
                       "--eval-stride", "25", "--gap-target", "1e-6",
                       "--seed", "1", "--out", str(out))
        assert code == 0
        rows = read_trace_csv(str(out))
        assert rows[-1]["gap"] <= 1e-6
        assert rows[-1]["iter"] < 5000

    def test_config_file_with_flag_override(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({
            "algo": "gsfw", "synth": SYNTH, "loss": "logistic",
            "reg_variant": "l1ball", "delta": 1.0, "max_iters": 100,
            "eval_stride": 50, "seed": 1,
        }))
        out = tmp_path / "t.csv"
        code = fwbench("run", "--config", str(cfg), "--seed", "9", "--out", str(out))
        assert code == 0
        rows = read_trace_csv(str(out))
        assert rows[0]["seed"] == 9  # flag overrides the file
        assert rows[-1]["iter"] == 100

    def test_unknown_config_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"algo": "gsfw", "bogus_key": 1}))
        assert fwbench("run", "--config", str(cfg), *BASE) == 2

    def test_outdir_env_var(self, tmp_path):
        env_dir = tmp_path / "envout"
        res = fwbench_subprocess(
            "run", "--algo", "fw", *BASE, "--iters", "20", "--eval-stride", "10",
            env={"FWBENCH_OUTDIR": str(env_dir)})
        assert res.returncode == 0
        assert (env_dir / "trace_fw_seed0.csv").exists()

    def test_exit_codes(self, tmp_path):
        # config errors
        assert fwbench("run", "--algo", "gsfw", "--synth", SYNTH, "--loss",
                       "logistic", "--reg", "simplex", "--delta", "1",
                       "--iters", "10") == 2
        assert fwbench("run", "--algo", "gsfw", *BASE, "--schedule", "strong",
                       "--iters", "10") == 2
        assert fwbench("run", "--algo", "gsfw", "--iters", "10") == 2  # no instance
        # io error
        assert fwbench("run", "--algo", "gsfw", "--data",
                       str(tmp_path / "missing.txt"), "--iters", "10") == 3

    def test_malformed_data_file_is_io_error(self, tmp_path):
        bad = tmp_path / "bad.txt"
        bad.write_text("not a libsvm line at all : :\n")
        assert fwbench("run", "--algo", "gsfw", "--data", str(bad),
                       "--iters", "10") == 3

    def test_libsvm_file_run(self, tmp_path):
        data = tmp_path / "small.txt"
        data.write_text(to_libsvm(synth_dataset(30, 6, 0.8, loss="logistic", seed=4)))
        out = tmp_path / "t.csv"
        code = fwbench("run", "--algo", "gsfw", "--data", str(data), "--loss",
                       "logistic", "--reg", "l1ball", "--delta", "1",
                       "--iters", "100", "--eval-stride", "50", "--out", str(out))
        assert code == 0


class TestSweep:
    def test_grid_files_and_aggregate(self, tmp_path):
        code = fwbench("sweep", "--algos", "gsfw,fw", "--seeds", "1,2,3", *BASE,
                       "--iters", "200", "--eval-stride", "50",
                       "--outdir", str(tmp_path))
        assert code == 0
        files = sorted(p.name for p in tmp_path.glob("*.csv"))
        assert files == ["aggregate.csv", "fw_seed1.csv", "fw_seed2.csv",
                         "fw_seed3.csv", "gsfw_seed1.csv", "gsfw_seed2.csv",
                         "gsfw_seed3.csv"]
        # aggregate rows equal the arithmetic mean of per-seed gaps at
        # matched checkpoints
        traces = {s: read_trace_csv(str(tmp_path / ("gsfw_seed%d.csv" % s)))
                  for s in (1, 2, 3)}
        with open(tmp_path / "aggregate.csv") as fh:
            agg = [row for row in csv.DictReader(fh) if row["algo"] == "gsfw"]
        assert len(agg) == 4
        for i, row in enumerate(agg):
            gaps = [traces[s][i]["gap"] for s in (1, 2, 3)]
            assert int(row["sg_calls"]) == traces[1][i]["sg_calls"]
            assert float(row["mean_gap"]) == pytest.approx(np.mean(gaps), rel=1e-15)
            assert int(row["n_seeds"]) == 3

    def test_partial_failure_reported_and_omitted(self, tmp_path, capsys):
        # rcmd refuses batch fractions above one sample; gsfw cells succeed
        code = fwbench("sweep", "--algos", "gsfw,rcmd", "--seeds", "1,2", *BASE,
                       "--batch", "0.1", "--iters", "50", "--eval-stride", "25",
                       "--outdir", str(tmp_path))
        assert code == 0
        err = capsys.readouterr().err
        assert "failed runs" in err and "rcmd" in err
        assert not (tmp_path / "rcmd_seed1.csv").exists()
        with open(tmp_path / "aggregate.csv") as fh:
            algos = {row["algo"] for row in csv.DictReader(fh)}
        assert algos == {"gsfw"}

    def test_all_cells_failing_is_config_error(self, tmp_path):
        code = fwbench("sweep", "--algos", "rcmd", "--seeds", "1", *BASE,
                       "--batch", "0.5", "--iters", "10", "--outdir", str(tmp_path))
        assert code == 2


class TestCheckBounds:
    @pytest.fixture()
    def gsfw_traces(self, tmp_path):
        code = fwbench("sweep", "--algos", "gsfw", "--seeds", "1,2,3,4", *BASE,
                       "--iters", "500", "--eval-stride", "100",
                       "--outdir", str(tmp_path))
        assert code == 0
        ds = synth_dataset(50, 10, 1.0, loss="logistic", seed=7)
        M = L1Ball(1.0).max_abs_prediction(ds)
        paths = [str(tmp_path / ("gsfw_seed%d.csv" % s)) for s in (1, 2, 3, 4)]
        return paths, M

    def test_pass_and_report(self, tmp_path, gsfw_traces):
        paths, M = gsfw_traces
        report = tmp_path / "bounds.csv"
        code = fwbench("check-bounds", *paths, "--mode", "nonstrong",
                       "--n-eff", "50", "--gamma", "0.25",
                       "--pred-bound", str(M),
                       "--radius", str(math.log(2.0)),
                       "--report-out", str(report))
        assert code == 0
        with open(report) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 5
        assert all(row["ok"] == "1" for row in rows)
        assert all(float(r["mean_gap"]) <= float(r["bound"]) for r in rows)

    def test_adversarial_constants_fail(self, gsfw_traces):
        paths, M = gsfw_traces
        code = fwbench("check-bounds", *paths, "--mode", "nonstrong",
                       "--n-eff", "50", "--gamma", "0.25",
                       "--pred-bound", str(0.02 * M), "--radius", "1e-4")
        assert code == 4

    def test_strong_mode_skips_undefined_start(self, tmp_path):
        code = fwbench("sweep", "--algos", "gsfw", "--seeds", "1,2",
                       "--synth", "n=30,p=6,seed=2", "--loss", "squared",
                       "--reg", "quadball", "--mu", "1", "--rho", "1",
                       "--schedule", "strong", "--iters", "200",
                       "--eval-stride", "50", "--outdir", str(tmp_path))
        assert code == 0
        ds = synth_dataset(30, 6, 1.0, loss="squared", seed=2)
        sigma = 1.0 * ds.max_sq_row_norm / (30 * 1.0) + 1.0
        M = 1.0 * ds.max_row_l2
        paths = [str(tmp_path / ("gsfw_seed%d.csv" % s)) for s in (1, 2)]
        code = fwbench("check-bounds", *paths, "--mode", "strong",
                       "--n-eff", "30", "--sigma", str(sigma),
                       "--radius", str(1.0 * M * M))
        assert code == 0

    def test_missing_constants_are_config_errors(self, gsfw_traces):
        paths, _ = gsfw_traces
        # nonstrong without gamma/pred-bound; strong without sigma
        assert fwbench("check-bounds", *paths, "--mode", "nonstrong",
                       "--n-eff", "50", "--radius", "0.7") == 2
        assert fwbench("check-bounds", *paths, "--mode", "strong",
                       "--n-eff", "50", "--radius", "0.7") == 2

    def test_schema_mismatch_is_io_error(self, tmp_path):
        bad = tmp_path / "bad.csv"
        bad.write_text("a,b,c\n1,2,3\n")
        assert fwbench("check-bounds", str(bad), "--mode", "nonstrong",
                       "--n-eff", "5", "--gamma", "0.25", "--pred-bound", "1",
                       "--radius", "0.7") == 3


class TestEquivalenceCommand:
    def test_passes_and_reports_deviation(self, capsys):
        code = fwbench("equivalence", "--n", "20", "--p", "5", "--iters", "200",
                       "--seeds", "1,2")
        assert code == 0
        out = capsys.readouterr().out
        assert "max deviation" in out

    def test_zero_iterations_trivially_pass(self):
        assert fwbench("equivalence", "--iters", "0", "--seeds", "1") == 0

    def test_console_entry_point(self):
        res = fwbench_subprocess("equivalence", "--n", "10", "--p", "3",
                                 "--iters", "50", "--seeds", "1")
        assert res.returncode == 0
        assert "match" in res.stdout


class TestBenchmarkFixtureRun:
    def test_gap_target_run_on_fixture(self, tmp_path):
        # the vendored benchmark stand-in converges through the CLI path;
        # a loose duality-gap target keeps this a smoke test
        data = tmp_path / "bench.txt"
        data.write_text(to_libsvm(mushrooms_like(seed=0)))
        out = tmp_path / "t.csv"
        code = fwbench("run", "--algo", "gsfw", "--data", str(data),
                       "--loss", "logistic", "--reg", "l1ball", "--delta", "5",
                       "--batch", "0.01", "--iters", "200000",
                       "--eval-stride", "1000", "--gap-target", "5e-3",
                       "--seed", "1", "--out", str(out))
        assert code == 0
        rows = read_trace_csv(str(out))
        assert rows[-1]["gap"] <= 5e-3
        assert rows[-1]["iter"] < 200000
