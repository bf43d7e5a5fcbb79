import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from fwbench_plots import FigureSpec, SchemaError, build_curves, render
from fwbench_plots.cli import main

HEADER = ("algo,seed,iter,sg_calls,loo_calls,full_grad_calls,"
          "primal,dual,gap,wall_ns")

IDENTITY = {"loss": "logistic", "reg": {"variant": "l1ball", "delta": 2.0},
            "data": "synth:n=40,p=5,seed=1"}


def write_trace(path, algo, seed, gaps, identity=IDENTITY, sg_step=100):
    rows = [HEADER]
    for i, gap in enumerate(gaps, start=1):
        sg = i * sg_step
        primal = 0.5 + gap
        rows.append("%s,%d,%d,%d,%d,0,%.17g,%.17g,%.17g,%d"
                    % (algo, seed, i * 10, sg, i * 10, primal, 0.5, gap, i * 1000))
    path.write_text("\n".join(rows) + "\n")
    meta = dict(identity, algo=algo, seed=seed)
    path.with_name(path.name + ".meta.json").write_text(json.dumps(meta))


def decaying(scale, n=12, seed=0):
    rng = np.random.default_rng(seed)
    return scale / np.arange(1, n + 1) * (1 + 0.1 * rng.random(n))


@pytest.fixture()
def sweep(tmp_path):
    """Five methods, two seeds each, shared instance identity."""
    paths = []
    for algo, scale in (("gsfw", 0.1), ("fw", 0.2), ("sfw", 0.5),
                        ("svrf", 0.3), ("scgm", 0.4)):
        for seed in (1, 2):
            p = tmp_path / ("%s_seed%d.csv" % (algo, seed))
            write_trace(p, algo, seed, decaying(scale, seed=seed))
            paths.append(str(p))
    return paths


class TestBuildCurves:
    def test_five_curves_from_sweep(self, sweep):
        spec = FigureSpec(traces=sweep, x_axis="sg_calls", out="unused.svg")
        curves, bound = build_curves(spec)
        assert sorted(curves) == ["fw", "gsfw", "scgm", "sfw", "svrf"]
        assert bound is None

    def test_seeds_averaged_at_matched_checkpoints(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_trace(a, "gsfw", 1, [0.4, 0.2])
        write_trace(b, "gsfw", 2, [0.2, 0.1])
        spec = FigureSpec(traces=[str(a), str(b)])
        curves, _ = build_curves(spec)
        x, gap = curves["gsfw"]
        assert np.allclose(gap, [0.3, 0.15])
        assert x.tolist() == [100, 200]

    def test_pure_function_of_inputs(self, sweep):
        spec = FigureSpec(traces=sweep)
        c1, _ = build_curves(spec)
        c2, _ = build_curves(spec)
        for algo in c1:
            assert np.array_equal(c1[algo][0], c2[algo][0])
            assert np.array_equal(c1[algo][1], c2[algo][1])

    def test_gap_clamped_at_floor(self, tmp_path):
        p = tmp_path / "t.csv"
        write_trace(p, "gsfw", 1, [1e-3, 0.0, -1e-9])
        curves, _ = build_curves(FigureSpec(traces=[str(p)]))
        assert np.all(curves["gsfw"][1] >= 1e-16)

    def test_no_smoothing_by_default(self, tmp_path):
        p = tmp_path / "t.csv"
        gaps = [0.5, 0.01, 0.4, 0.008, 0.3]  # deliberately jagged
        write_trace(p, "gsfw", 1, gaps)
        curves, _ = build_curves(FigureSpec(traces=[str(p)]))
        assert np.allclose(curves["gsfw"][1], gaps)
        smoothed, _ = build_curves(FigureSpec(traces=[str(p)], smooth=3))
        assert not np.allclose(smoothed["gsfw"][1], gaps)

    def test_mismatched_identity_rejected(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_trace(a, "gsfw", 1, [0.1])
        other = dict(IDENTITY, data="file:other.txt")
        write_trace(b, "fw", 1, [0.1], identity=other)
        with pytest.raises(SchemaError):
            build_curves(FigureSpec(traces=[str(a), str(b)]))

    def test_missing_sidecar_rejected(self, tmp_path):
        p = tmp_path / "t.csv"
        write_trace(p, "gsfw", 1, [0.1])
        p.with_name("t.csv.meta.json").unlink()
        with pytest.raises(SchemaError):
            build_curves(FigureSpec(traces=[str(p)]))

    def test_schema_mismatch_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(SchemaError):
            build_curves(FigureSpec(traces=[str(p)]))

    def test_empty_spec_rejected(self):
        with pytest.raises(SchemaError):
            FigureSpec(traces=[])


class TestRender:
    def test_five_curve_figure_with_bound_overlay(self, sweep, tmp_path):
        bounds = tmp_path / "bounds.csv"
        with open(bounds, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["iter", "k", "sg_calls", "mean_gap", "bound", "ok"])
            for i in range(1, 13):
                wr.writerow([i * 10, i * 10 - 1, i * 100, 0.1 / i, 5.0 / i, 1])
        out = tmp_path / "fig.svg"
        spec = FigureSpec(traces=sweep, out=str(out), bounds=str(bounds))
        fig, curves = render(spec)
        assert out.exists() and out.stat().st_size > 0
        # five method curves plus the dashed certificate
        labels = [t.get_text() for t in fig.legends[0].get_texts()] if fig.legends \
            else [l.get_label() for l in fig.axes[0].get_lines()]
        assert sorted(l for l in labels if not l.startswith("_")) == \
            ["certificate", "fw", "gsfw", "scgm", "sfw", "svrf"]
        # the certificate lies above the averaged gsfw gap wherever checked
        bx, bb = np.loadtxt(str(bounds), delimiter=",", skiprows=1,
                            usecols=(2, 4), unpack=True)
        x, gap = curves["gsfw"]
        for xi, bi in zip(bx, bb):
            at = gap[np.searchsorted(x, xi, side="right") - 1]
            assert bi >= at

    def test_vector_and_raster_outputs(self, sweep, tmp_path):
        for name in ("f.svg", "f.pdf", "f.png"):
            out = tmp_path / name
            render(FigureSpec(traces=sweep[:2], out=str(out)))
            assert out.exists() and out.stat().st_size > 0

    def test_loo_axis(self, sweep, tmp_path):
        out = tmp_path / "loo.svg"
        fig, curves = render(FigureSpec(traces=sweep, x_axis="loo_calls",
                                        out=str(out)))
        assert out.exists()
        assert curves["gsfw"][0].tolist() == [i * 10 for i in range(1, 13)]


class TestCli:
    def test_end_to_end(self, sweep, tmp_path):
        out = tmp_path / "fig.svg"
        assert main(["--x", "sg_calls", "--out", str(out), *sweep]) == 0
        assert out.exists()

    def test_schema_mismatch_fails_cleanly(self, tmp_path, capsys):
        bad = tmp_path / "bad.csv"
        bad.write_text("not,a,trace\n")
        code = main(["--out", str(tmp_path / "f.svg"), str(bad)])
        assert code == 3
        assert "bad input" in capsys.readouterr().err

    def test_missing_file_fails_cleanly(self, tmp_path):
        code = main(["--out", str(tmp_path / "f.svg"),
                     str(tmp_path / "missing.csv")])
        assert code == 3

    def test_no_traces_is_usage_error(self):
        with pytest.raises(SystemExit) as e:
            main(["--out", "f.svg"])
        assert e.value.code == 2

    def test_console_module(self, sweep, tmp_path):
        out = tmp_path / "fig.svg"
        res = subprocess.run(
            [sys.executable, "-m", "fwbench_plots.cli", "--out", str(out), *sweep],
            capture_output=True, text=True)
        assert res.returncode == 0, res.stderr
        assert out.exists()
