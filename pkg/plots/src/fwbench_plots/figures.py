"""Figure construction: traces in, one log-log gap curve per method out.

The data side (`build_curves`) is a pure function of the input CSVs, so a
given set of traces always produces the same plotted arrays; rendering is a
thin matplotlib layer on top.
"""

import csv
import json
import os
from dataclasses import dataclass, field

import numpy as np

TRACE_HEADER = [
    "algo", "seed", "iter", "sg_calls", "loo_calls", "full_grad_calls",
    "primal", "dual", "gap", "wall_ns",
]

X_AXES = ("sg_calls", "loo_calls")

GAP_FLOOR = 1e-16

# identity fields that must agree across every input trace
IDENTITY_KEYS = ("loss", "reg", "data")


class SchemaError(ValueError):
    """Input file does not match the trace interface."""


@dataclass
class FigureSpec:
    """What to draw: which traces, which x-axis, where to write.

    ``bounds`` optionally names a certificate CSV (from the bound checker)
    whose (x, bound) pairs are overlaid as a dashed curve.  ``smooth``
    applies a median-of-window filter to each curve when > 1; raw values
    are plotted by default.
    """

    traces: list
    x_axis: str = "sg_calls"
    out: str = "figure.svg"
    bounds: str = None
    smooth: int = 1
    styles: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.traces:
            raise SchemaError("at least one trace file is required")
        if self.x_axis not in X_AXES:
            raise SchemaError("x axis must be one of %s" % (X_AXES,))
        if self.smooth < 1:
            raise SchemaError("smoothing window must be >= 1")


def read_trace(path):
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if header != TRACE_HEADER:
            raise SchemaError("%s: unexpected header %r" % (path, header))
        rows = []
        for row in rd:
            if len(row) != len(TRACE_HEADER):
                raise SchemaError("%s: ragged row %r" % (path, row))
            rows.append(row)
    if not rows:
        raise SchemaError("%s: no data rows" % path)
    algo = rows[0][0]
    out = {
        "algo": algo,
        "sg_calls": np.array([int(r[3]) for r in rows]),
        "loo_calls": np.array([int(r[4]) for r in rows]),
        "gap": np.array([float(r[8]) for r in rows]),
    }
    if any(r[0] != algo for r in rows):
        raise SchemaError("%s: mixed algos in one trace" % path)
    return out


def read_sidecar(path):
    meta_path = path + ".meta.json"
    if not os.path.exists(meta_path):
        raise SchemaError("%s: missing metadata sidecar" % path)
    with open(meta_path) as fh:
        meta = json.load(fh)
    return {k: meta.get(k) for k in IDENTITY_KEYS}


def check_identity(paths):
    """All traces must describe the same loss/regularizer/data instance."""
    first = None
    for p in paths:
        ident = read_sidecar(p)
        if first is None:
            first = ident
        elif ident != first:
            raise SchemaError(
                "trace %s has a different instance identity %r != %r"
                % (p, ident, first))
    return first


def read_bounds(path, x_axis):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    if not rows or "bound" not in rows[0]:
        raise SchemaError("%s: not a certificate report" % path)
    xcol = x_axis if x_axis in rows[0] else "sg_calls"
    if xcol not in rows[0]:
        raise SchemaError("%s: no usable x column for axis %s" % (path, x_axis))
    x = np.array([float(r[xcol]) for r in rows])
    b = np.array([float(r["bound"]) for r in rows])
    return x, b


def _median_smooth(values, window):
    if window <= 1:
        return values
    out = np.empty_like(values)
    half = window // 2
    for i in range(len(values)):
        lo = max(0, i - half)
        hi = min(len(values), i + half + 1)
        out[i] = np.median(values[lo:hi])
    return out


def build_curves(spec):
    """One (x, gap) curve per algorithm; multiple traces of the same
    algorithm (seeds) are averaged at matched checkpoints.  Gaps are
    clamped at a positive floor so the log axis is always defined.
    """
    check_identity(spec.traces)
    grouped = {}
    for path in spec.traces:
        tr = read_trace(path)
        grouped.setdefault(tr["algo"], []).append(tr)
    curves = {}
    for algo, traces in grouped.items():
        xs = [t[spec.x_axis] for t in traces]
        if any(len(x) != len(xs[0]) or not np.array_equal(x, xs[0]) for x in xs):
            raise SchemaError(
                "traces for %r do not share checkpoints; aggregate per seed "
                "grids before plotting" % algo)
        gap = np.mean([t["gap"] for t in traces], axis=0)
        gap = np.maximum(_median_smooth(gap, spec.smooth), GAP_FLOOR)
        curves[algo] = (xs[0], gap)
    bound_curve = None
    if spec.bounds:
        bound_curve = read_bounds(spec.bounds, spec.x_axis)
    return curves, bound_curve


_AXIS_LABELS = {
    "sg_calls": "stochastic gradient evaluations",
    "loo_calls": "linear-oracle calls",
}


def render(spec):
    """Write the figure; returns (figure, curves) for inspection."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    curves, bound_curve = build_curves(spec)
    fig, ax = plt.subplots(figsize=(6.4, 4.8))
    for algo in sorted(curves):
        x, gap = curves[algo]
        style = spec.styles.get(algo, {})
        ax.plot(x, gap, label=algo, **style)
    if bound_curve is not None:
        bx, bb = bound_curve
        ax.plot(bx, np.maximum(bb, GAP_FLOOR), "k--", label="certificate")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel(_AXIS_LABELS[spec.x_axis])
    ax.set_ylabel("optimality gap")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(spec.out)
    return fig, curves
