"""Benchmark command line: run solvers, sweep (algo, seed) grids, check
traces against the convergence certificates, and verify the primal/dual
iterate correspondence.

Exit codes: 0 success, 2 configuration error, 3 input/output error,
4 verification failure (bound check or equivalence).

Every trace is a CSV with the fixed header
``algo,seed,iter,sg_calls,loo_calls,full_grad_calls,primal,dual,gap,wall_ns``
(floats printed with 17 significant digits) plus a ``.meta.json`` sidecar
holding the full run configuration.
"""

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from . import metrics
from .datasets import DatasetError, load_libsvm, synth_dataset
from .losses import make_loss
from .regularizers import L1Ball
from .solvers import (
    ALGOS,
    ConfigError,
    DualMirrorSolver,
    GsfwSolver,
    RunConfig,
    Schedule,
    run,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_CHECK = 4

TRACE_HEADER = [
    "algo", "seed", "iter", "sg_calls", "loo_calls", "full_grad_calls",
    "primal", "dual", "gap", "wall_ns",
]


class CheckFailure(Exception):
    """A verification subcommand found a violated guarantee."""


def _fmt(v):
    return "%.17g" % v


def write_trace_csv(path, records):
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(TRACE_HEADER)
        for r in records:
            wr.writerow([
                r.algo, r.seed, r.iter, r.sg_calls, r.loo_calls,
                r.full_grad_calls, _fmt(r.primal), _fmt(r.dual), _fmt(r.gap),
                r.wall_ns,
            ])


def read_trace_csv(path):
    """Rows as dicts with numeric fields parsed; schema must match exactly."""
    with open(path, "r", newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd, None)
        if header != TRACE_HEADER:
            raise DatasetError("trace %s: unexpected CSV header %r" % (path, header))
        rows = []
        for row in rd:
            rows.append({
                "algo": row[0],
                "seed": int(row[1]),
                "iter": int(row[2]),
                "sg_calls": int(row[3]),
                "loo_calls": int(row[4]),
                "full_grad_calls": int(row[5]),
                "primal": float(row[6]),
                "dual": float(row[7]),
                "gap": float(row[8]),
                "wall_ns": int(row[9]),
            })
    return rows


def write_sidecar(path, payload):
    with open(path + ".meta.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ----------------------------------------------------------------------
# argument plumbing
# ----------------------------------------------------------------------

def _add_instance_flags(sp):
    sp.add_argument("--data", help="path to a LIBSVM text file")
    sp.add_argument("--synth", help="synthetic spec, e.g. n=50,p=10,density=1.0,seed=7")
    sp.add_argument("--n-features", type=int, default=None,
                    help="feature-count override for LIBSVM files")
    sp.add_argument("--loss", choices=["logistic", "squared"], default=None)
    sp.add_argument("--reg", dest="reg_variant",
                    choices=["l1ball", "l2ball", "simplex", "quadball"], default=None)
    sp.add_argument("--delta", type=float, default=None)
    sp.add_argument("--mu", type=float, default=None)
    sp.add_argument("--rho", type=float, default=None)
    sp.add_argument("--schedule", choices=["nonstrong", "strong"], default=None)
    sp.add_argument("--batch", dest="batch_fraction", type=float, default=None,
                    help="batch size as a fraction of n")
    sp.add_argument("--iters", dest="max_iters", type=int, default=None)
    sp.add_argument("--max-sg-calls", type=int, default=None)
    sp.add_argument("--gap-target", type=float, default=None)
    sp.add_argument("--eval-stride", type=int, default=None)
    sp.add_argument("--config", help="JSON file of flag defaults (flags override)")
    sp.add_argument("--outdir", default=None,
                    help="output directory (default: $FWBENCH_OUTDIR or cwd)")


_CONFIG_KEYS = (
    "algo", "loss", "reg_variant", "delta", "mu", "rho", "schedule",
    "batch_fraction", "max_iters", "max_sg_calls", "gap_target",
    "eval_stride", "seed", "data", "synth", "n_features", "out", "outdir",
    "algos", "seeds",
)


def _merge_config(args):
    """Overlay CLI flags onto the JSON config file; flags win."""
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                file_cfg = json.load(fh)
        except OSError as e:
            raise e
        except json.JSONDecodeError as e:
            raise ConfigError("bad config JSON: %s" % e)
        for key, val in file_cfg.items():
            if key not in _CONFIG_KEYS:
                raise ConfigError("unknown config key %r" % key)
            if getattr(args, key, None) is None:
                setattr(args, key, val)
    return args


def _outdir(args):
    out = getattr(args, "outdir", None) or os.environ.get("FWBENCH_OUTDIR") or "."
    os.makedirs(out, exist_ok=True)
    return out


def _parse_synth(spec, loss):
    fields = {}
    for part in spec.split(","):
        key, _, val = part.partition("=")
        fields[key.strip()] = val.strip()
    try:
        n = int(fields.pop("n"))
        p = int(fields.pop("p"))
        density = float(fields.pop("density", "1.0"))
        seed = int(fields.pop("seed", "0"))
    except (KeyError, ValueError) as e:
        raise ConfigError("bad synth spec %r: %s" % (spec, e))
    if fields:
        raise ConfigError("unknown synth keys %r" % sorted(fields))
    return synth_dataset(n, p, density, loss=loss, seed=seed)


def _load_instance(args):
    loss = args.loss or "logistic"
    if args.data and args.synth:
        raise ConfigError("give either --data or --synth, not both")
    if args.data:
        try:
            ds = load_libsvm(args.data, expect_binary_labels=(loss == "logistic"),
                             n_features=args.n_features)
        except DatasetError as e:
            raise OSError(str(e))
        data_id = "file:" + os.path.basename(args.data)
    elif args.synth:
        ds = _parse_synth(args.synth, loss)
        data_id = "synth:" + args.synth
    else:
        raise ConfigError("an instance is required: --data or --synth")
    return ds, data_id, loss


def _build_run_config(args, loss, seed):
    return RunConfig(
        algo=args.algo,
        loss=loss,
        reg_variant=args.reg_variant or "l1ball",
        delta=args.delta,
        mu=args.mu,
        rho=args.rho,
        schedule=args.schedule or "nonstrong",
        batch_fraction=args.batch_fraction,
        max_iters=args.max_iters or 10000,
        max_sg_calls=args.max_sg_calls,
        gap_target=args.gap_target,
        eval_stride=args.eval_stride,
        seed=seed,
    )


def _sidecar_payload(cfg, ds, data_id):
    return {
        "algo": cfg.algo,
        "seed": cfg.seed,
        "loss": cfg.loss,
        "reg": {"variant": cfg.reg_variant, "delta": cfg.delta,
                "mu": cfg.mu, "rho": cfg.rho},
        "schedule": cfg.schedule,
        "batch_fraction": cfg.batch_fraction,
        "max_iters": cfg.max_iters,
        "max_sg_calls": cfg.max_sg_calls,
        "gap_target": cfg.gap_target,
        "eval_stride": cfg.eval_stride,
        "data": data_id,
        "n": ds.n,
        "p": ds.p,
        "hyperparams": {
            "fw_step": "2/(i+2)",
            "sfw_batch": "min(k^2, n/2)", "sfw_step": "2/(k+2)",
            "svrf_batch": "min(k, n/2)", "svrf_step": "2/(k+2)",
            "svrf_epoch": "ceil(n/batch)",
            "scgm_momentum": "(k+1)^(-2/3)", "scgm_step": "1/(k+1)",
        },
    }


# ----------------------------------------------------------------------
# subcommands
# ----------------------------------------------------------------------

def cmd_run(args):
    args = _merge_config(args)
    ds, data_id, loss = _load_instance(args)
    cfg = _build_run_config(args, loss, args.seed)
    trace = run(cfg, ds)
    outdir = _outdir(args)
    name = args.out or "trace_%s_seed%d.csv" % (cfg.algo, cfg.seed)
    path = name if os.path.isabs(name) else os.path.join(outdir, name)
    write_trace_csv(path, trace)
    write_sidecar(path, _sidecar_payload(cfg, ds, data_id))
    last = trace[-1]
    print("wrote %s" % path)
    print("final: iter=%d sg_calls=%d loo_calls=%d gap=%s"
          % (last.iter, last.sg_calls, last.loo_calls, _fmt(last.gap)))
    return EXIT_OK


def cmd_sweep(args):
    args = _merge_config(args)
    ds, data_id, loss = _load_instance(args)
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    seeds = [int(s) for s in args.seeds.split(",")]
    for a in algos:
        if a not in ALGOS:
            raise ConfigError("unknown algo %r" % a)
    outdir = _outdir(args)
    done = {}
    failed = []
    for algo in algos:
        for seed in seeds:
            sub = argparse.Namespace(**vars(args))
            sub.algo = algo
            cfg = _build_run_config(sub, loss, seed)
            try:
                trace = run(cfg, ds)
            except (ConfigError, ValueError) as e:
                failed.append((algo, seed, str(e)))
                continue
            path = os.path.join(outdir, "%s_seed%d.csv" % (algo, seed))
            write_trace_csv(path, trace)
            write_sidecar(path, _sidecar_payload(cfg, ds, data_id))
            done.setdefault(algo, []).append(trace)
            print("wrote %s (%d rows)" % (path, len(trace)))
    agg_path = os.path.join(outdir, "aggregate.csv")
    with open(agg_path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["algo", "iter", "sg_calls", "mean_gap", "n_seeds"])
        for algo, traces in done.items():
            for rows in zip(*traces):
                iters = {r.iter for r in rows}
                sgs = {r.sg_calls for r in rows}
                if len(iters) != 1 or len(sgs) != 1:
                    # seeds disagree on checkpoints (early gap-target stop);
                    # aggregate only the common prefix
                    break
                mean_gap = sum(r.gap for r in rows) / len(rows)
                wr.writerow([algo, rows[0].iter, rows[0].sg_calls,
                             _fmt(mean_gap), len(rows)])
    print("wrote %s" % agg_path)
    if failed:
        print("failed runs:", file=sys.stderr)
        for algo, seed, msg in failed:
            print("  %s seed=%d: %s" % (algo, seed, msg), file=sys.stderr)
    if not done:
        raise ConfigError("all sweep cells failed")
    return EXIT_OK


def cmd_check_bounds(args):
    traces = [read_trace_csv(p) for p in args.traces]
    mode = args.mode
    if mode == "strong" and args.sigma is None:
        raise ConfigError("strong mode needs --sigma")
    if mode == "nonstrong" and (args.gamma is None or args.pred_bound is None):
        raise ConfigError("nonstrong mode needs --gamma and --pred-bound")
    # group matched checkpoints across seeds by iteration count
    by_iter = {}
    for rows in traces:
        for r in rows:
            by_iter.setdefault(r["iter"], []).append(r)
    n_traces = len(traces)
    report = []
    worst = None
    for it in sorted(by_iter):
        rows = by_iter[it]
        if len(rows) != n_traces:
            continue  # not a common checkpoint
        k = it - 1 if mode == "nonstrong" else it
        if (mode == "nonstrong" and k < 0) or (mode == "strong" and k < 1):
            continue  # certificate undefined here
        mean_gap = sum(r["gap"] for r in rows) / len(rows)
        if mode == "nonstrong":
            bound = metrics.gap_bound_nonstrong(
                args.n_eff, args.gamma, args.pred_bound, args.radius, k)
        else:
            bound = metrics.gap_bound_strong(args.n_eff, args.sigma, args.radius, k)
        ok = mean_gap <= bound
        sg = rows[0]["sg_calls"]
        report.append((it, k, sg, mean_gap, bound, ok))
        margin = bound - mean_gap
        if worst is None or margin < worst[0]:
            worst = (margin, it)
    if not report:
        raise ConfigError("no common checkpoints with a defined certificate")
    if args.report_out:
        with open(args.report_out, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["iter", "k", "sg_calls", "mean_gap", "bound", "ok"])
            for it, k, sg, g, b, ok in report:
                wr.writerow([it, k, sg, _fmt(g), _fmt(b), int(ok)])
        print("wrote %s" % args.report_out)
    bad = [r for r in report if not r[5]]
    for it, k, sg, g, b, ok in report:
        print("iter=%d k=%d sg=%d mean_gap=%.6e bound=%.6e %s"
              % (it, k, sg, g, b, "ok" if ok else "VIOLATED"))
    print("checked %d checkpoints over %d traces; worst margin %.3e at iter %d"
          % (len(report), n_traces, worst[0], worst[1]))
    if bad:
        raise CheckFailure("%d checkpoint(s) violate the certificate" % len(bad))
    print("certificate holds at every checkpoint")
    return EXIT_OK


def cmd_equivalence(args):
    seeds = [int(s) for s in args.seeds.split(",")]
    ds = synth_dataset(args.n, args.p, 1.0, loss="logistic", seed=args.instance_seed)
    loss = make_loss("logistic", ds.y)
    reg = L1Ball(args.delta)
    worst = 0.0
    for seed in seeds:
        sched = Schedule("nonstrong", ds.n)
        primal = GsfwSolver(loss, reg, ds, sched, batch_size=1, seed=seed)
        dual = DualMirrorSolver(loss, reg, ds, sched, seed=seed)
        for _ in range(args.iters):
            bp = primal.step()
            bd = dual.step()
            if not np.array_equal(bp, bd):
                raise CheckFailure(
                    "oracle points diverged at iteration %d (seed %d)"
                    % (primal.iter, seed))
            dev = float(np.max(np.abs(primal.s - loss.conj_derivs(dual.w))))
            worst = max(worst, dev)
    print("max deviation over %d seeds x %d iterations: %.3e"
          % (len(seeds), args.iters, worst))
    if worst > args.tol:
        raise CheckFailure("deviation %.3e exceeds tolerance %g" % (worst, args.tol))
    print("primal and dual iterate sequences match (tolerance %g)" % args.tol)
    return EXIT_OK


# ----------------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="fwbench",
        description="Projection-free stochastic optimization benchmark harness",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("run", help="execute one configured solver run")
    sp.add_argument("--algo", choices=ALGOS, default=None)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", help="trace CSV filename")
    _add_instance_flags(sp)
    sp.set_defaults(func=cmd_run)

    sp = sub.add_parser("sweep", help="run an (algo, seed) grid and aggregate")
    sp.add_argument("--algos", required=True, help="comma-separated algo list")
    sp.add_argument("--seeds", required=True, help="comma-separated seed list")
    _add_instance_flags(sp)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("check-bounds",
                        help="compare mean trace gaps to the certificates")
    sp.add_argument("traces", nargs="+", help="trace CSVs from matched runs")
    sp.add_argument("--mode", choices=["nonstrong", "strong"], required=True)
    sp.add_argument("--n-eff", type=int, required=True)
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--pred-bound", type=float, default=None)
    sp.add_argument("--radius", type=float, required=True,
                    help="cap on the dual Bregman distance (e.g. ln 2 for logistic)")
    sp.add_argument("--sigma", type=float, default=None)
    sp.add_argument("--report-out", help="write per-checkpoint bounds CSV here")
    sp.set_defaults(func=cmd_check_bounds)

    sp = sub.add_parser("equivalence",
                        help="verify the primal/dual iterate correspondence")
    sp.add_argument("--n", type=int, default=20)
    sp.add_argument("--p", type=int, default=5)
    sp.add_argument("--iters", type=int, default=500)
    sp.add_argument("--seeds", default="1,2,3,4,5")
    sp.add_argument("--delta", type=float, default=1.0)
    sp.add_argument("--tol", type=float, default=1e-10)
    sp.add_argument("--instance-seed", type=int, default=0)
    sp.set_defaults(func=cmd_equivalence)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as e:
        print("config error: %s" % e, file=sys.stderr)
        return EXIT_CONFIG
    except CheckFailure as e:
        print("check failed: %s" % e, file=sys.stderr)
        return EXIT_CHECK
    except OSError as e:
        print("io error: %s" % e, file=sys.stderr)
        return EXIT_IO
    except DatasetError as e:
        print("io error: %s" % e, file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
