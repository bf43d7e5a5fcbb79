"""Projection-free solvers sharing one linear-minimization oracle.

The centerpiece is ``GsfwSolver``: a stochastic conditional-gradient method
that never forms a fresh gradient.  It maintains per-sample predicted values
``s``, refreshes one random batch of them per step, and keeps a running
"substitute gradient" ``d = (1/n) X^T L'(s)`` up to date with rank-one
corrections, so each step costs O(batch nnz + p) independent of n.
``DualMirrorSolver`` is the same method seen from the dual side: randomized
coordinate mirror descent on the conjugate objective with the averaged
per-sample conjugates as prox function; driven by the same index stream the
two produce matching iterates, which the test suite checks directly.

Also here: the deterministic conditional-gradient method, three stochastic
baselines (sfw / svrf / scgm), the two step-size schedules (sublinear for
indicator regularizers, geometric for strongly convex ones), and the ``run``
harness that turns any solver into a benchmark trace.
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import metrics
from .datasets import row_dot, weighted_columns
from .losses import make_loss
from .regularizers import Simplex, make_regularizer


class ConfigError(ValueError):
    """Invalid run configuration."""


# ----------------------------------------------------------------------
# step-size schedules
# ----------------------------------------------------------------------

def alpha_nonstrong(n_eff, i):
    """Primal averaging weight at step i for the sublinear schedule."""
    return 2.0 * (2.0 * n_eff + i) / ((i + 1.0) * (4.0 * n_eff + i))


def eta_nonstrong(n_eff, i):
    """Predicted-value blending weight at step i for the sublinear schedule."""
    return 2.0 * n_eff / (2.0 * n_eff + i + 1.0)


def relative_smoothness(gamma, max_sq_row_norm, n, mu):
    """Coordinate-wise smoothness constant of the negated dual objective
    relative to the conjugate prox function: gamma*max_j||x_j||^2/(n*mu) + 1.
    """
    if gamma <= 0 or max_sq_row_norm <= 0 or n <= 0 or mu <= 0:
        raise ValueError("all inputs must be positive")
    return gamma * max_sq_row_norm / (n * mu) + 1.0


def eta_strong(sigma):
    """Constant mirror-descent step 1/sigma for the geometric schedule."""
    return 1.0 / sigma


def alpha_strong(n_eff, sigma, i):
    """Primal averaging weight at step i for the geometric schedule.

    Evaluated in the factored form (1/(n*sigma)) / (1 - ((sigma-1/n)/sigma)^(i+1));
    the raw sigma^(i+1) numerator/denominator overflow for large i.
    """
    if sigma <= 1.0 / n_eff:
        raise ValueError("need sigma > 1/n_eff")
    ratio = (sigma - 1.0 / n_eff) / sigma
    return (1.0 / (n_eff * sigma)) / (1.0 - ratio ** (i + 1))


@dataclass(frozen=True)
class Schedule:
    """Step-size schedule: mode 'nonstrong' (sublinear rate, indicator
    regularizers) or 'strong' (geometric rate, strongly convex regularizer).
    ``n_eff`` is the effective sample count, ceil(n / batch) under
    mini-batching.
    """

    mode: str
    n_eff: int
    sigma: float = None

    def __post_init__(self):
        if self.mode not in ("nonstrong", "strong"):
            raise ConfigError("schedule mode must be 'nonstrong' or 'strong'")
        if self.n_eff < 1:
            raise ConfigError("n_eff must be >= 1")
        if self.mode == "strong" and (self.sigma is None or self.sigma <= 1.0):
            raise ConfigError("strong schedule needs sigma > 1")

    def alpha(self, i):
        if self.mode == "nonstrong":
            return alpha_nonstrong(self.n_eff, i)
        return alpha_strong(self.n_eff, self.sigma, i)

    def eta(self, i):
        if self.mode == "nonstrong":
            return eta_nonstrong(self.n_eff, i)
        return eta_strong(self.sigma)


@dataclass
class CallCounters:
    """Oracle accounting: one sg call per sample per batch, one loo call per
    subproblem solved by the algorithm itself (diagnostic gap evaluations are
    not counted here).
    """

    sg_calls: int = 0
    loo_calls: int = 0
    full_grad_calls: int = 0


def draw_batch(rng, n, b):
    """Uniform size-b index subset, without replacement; exactly one
    generator call so different solvers sharing a seed see the same stream.
    """
    return rng.choice(n, size=b, replace=False)


# ----------------------------------------------------------------------
# primal stochastic solver
# ----------------------------------------------------------------------

class GsfwSolver:
    """Stochastic conditional gradient with lazily updated predicted values.

    Invariants maintained at every step (and checked by the test suite):
    ``d == (1/n) X^T L'(s)`` and ``w == L'(s)``, where only batch-size many
    coordinates of ``s`` change per step, blended toward the oracle point's
    predictions by eta; ``beta_bar`` and ``w_avg`` carry the schedule's
    weighted averages of oracle points and pre-update dual weights.
    """

    def __init__(self, loss, reg, ds, schedule, batch_size=1, seed=0):
        if not 1 <= batch_size <= ds.n:
            raise ConfigError("batch size must lie in [1, n]")
        self.loss = loss
        self.reg = reg
        self.ds = ds
        self.schedule = schedule
        self.b = int(batch_size)
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.s = np.zeros(ds.n)
        self.w = np.asarray(loss.derivs(self.s))
        self.d = weighted_columns(ds, self.w)
        self.beta_bar = np.zeros(ds.p)
        self.w_avg = np.zeros(ds.n)
        self.iter = 0
        self.counters = CallCounters()

    def step(self):
        """One iteration; returns the oracle point used."""
        i = self.iter
        alpha = self.schedule.alpha(i)
        eta = self.schedule.eta(i)
        beta_t = self.reg.linear_oracle(self.d)
        self.counters.loo_calls += 1
        # Averages use the pre-update dual weights, pairing w^i with beta_t^i.
        self.w_avg = (1.0 - alpha) * self.w_avg + alpha * self.w
        batch = draw_batch(self.rng, self.ds.n, self.b)
        if self.b <= 8:
            inv_n = 1.0 / self.ds.n
            for j in batch:
                idx, vals = self.ds.row(j)
                pred = float(vals @ beta_t[idx])
                s_new = (1.0 - eta) * self.s[j] + eta * pred
                w_new = self.loss.deriv(j, s_new)
                self.d[idx] += (w_new - self.w[j]) * inv_n * vals
                self.s[j] = s_new
                self.w[j] = w_new
        else:
            XB = self.ds.X[batch]
            preds = XB @ beta_t
            s_new = (1.0 - eta) * self.s[batch] + eta * preds
            w_new = self.loss.derivs_at(batch, s_new)
            self.d += XB.T @ (w_new - self.w[batch]) / self.ds.n
            self.s[batch] = s_new
            self.w[batch] = w_new
        self.counters.sg_calls += self.b
        self.beta_bar = (1.0 - alpha) * self.beta_bar + alpha * beta_t
        self.iter += 1
        return beta_t


class DualMirrorSolver:
    """Randomized coordinate mirror descent on the dual problem.

    Prox function: the average of the per-sample conjugate losses, so the
    prox-center initialization is w0 = L'(0).  Each step recomputes the
    oracle coefficient (1/n) X^T w from scratch (no incremental state) and
    updates one coordinate through the closed-form composition
    w_j <- l_j'((1-eta) l_j*'(w_j) + eta x_j^T beta_t).
    """

    def __init__(self, loss, reg, ds, schedule, seed=0):
        self.loss = loss
        self.reg = reg
        self.ds = ds
        self.schedule = schedule
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.w = np.asarray(loss.derivs(np.zeros(ds.n)))
        self.beta_bar = np.zeros(ds.p)
        self.w_avg = np.zeros(ds.n)
        self.iter = 0
        self.counters = CallCounters()

    def step(self):
        i = self.iter
        alpha = self.schedule.alpha(i)
        eta = self.schedule.eta(i)
        beta_t = self.reg.linear_oracle(weighted_columns(self.ds, self.w))
        self.counters.loo_calls += 1
        self.w_avg = (1.0 - alpha) * self.w_avg + alpha * self.w
        j = int(draw_batch(self.rng, self.ds.n, 1)[0])
        pred = row_dot(self.ds, j, beta_t)
        blended = (1.0 - eta) * self.loss.conj_deriv(j, self.w[j]) + eta * pred
        self.w[j] = self.loss.deriv(j, blended)
        self.counters.sg_calls += 1
        self.beta_bar = (1.0 - alpha) * self.beta_bar + alpha * beta_t
        self.iter += 1
        return beta_t


# ----------------------------------------------------------------------
# deterministic method and stochastic baselines
# ----------------------------------------------------------------------

def _initial_point(reg, p):
    beta = np.zeros(p)
    if not np.isfinite(reg.value(beta)):
        beta = reg.linear_oracle(np.zeros(p))
    return beta


class FrankWolfeSolver:
    """Deterministic conditional gradient with step 2/(i+2)."""

    def __init__(self, loss, reg, ds, seed=0):
        self.loss = loss
        self.reg = reg
        self.ds = ds
        self.beta = _initial_point(reg, ds.p)
        self.iter = 0
        self.counters = CallCounters()

    def gradient(self, beta):
        """Exact gradient (1/n) X^T L'(X beta); counts one full-gradient call."""
        self.counters.full_grad_calls += 1
        self.counters.sg_calls += self.ds.n
        return weighted_columns(self.ds, self.loss.derivs(self.ds.X @ beta))

    def step(self):
        grad = self.gradient(self.beta)
        beta_t = self.reg.linear_oracle(grad)
        self.counters.loo_calls += 1
        a = 2.0 / (self.iter + 2.0)
        self.beta = (1.0 - a) * self.beta + a * beta_t
        self.iter += 1
        return beta_t


def _minibatch_gradient(loss, ds, beta, batch):
    """Unbiased gradient estimate (1/b) sum_{j in batch} l_j'(x_j beta) x_j."""
    XB = ds.X[batch]
    wb = loss.derivs_at(batch, XB @ beta)
    return XB.T @ wb / batch.size


class SfwSolver:
    """Stochastic conditional gradient with growing batches min(k^2, n/2)."""

    def __init__(self, loss, reg, ds, seed=0):
        self.loss = loss
        self.reg = reg
        self.ds = ds
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.beta = _initial_point(reg, ds.p)
        self.iter = 0
        self.counters = CallCounters()

    def batch_size(self, k):
        return max(1, min(k * k, self.ds.n // 2))

    def step(self):
        k = self.iter + 1
        b = self.batch_size(k)
        batch = draw_batch(self.rng, self.ds.n, b)
        grad = _minibatch_gradient(self.loss, self.ds, self.beta, batch)
        self.counters.sg_calls += b
        beta_t = self.reg.linear_oracle(grad)
        self.counters.loo_calls += 1
        a = 2.0 / (k + 2.0)
        self.beta = (1.0 - a) * self.beta + a * beta_t
        self.iter += 1
        return beta_t


class SvrfSolver:
    """Variance-reduced stochastic conditional gradient.

    Takes a snapshot full gradient every ``epoch_len`` steps and corrects it
    with paired mini-batch gradients at the current point and the snapshot;
    batch size grows as min(k, n/2).
    """

    def __init__(self, loss, reg, ds, seed=0, epoch_len=100):
        self.loss = loss
        self.reg = reg
        self.ds = ds
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.beta = _initial_point(reg, ds.p)
        self.epoch_len = max(1, int(epoch_len))
        self.snap_beta = None
        self.snap_grad = None
        self.iter = 0
        self.counters = CallCounters()

    def batch_size(self, k):
        return max(1, min(k, self.ds.n // 2))

    def step(self):
        k = self.iter + 1
        if self.iter % self.epoch_len == 0:
            self.snap_beta = self.beta.copy()
            self.snap_grad = weighted_columns(
                self.ds, self.loss.derivs(self.ds.X @ self.snap_beta)
            )
            self.counters.full_grad_calls += 1
            self.counters.sg_calls += self.ds.n
        b = self.batch_size(k)
        batch = draw_batch(self.rng, self.ds.n, b)
        g_cur = _minibatch_gradient(self.loss, self.ds, self.beta, batch)
        g_snap = _minibatch_gradient(self.loss, self.ds, self.snap_beta, batch)
        grad = self.snap_grad + g_cur - g_snap
        self.counters.sg_calls += b
        beta_t = self.reg.linear_oracle(grad)
        self.counters.loo_calls += 1
        a = 2.0 / (k + 2.0)
        self.beta = (1.0 - a) * self.beta + a * beta_t
        self.iter += 1
        return beta_t


class ScgmSolver:
    """Momentum-averaged stochastic conditional gradient (fixed small batch).

    Gradient estimate d_k = (1-rho_k) d_{k-1} + rho_k g_k with
    rho_k = (k+1)^(-2/3) and step alpha_k = 1/(k+1); rho_0 = 1, so the zero
    initialization of the estimate never enters.
    """

    def __init__(self, loss, reg, ds, batch_size=1, seed=0):
        if not 1 <= batch_size <= ds.n:
            raise ConfigError("batch size must lie in [1, n]")
        self.loss = loss
        self.reg = reg
        self.ds = ds
        self.b = int(batch_size)
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self.beta = _initial_point(reg, ds.p)
        self.d = np.zeros(ds.p)
        self.iter = 0
        self.counters = CallCounters()

    def step(self):
        k = self.iter
        rho = (k + 1.0) ** (-2.0 / 3.0)
        batch = draw_batch(self.rng, self.ds.n, self.b)
        g = _minibatch_gradient(self.loss, self.ds, self.beta, batch)
        self.counters.sg_calls += self.b
        self.d = (1.0 - rho) * self.d + rho * g
        beta_t = self.reg.linear_oracle(self.d)
        self.counters.loo_calls += 1
        a = 1.0 / (k + 1.0)
        self.beta = (1.0 - a) * self.beta + a * beta_t
        self.iter += 1
        return beta_t


# ----------------------------------------------------------------------
# run harness
# ----------------------------------------------------------------------

ALGOS = ("gsfw", "rcmd", "fw", "sfw", "svrf", "scgm")


@dataclass
class RunConfig:
    """Everything needed to reproduce one benchmark run."""

    algo: str = "gsfw"
    loss: str = "logistic"
    reg_variant: str = "l1ball"
    delta: float = None
    mu: float = None
    rho: float = None
    schedule: str = "nonstrong"
    batch_fraction: float = None
    max_iters: int = 10000
    max_sg_calls: int = None
    gap_target: float = None
    eval_stride: int = None
    seed: int = 0

    def make_regularizer(self):
        try:
            return make_regularizer(self.reg_variant, self.delta, self.mu, self.rho)
        except ValueError as e:
            raise ConfigError(str(e))


@dataclass
class TraceRecord:
    """One benchmark sample; ``gap`` is always ``primal - dual``."""

    algo: str
    seed: int
    iter: int
    sg_calls: int
    loo_calls: int
    full_grad_calls: int
    primal: float
    dual: float
    gap: float
    wall_ns: int


def build_solver(config, ds):
    """Validate a config against a dataset and construct the solver.

    Returns (solver, loss, reg, schedule); raises ConfigError on any
    contract violation (strong schedule without strong convexity, simplex
    with a stochastic solver, batch smaller than one sample, ...).
    """
    if config.algo not in ALGOS:
        raise ConfigError("unknown algo %r" % config.algo)
    if config.loss not in ("logistic", "squared"):
        raise ConfigError("unknown loss %r" % config.loss)
    reg = config.make_regularizer()
    loss = make_loss(config.loss, ds.y)

    frac = config.batch_fraction
    if frac is None:
        frac = 1.0 / ds.n
    if not 0.0 < frac <= 1.0:
        raise ConfigError("batch_fraction must lie in (0, 1]")
    if frac * ds.n < 1.0 - 1e-12:
        raise ConfigError("batch_fraction * n must be >= 1")
    b = max(1, int(round(frac * ds.n)))

    if config.algo in ("gsfw", "rcmd") and isinstance(reg, Simplex):
        raise ConfigError(
            "simplex regularizer excludes the origin from its domain; "
            "the stochastic solvers require a feasible zero start"
        )
    if config.algo == "rcmd" and b != 1:
        raise ConfigError("the dual coordinate solver runs with batch size 1")

    schedule = None
    if config.algo in ("gsfw", "rcmd"):
        n_eff = _ceil_div(ds.n, b)
        if config.schedule == "nonstrong":
            schedule = Schedule("nonstrong", n_eff)
        elif config.schedule == "strong":
            mu = reg.strong_modulus
            if mu <= 0:
                raise ConfigError(
                    "strong schedule requires a strongly convex regularizer"
                )
            sigma = relative_smoothness(loss.gamma, ds.max_sq_row_norm, n_eff, mu)
            schedule = Schedule("strong", n_eff, sigma)
        else:
            raise ConfigError("unknown schedule %r" % config.schedule)

    if config.algo == "gsfw":
        solver = GsfwSolver(loss, reg, ds, schedule, batch_size=b, seed=config.seed)
    elif config.algo == "rcmd":
        solver = DualMirrorSolver(loss, reg, ds, schedule, seed=config.seed)
    elif config.algo == "fw":
        solver = FrankWolfeSolver(loss, reg, ds, seed=config.seed)
    elif config.algo == "sfw":
        solver = SfwSolver(loss, reg, ds, seed=config.seed)
    elif config.algo == "svrf":
        epoch = _ceil_div(ds.n, b)
        solver = SvrfSolver(loss, reg, ds, seed=config.seed, epoch_len=epoch)
    else:
        solver = ScgmSolver(loss, reg, ds, batch_size=b, seed=config.seed)
    return solver, loss, reg, schedule


def _ceil_div(a, b):
    return -(-a // b)


def run(config, ds, sink=None):
    """Execute one configured run, returning (and optionally streaming) the
    trace.  A record is emitted every ``eval_stride`` iterations and at
    termination; termination is budget exhaustion (iterations or sg calls)
    or the duality gap reaching ``gap_target``.

    The reported dual value is the one the convergence certificates are
    stated for: the schedule-averaged dual weights for the stochastic pair
    under the sublinear schedule, the current dual weights under the
    geometric schedule, and the optimal dual response at the current primal
    point for the purely primal methods.
    """
    solver, loss, reg, schedule = build_solver(config, ds)
    if config.max_iters < 1:
        raise ConfigError("max_iters must be >= 1")
    stride = config.eval_stride
    if stride is None:
        stride = max(1, config.max_iters // 200)
    if stride < 1:
        raise ConfigError("eval_stride must be >= 1")

    def dual_point():
        if isinstance(solver, (GsfwSolver, DualMirrorSolver)):
            if schedule.mode == "nonstrong":
                return solver.w_avg
            return solver.w
        return loss.derivs(ds.X @ solver.beta)

    def primal_point():
        if isinstance(solver, (GsfwSolver, DualMirrorSolver)):
            return solver.beta_bar
        return solver.beta

    trace = []
    start = time.perf_counter_ns()

    def emit():
        primal = metrics.primal_value(loss, reg, ds, primal_point())
        dual = metrics.dual_value(loss, reg, ds, dual_point())
        rec = TraceRecord(
            algo=config.algo,
            seed=config.seed,
            iter=solver.iter,
            sg_calls=solver.counters.sg_calls,
            loo_calls=solver.counters.loo_calls,
            full_grad_calls=solver.counters.full_grad_calls,
            primal=primal,
            dual=dual,
            gap=primal - dual,
            wall_ns=time.perf_counter_ns() - start,
        )
        trace.append(rec)
        if sink is not None:
            sink(rec)
        return rec

    while solver.iter < config.max_iters:
        solver.step()
        out_of_budget = (
            config.max_sg_calls is not None
            and solver.counters.sg_calls >= config.max_sg_calls
        )
        last = solver.iter >= config.max_iters or out_of_budget
        if solver.iter % stride == 0 or last:
            rec = emit()
            if config.gap_target is not None and rec.gap <= config.gap_target:
                break
        if out_of_budget:
            break
    return trace
