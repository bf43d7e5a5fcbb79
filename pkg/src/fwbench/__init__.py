"""Projection-free stochastic convex optimization with duality-gap
certificates, plus a reproducible benchmark harness.

The package solves ``min (1/n) sum_j l_j(x_j^T beta) + R(beta)`` for smooth
univariate losses over a bounded regularizer domain, using conditional
gradient methods built on an exact linear-minimization oracle.
"""

from .datasets import (
    Dataset,
    DatasetError,
    axpy_row,
    load_libsvm,
    mushrooms_like,
    parse_libsvm,
    row_dot,
    synth_dataset,
    synth_onehot_dataset,
    to_libsvm,
    weighted_columns,
)
from .losses import ConjugateDomainError, LogisticLoss, SquaredLoss, make_loss
from .metrics import (
    GapReport,
    bregman_radius,
    bregman_radius_logistic,
    dual_value,
    duality_gap,
    gap_bound_nonstrong,
    gap_bound_strong,
    gap_bound_strong_relaxed,
    primal_value,
)
from .regularizers import L1Ball, L2Ball, QuadBall, Regularizer, Simplex, make_regularizer
from .solvers import (
    ALGOS,
    CallCounters,
    ConfigError,
    DualMirrorSolver,
    FrankWolfeSolver,
    GsfwSolver,
    RunConfig,
    Schedule,
    ScgmSolver,
    SfwSolver,
    SvrfSolver,
    TraceRecord,
    alpha_nonstrong,
    alpha_strong,
    build_solver,
    draw_batch,
    eta_nonstrong,
    eta_strong,
    relative_smoothness,
    run,
)

__version__ = "0.1.0"
