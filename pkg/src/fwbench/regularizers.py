"""Bounded regularizers and their generalized linear-minimization oracles.

Every regularizer R solves ``min_beta c^T beta + R(beta)`` exactly and in
closed form (the oracle every solver here is built on), evaluates R itself,
its convex conjugate, and the instance constant bounding |x_j^T beta| over
the domain.  Tie-breaking is by lowest index everywhere so oracle output is
a deterministic function of its argument.
"""

import numpy as np

# Feasibility slack used only when *evaluating* R at a given point
# (diagnostics); oracle outputs are exactly feasible by construction.
_FEAS_TOL = 1e-9


class Regularizer:
    """Common surface: linear oracle, value, conjugate, domain constants."""

    strong_modulus = 0.0

    def linear_oracle(self, c):
        raise NotImplementedError

    def value(self, beta):
        raise NotImplementedError

    def max_abs_prediction(self, ds):
        raise NotImplementedError

    def conjugate(self, c):
        """R*(c) = sup_beta { c^T beta - R(beta) }, exact via the oracle."""
        c = np.asarray(c, dtype=np.float64)
        _check_finite(c)
        best = self.linear_oracle(-c)
        return float(c @ best - self.value(best))


def _check_finite(c):
    if not np.all(np.isfinite(c)):
        raise ValueError("oracle argument must be finite")


class L1Ball(Regularizer):
    """Indicator of the l1 ball of radius delta; oracle picks one signed vertex."""

    def __init__(self, delta):
        if not delta > 0:
            raise ValueError("delta must be positive")
        self.delta = float(delta)

    def linear_oracle(self, c):
        c = np.asarray(c, dtype=np.float64)
        _check_finite(c)
        out = np.zeros_like(c)
        k = int(np.argmax(np.abs(c)))
        if c[k] != 0.0:
            out[k] = -self.delta if c[k] > 0 else self.delta
        return out

    def value(self, beta):
        return 0.0 if np.abs(beta).sum() <= self.delta + _FEAS_TOL else np.inf

    def max_abs_prediction(self, ds):
        return self.delta * ds.max_row_inf

    def __repr__(self):
        return "L1Ball(delta=%g)" % self.delta


class L2Ball(Regularizer):
    """Indicator of the l2 ball of radius delta."""

    def __init__(self, delta):
        if not delta > 0:
            raise ValueError("delta must be positive")
        self.delta = float(delta)

    def linear_oracle(self, c):
        c = np.asarray(c, dtype=np.float64)
        _check_finite(c)
        norm = float(np.linalg.norm(c))
        if norm == 0.0:
            return np.zeros_like(c)
        return (-self.delta / norm) * c

    def value(self, beta):
        return 0.0 if np.linalg.norm(beta) <= self.delta + _FEAS_TOL else np.inf

    def max_abs_prediction(self, ds):
        return self.delta * ds.max_row_l2

    def __repr__(self):
        return "L2Ball(delta=%g)" % self.delta


class Simplex(Regularizer):
    """Indicator of the scaled simplex {beta >= 0, sum beta = delta}.

    The origin is not in the domain, so the stochastic solvers refuse this
    variant; it is provided for the oracle test suite and deterministic use.
    """

    def __init__(self, delta):
        if not delta > 0:
            raise ValueError("delta must be positive")
        self.delta = float(delta)

    def linear_oracle(self, c):
        c = np.asarray(c, dtype=np.float64)
        _check_finite(c)
        out = np.zeros_like(c)
        out[int(np.argmin(c))] = self.delta
        return out

    def value(self, beta):
        beta = np.asarray(beta, dtype=np.float64)
        if np.min(beta, initial=0.0) < -_FEAS_TOL:
            return np.inf
        if abs(beta.sum() - self.delta) > _FEAS_TOL:
            return np.inf
        return 0.0

    def max_abs_prediction(self, ds):
        return self.delta * float(np.max(np.abs(ds.data))) if ds.nnz else 0.0

    def __repr__(self):
        return "Simplex(delta=%g)" % self.delta


class QuadBall(Regularizer):
    """(mu/2)*||beta||^2 plus the indicator of the l2 ball of radius rho.

    The only strongly convex variant (modulus mu); enables the geometric
    step-size schedule and the linear convergence certificate.
    """

    def __init__(self, mu, rho):
        if not mu > 0 or not rho > 0:
            raise ValueError("mu and rho must be positive")
        self.mu = float(mu)
        self.rho = float(rho)

    @property
    def strong_modulus(self):
        return self.mu

    def linear_oracle(self, c):
        c = np.asarray(c, dtype=np.float64)
        _check_finite(c)
        norm = float(np.linalg.norm(c))
        if norm == 0.0:
            return np.zeros_like(c)
        if norm / self.mu <= self.rho:
            return -c / self.mu
        return (-self.rho / norm) * c

    def value(self, beta):
        beta = np.asarray(beta, dtype=np.float64)
        if np.linalg.norm(beta) > self.rho + _FEAS_TOL:
            return np.inf
        return float(0.5 * self.mu * (beta @ beta))

    def max_abs_prediction(self, ds):
        return self.rho * ds.max_row_l2

    def __repr__(self):
        return "QuadBall(mu=%g, rho=%g)" % (self.mu, self.rho)


def make_regularizer(variant, delta=None, mu=None, rho=None):
    """Build a regularizer from a config-style description."""
    variant = variant.lower()
    if variant == "l1ball":
        return L1Ball(_required(delta, "delta"))
    if variant == "l2ball":
        return L2Ball(_required(delta, "delta"))
    if variant == "simplex":
        return Simplex(_required(delta, "delta"))
    if variant == "quadball":
        return QuadBall(_required(mu, "mu"), _required(rho, "rho"))
    raise ValueError("unknown regularizer variant %r" % variant)


def _required(v, name):
    if v is None:
        raise ValueError("missing regularizer parameter %r" % name)
    return v
