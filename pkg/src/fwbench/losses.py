"""Univariate loss families with derivatives, convex conjugates, and smoothness
constants.  Each family exposes per-sample scalar operations plus vectorized
forms over all n samples; the conjugate pair is the basis of the dual solver
and of every duality-gap certificate.
"""

import numpy as np
from scipy import special

# Slack allowed when checking conjugate-domain membership; protects against
# harmless rounding without hiding genuinely out-of-domain arguments.
_DOMAIN_TOL = 1e-12


class ConjugateDomainError(ValueError):
    """Argument outside the domain of a conjugate loss."""


class LogisticLoss:
    """Binary logistic loss ln(1 + exp(-y*s)), 1/4-smooth.

    The conjugate is the negative binary entropy a*ln(a) + (1-a)*ln(1-a)
    with a = -y*w, finite exactly on 0 <= a <= 1 (with 0*ln(0) = 0); its
    derivative is the logit map, defined on the open interior only.
    All forms are overflow-safe for arbitrarily large |s|.
    """

    kind = "logistic"
    gamma = 0.25

    def __init__(self, y):
        y = np.ascontiguousarray(y, dtype=np.float64)
        if y.ndim != 1 or y.size < 1:
            raise ValueError("labels must be a nonempty vector")
        if not np.all(np.abs(y) == 1.0):
            raise ValueError("logistic loss needs labels in {-1, +1}")
        self.y = y
        self.y.flags.writeable = False
        self.n = y.size

    # vectorized forms -------------------------------------------------
    def values(self, s):
        return np.logaddexp(0.0, -self.y * s)

    def derivs(self, s):
        return -self.y * special.expit(-self.y * s)

    def derivs_at(self, idx, s_vals):
        yb = self.y[idx]
        return -yb * special.expit(-yb * s_vals)

    def conj_values(self, w):
        a = -self.y * np.asarray(w, dtype=np.float64)
        if np.any(a < -_DOMAIN_TOL) or np.any(a > 1.0 + _DOMAIN_TOL):
            raise ConjugateDomainError("conjugate argument outside 0 <= -y*w <= 1")
        a = np.clip(a, 0.0, 1.0)
        return special.xlogy(a, a) + special.xlogy(1.0 - a, 1.0 - a)

    def conj_derivs(self, w):
        a = -self.y * np.asarray(w, dtype=np.float64)
        if np.any(a <= 0.0) or np.any(a >= 1.0):
            raise ConjugateDomainError(
                "conjugate derivative defined on the open interior 0 < -y*w < 1"
            )
        return -self.y * special.logit(a)

    def conj_derivs_at(self, idx, w_vals):
        yb = self.y[idx]
        a = -yb * np.asarray(w_vals, dtype=np.float64)
        if np.any(a <= 0.0) or np.any(a >= 1.0):
            raise ConjugateDomainError(
                "conjugate derivative defined on the open interior 0 < -y*w < 1"
            )
        return -yb * special.logit(a)

    # per-sample scalar forms -------------------------------------------
    def value(self, j, s):
        return float(np.logaddexp(0.0, -self.y[j] * s))

    def deriv(self, j, s):
        return float(-self.y[j] * special.expit(-self.y[j] * s))

    def conj_value(self, j, w):
        a = -self.y[j] * w
        if a < -_DOMAIN_TOL or a > 1.0 + _DOMAIN_TOL:
            raise ConjugateDomainError("conjugate argument outside 0 <= -y*w <= 1")
        a = min(max(a, 0.0), 1.0)
        return float(special.xlogy(a, a) + special.xlogy(1.0 - a, 1.0 - a))

    def conj_deriv(self, j, w):
        a = -self.y[j] * w
        if a <= 0.0 or a >= 1.0:
            raise ConjugateDomainError(
                "conjugate derivative defined on the open interior 0 < -y*w < 1"
            )
        return float(-self.y[j] * special.logit(a))

    def total(self, s):
        return float(self.values(s).sum())

    def total_conj(self, w):
        return float(self.conj_values(w).sum())


class SquaredLoss:
    """Squared loss 0.5*(s - y)^2, 1-smooth; conjugate 0.5*w^2 + y*w on all reals."""

    kind = "squared"
    gamma = 1.0

    def __init__(self, y):
        y = np.ascontiguousarray(y, dtype=np.float64)
        if y.ndim != 1 or y.size < 1:
            raise ValueError("labels must be a nonempty vector")
        self.y = y
        self.y.flags.writeable = False
        self.n = y.size

    def values(self, s):
        return 0.5 * (s - self.y) ** 2

    def derivs(self, s):
        return s - self.y

    def derivs_at(self, idx, s_vals):
        return s_vals - self.y[idx]

    def conj_values(self, w):
        w = np.asarray(w, dtype=np.float64)
        return 0.5 * w ** 2 + self.y * w

    def conj_derivs(self, w):
        return np.asarray(w, dtype=np.float64) + self.y

    def conj_derivs_at(self, idx, w_vals):
        return np.asarray(w_vals, dtype=np.float64) + self.y[idx]

    def value(self, j, s):
        return float(0.5 * (s - self.y[j]) ** 2)

    def deriv(self, j, s):
        return float(s - self.y[j])

    def conj_value(self, j, w):
        return float(0.5 * w * w + self.y[j] * w)

    def conj_deriv(self, j, w):
        return float(w + self.y[j])

    def total(self, s):
        return float(self.values(s).sum())

    def total_conj(self, w):
        return float(self.conj_values(w).sum())


def make_loss(kind, y):
    """Loss family for the given kind ("logistic" or "squared") and labels."""
    if kind == "logistic":
        return LogisticLoss(y)
    if kind == "squared":
        return SquaredLoss(y)
    raise ValueError("unknown loss kind %r" % kind)
