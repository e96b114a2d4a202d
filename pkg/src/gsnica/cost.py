"""Profiled likelihood of the GSN model and its analytic gradient.

For data ``X`` and a candidate ``(m, W)`` let ``Z = (X - m) @ W``. For each
component ``j`` the squared projections are split by sign into ``s1[j]``
(``z <= 0``) and ``s2[j]`` (``z > 0``), and ``g[j] = s1**(1/3) + s2**(1/3)``.
Maximizing the likelihood over the scale parameters leaves the cost::

    ln l(X; m, W) = -(2/3) ln|det W| + sum_j ln g[j]

whose minimizers are the maximum-likelihood ``(m, W)``. The maximized
log-likelihood is ``(d n / 2) ln(2 n / (pi e)) - (3 n / 2) ln l``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateProjection, DimensionMismatch
from .linalg import as_dataset, as_square, inverse, log_abs_det


@dataclass(frozen=True)
class SuffStats:
    s1: np.ndarray
    s2: np.ndarray
    g: np.ndarray
    left_count: np.ndarray
    n: int
    degenerate: np.ndarray
    """True where ``s1`` or ``s2`` is at or below :func:`side_floor`."""

    @property
    def right_count(self):
        return self.n - self.left_count


@dataclass(frozen=True)
class Gradient:
    """Gradient of ``ln l``.

    ``d_W`` has the layout of ``W``: ``d_W[k, p]`` is the derivative with
    respect to entry ``k`` of column ``p``.
    """

    d_m: np.ndarray
    d_W: np.ndarray

    def flat(self):
        return np.concatenate([self.d_m, self.d_W.ravel()])


def side_floor(X):
    """Clamp level for one-sided sums: ``1e-12 * n * median coordinate variance``."""
    n = X.shape[0]
    med = float(np.median(np.var(X, axis=0)))
    return max(1e-12 * n * med, np.finfo(np.float64).tiny)


def _check(X, m, W):
    X = as_dataset(X)
    W = as_square(W)
    m = np.asarray(m, dtype=np.float64).ravel()
    d = X.shape[1]
    if m.size != d or W.shape[0] != d:
        raise DimensionMismatch("X, m and W dimensions disagree")
    return X, m, W


def _project(Xc, W):
    # sequential over the inner index so results do not depend on BLAS
    Z = Xc[:, :1] * W[0]
    for k in range(1, W.shape[0]):
        Z = Z + Xc[:, k:k + 1] * W[k]
    return Z


def _side_sums(Z):
    # cumsum reduces strictly in row order
    left = Z <= 0
    sq = Z * Z
    lsq = sq * left
    s1 = np.cumsum(lsq, axis=0)[-1]
    s2 = np.cumsum(sq - lsq, axis=0)[-1]
    return left, s1, s2


def suff_stats(X, m, W):
    """Per-component one-sided sums of squared projections.

    Projections equal to zero count as left. Sums are returned unclamped;
    ``degenerate`` marks components with a side at or below the floor.
    """
    X, m, W = _check(X, m, W)
    Z = _project(X - m, W)
    left, s1, s2 = _side_sums(Z)
    floor = side_floor(X)
    return SuffStats(
        s1=s1,
        s2=s2,
        g=np.cbrt(s1) + np.cbrt(s2),
        left_count=left.sum(axis=0),
        n=X.shape[0],
        degenerate=(s1 <= floor) | (s2 <= floor),
    )


class Objective:
    """``ln l`` bound to one dataset, with validation and the floor done once.

    ``floor`` overrides :func:`side_floor`, e.g. when ``X`` is a transformed
    copy of the data whose floor should still apply. It may be a scalar or
    one value per component.
    """

    def __init__(self, X, floor=None):
        self.X = as_dataset(X)
        self.n, self.d = self.X.shape
        self.floor = side_floor(self.X) if floor is None else np.asarray(floor, dtype=np.float64)

    def _sums(self, m, W):
        Xc = self.X - m
        Z = _project(Xc, W)
        left, s1, s2 = _side_sums(Z)
        return Xc, Z, left, s1, s2

    def value(self, m, W, strict=False):
        """``ln l`` at ``(m, W)``; ``strict`` rejects any floored side."""
        _, _, _, s1, s2 = self._sums(m, W)
        floor = self.floor
        if strict and np.any((s1 <= floor) | (s2 <= floor)):
            raise DegenerateProjection("a component hyperplane has an empty side")
        if np.any((s1 <= floor) & (s2 <= floor)):
            raise DegenerateProjection("all projections vanish on some component")
        s1 = np.maximum(s1, floor)
        s2 = np.maximum(s2, floor)
        return -2.0 / 3.0 * log_abs_det(W) + float(np.sum(np.log(np.cbrt(s1) + np.cbrt(s2))))

    def value_and_grad(self, m, W):
        Xc, Z, left, s1, s2 = self._sums(m, W)
        if np.any((s1 <= self.floor) | (s2 <= self.floor)):
            raise DegenerateProjection("a component hyperplane has an empty side")
        c1, c2 = np.cbrt(s1), np.cbrt(s2)
        g = c1 + c2
        value = -2.0 / 3.0 * log_abs_det(W) + float(np.sum(np.log(g)))
        # d ln g_p / d z_ip = (2/3) z_ip s_side^(-2/3) / g_p
        coef = np.where(left, 1.0 / (c1 * c1), 1.0 / (c2 * c2)) * (2.0 / 3.0) / g
        weights = Z * coef
        d_W = -2.0 / 3.0 * inverse(W).T + Xc.T @ weights
        d_m = -(W @ weights.sum(axis=0))
        return value, Gradient(d_m=d_m, d_W=d_W)


def cost_log_l(X, m, W):
    """``ln l(X; m, W)``.

    One-sided sums below the floor are clamped up to it. Raises
    :class:`DegenerateProjection` when both sides of a component are
    floored, and :class:`SingularMatrix` for singular ``W``.
    """
    X, m, W = _check(X, m, W)
    return Objective(X).value(m, W)


def sigma_tau_hat(stats, W=None, n=None):
    """Closed-form maximizers ``(sigma2_hat, tau_hat)`` at fixed ``(m, W)``.

    ``W`` is accepted for call-site symmetry and not used.
    """
    if np.any(stats.degenerate):
        raise DegenerateProjection("a component hyperplane has an empty side")
    n = stats.n if n is None else n
    c1 = np.cbrt(stats.s1)
    c2 = np.cbrt(stats.s2)
    return c1 * c1 * stats.g / n, c2 / c1


def profiled_log_likelihood(X, m, W):
    """Log-likelihood maximized over ``sigma`` and ``tau``."""
    X, m, W = _check(X, m, W)
    n, d = X.shape
    return 0.5 * d * n * math.log(2.0 * n / (math.pi * math.e)) - 1.5 * n * cost_log_l(X, m, W)


def value_and_grad(X, m, W):
    """Return ``(ln l, Gradient)`` sharing one pass over the data.

    The gradient is taken under the current sign partition of the
    projections. ``ln l`` is continuously differentiable away from
    degenerate configurations, so this is the true gradient there.
    Raises :class:`DegenerateProjection` if any side is at the floor.
    """
    X, m, W = _check(X, m, W)
    return Objective(X).value_and_grad(m, W)


def grad(X, m, W):
    return value_and_grad(X, m, W)[1]
