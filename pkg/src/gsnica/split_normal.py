"""One-dimensional Split Normal distribution.

The density joins the left half of ``N(m, sigma2)`` with the right half of
``N(m, tau2 * sigma2)`` at the common mode ``m``::

    SN(x; m, sigma2, tau2) = c * exp(-(x - m)**2 / (2 * sigma2))          x <= m
                           = c * exp(-(x - m)**2 / (2 * tau2 * sigma2))   x >  m

with ``c = sqrt(2 / pi) / (sigma * (1 + tau))``.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateData, InsufficientData

logger = logging.getLogger(__name__)

LOG_SQRT_2_OVER_PI = 0.5 * math.log(2.0 / math.pi)
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SplitNormalParams:
    m: float
    sigma2: float
    tau2: float

    def __post_init__(self):
        for name in ("m", "sigma2", "tau2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.sigma2 <= 0 or self.tau2 <= 0:
            raise ValueError("sigma2 and tau2 must be positive")

    @property
    def sigma(self):
        return math.sqrt(self.sigma2)

    @property
    def tau(self):
        return math.sqrt(self.tau2)

    def mean(self):
        return self.m + self.sigma * math.sqrt(2.0 / math.pi) * (self.tau - 1.0)

    def left_mass(self):
        """Probability of ``x <= m``."""
        return 1.0 / (1.0 + self.tau)


def sn_logpdf(x, p):
    x = np.asarray(x, dtype=np.float64)
    dx = x - p.m
    scale2 = np.where(dx <= 0, p.sigma2, p.tau2 * p.sigma2)
    log_c = LOG_SQRT_2_OVER_PI - 0.5 * math.log(p.sigma2) - math.log1p(p.tau)
    out = log_c - dx * dx / (2.0 * scale2)
    return out[()] if out.ndim == 0 else out


def sn_pdf(x, p):
    return np.exp(sn_logpdf(x, p))


def sn_sample(p, rng, count):
    """Draw ``count`` samples as a two-sided half-normal mixture.

    The left half is chosen with probability ``1 / (1 + tau)``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    left = rng.random(count) < p.left_mass()
    mag = np.abs(rng.standard_normal(count)) * p.sigma
    return np.where(left, p.m - mag, p.m + p.tau * mag)


def side_sums(xs, m):
    """Left/right sums of squared deviations; ``x == m`` counts as left."""
    dx = np.asarray(xs, dtype=np.float64) - m
    left = dx <= 0
    sq = dx * dx
    return float(np.sum(sq[left])), float(np.sum(sq[~left]))


def profiled_params(xs, m):
    """Closed-form maximizers of ``sigma2`` and ``tau2`` for a fixed mode ``m``."""
    n = len(xs)
    s1, s2 = side_sums(xs, m)
    if s1 <= 0 or s2 <= 0:
        raise DegenerateData("one side of the mode is empty")
    c1, c2 = np.cbrt(s1), np.cbrt(s2)
    g = c1 + c2
    return SplitNormalParams(m=float(m), sigma2=float(c1 * c1 * g / n), tau2=float((c2 / c1) ** 2))


def _profile_objective(xs, m):
    s1, s2 = side_sums(xs, m)
    return math.log(np.cbrt(s1) + np.cbrt(s2))


def _profile_slope_sign(xs, m):
    # sign of d/dm ln g; a side with zero mass contributes no slope term
    dx = xs - m
    left = dx <= 0
    s1 = float(np.sum(dx[left] ** 2))
    s2 = float(np.sum(dx[~left] ** 2))
    slope = 0.0
    if s1 > 0:
        slope -= float(np.sum(dx[left])) / s1 ** (2.0 / 3.0)
    if s2 > 0:
        slope -= float(np.sum(dx[~left])) / s2 ** (2.0 / 3.0)
    return np.sign(slope)


def _bisect_slope(xs, a, b):
    while True:
        mid = 0.5 * (a + b)
        if mid <= a or mid >= b:
            return mid
        s = _profile_slope_sign(xs, mid)
        if s == 0:
            return mid
        if s < 0:
            a = mid
        else:
            b = mid


def sn_fit_1d(xs, grid_size=512):
    """Maximum-likelihood Split Normal fit.

    The scale parameters are profiled out in closed form, leaving
    ``ln(s1**(1/3) + s2**(1/3))`` to be minimized over the mode. The mode is
    located by a grid pre-scan over ``[min(xs), max(xs)]``, golden-section
    refinement inside the best grid cell, and a final bisection on the sign
    of the profile slope.
    """
    xs = np.asarray(xs, dtype=np.float64).ravel()
    if xs.size < 3:
        raise InsufficientData("sn_fit_1d needs at least 3 points")
    if not np.all(np.isfinite(xs)):
        raise DegenerateData("non-finite data")
    lo, hi = float(xs.min()), float(xs.max())
    if hi == lo:
        raise DegenerateData("data are constant")

    grid = np.linspace(lo, hi, grid_size + 1)
    # endpoints leave one side empty; keep them out of the candidate set
    vals = [math.inf] + [_profile_objective(xs, g) for g in grid[1:-1]] + [math.inf]
    k = int(np.argmin(vals))
    a, b = grid[k - 1], grid[k + 1]

    tol = 1e-8 * (hi - lo)
    c = b - _INV_PHI * (b - a)
    e = a + _INV_PHI * (b - a)
    fc, fe = _profile_objective(xs, c), _profile_objective(xs, e)
    while b - a > tol:
        if fc <= fe:
            b, e, fe = e, c, fc
            c = b - _INV_PHI * (b - a)
            fc = _profile_objective(xs, c)
        else:
            a, c, fc = c, e, fe
            e = a + _INV_PHI * (b - a)
            fe = _profile_objective(xs, e)

    m = 0.5 * (a + b)
    if k in (1, grid_size - 1):
        # the profile keeps falling towards the data edge, where one side empties
        logger.warning("split normal fit: likelihood increases towards the edge of the data")
        return profiled_params(xs, m)
    # near a flat minimum golden-section cannot resolve function differences,
    # so polish by bisection on the slope sign (golden bracket, else grid cell)
    for a, b in ((a, b), (grid[k - 1], grid[k + 1])):
        if _profile_slope_sign(xs, a) < 0 < _profile_slope_sign(xs, b):
            m = _bisect_slope(xs, a, b)
            break
    return profiled_params(xs, m)
