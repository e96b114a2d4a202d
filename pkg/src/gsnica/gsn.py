"""Multivariate General Split Normal density and sampler.

Component ``j`` of an observation ``x`` is ``z_j = W[:, j] @ (x - m)``; the
components are independent Split Normals with mode 0, left scale
``sigma[j]`` and right/left ratio ``tau[j]``. The density carries the
Jacobian factor ``|det(W)|``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SingularMatrix
from .linalg import as_square, determinant, log_abs_det, singular_tol
from .split_normal import LOG_SQRT_2_OVER_PI


@dataclass(frozen=True)
class GsnParams:
    """Parameters of a GSN distribution; ``sigma`` and ``tau`` are linear scales."""

    m: np.ndarray
    W: np.ndarray
    sigma: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=np.float64).ravel()
        W = as_square(self.W)
        sigma = np.asarray(self.sigma, dtype=np.float64).ravel()
        tau = np.asarray(self.tau, dtype=np.float64).ravel()
        d = m.size
        if W.shape != (d, d) or sigma.size != d or tau.size != d:
            raise DimensionMismatch("inconsistent GSN parameter dimensions")
        if np.any(sigma <= 0) or np.any(tau <= 0):
            raise ValueError("sigma and tau must be positive")
        if abs(determinant(W)) <= singular_tol(W):
            raise SingularMatrix("unmixing matrix is singular")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "tau", tau)

    @property
    def d(self):
        return self.m.size

    def components(self, X):
        """Project observations onto the component axes, ``(X - m) @ W``."""
        return (np.atleast_2d(X) - self.m) @ self.W


def gsn_logpdf(x, p):
    """Log-density at one point ``(d,)`` or at each row of ``(n, d)``."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    Z = p.components(x)
    scale = np.where(Z <= 0, p.sigma, p.sigma * p.tau)
    log_c = LOG_SQRT_2_OVER_PI - np.log(p.sigma) - np.log1p(p.tau)
    out = log_abs_det(p.W) + np.sum(log_c - 0.5 * (Z / scale) ** 2, axis=1)
    return float(out[0]) if single else out


def gsn_sample(p, rng, count):
    """Draw ``count`` observations as ``m + inv(W.T) @ z`` with independent SN components."""
    if count < 1:
        raise ValueError("count must be >= 1")
    if abs(determinant(p.W)) <= singular_tol(p.W):
        raise SingularMatrix("unmixing matrix is singular")
    d = p.d
    left = rng.random((count, d)) < 1.0 / (1.0 + p.tau)
    mag = np.abs(rng.standard_normal((count, d))) * p.sigma
    Z = np.where(left, -mag, p.tau * mag)
    # rows: x = m + z @ inv(W)
    return p.m + np.linalg.solve(p.W.T, Z.T).T
