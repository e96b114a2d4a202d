"""Synthetic sources, linear mixing and outlier injection."""

import math

import numpy as np

from .errors import DimensionMismatch, SingularMatrix
from .linalg import as_dataset, as_square, determinant, singular_tol
from .split_normal import SplitNormalParams, sn_sample

# sum and difference of two sources
SUM_DIFF_MIX = np.array([[1.0, 1.0], [1.0, -1.0]])


def mix(sources, A):
    """Observations ``x_i = A @ s_i`` for each row ``s_i`` of ``sources``."""
    S = as_dataset(sources)
    A = as_square(A)
    if A.shape[1] != S.shape[1]:
        raise DimensionMismatch("mixing matrix does not match the number of sources")
    if abs(determinant(A)) <= singular_tol(A):
        raise SingularMatrix("mixing matrix is singular")
    return S @ A.T


def gen_skew_sources(d, n, tau, seed):
    """``d`` independent ``SN(0, 1, tau_j**2)`` signals of length ``n`` as columns."""
    tau = np.broadcast_to(np.asarray(tau, dtype=np.float64), (d,))
    rng = np.random.default_rng(seed)
    cols = [sn_sample(SplitNormalParams(0.0, 1.0, float(t) ** 2), rng, n) for t in tau]
    return np.column_stack(cols)


def gen_logistic_sources(d, n, seed, scale=1.0):
    """Symmetric heavy-tailed sources for comparison runs."""
    return np.random.default_rng(seed).logistic(0.0, scale, size=(n, d))


def inject_outliers(X, fraction, seed):
    """Append ``ceil(fraction * n)`` rows uniform on the box ``[min - sd, max + sd]``.

    ``sd`` is the per-coordinate sample standard deviation (divisor ``n - 1``).
    The original rows are kept unchanged as a prefix.
    """
    X = as_dataset(X)
    if not 0 <= fraction <= 0.5:
        raise ValueError("fraction must lie in [0, 0.5]")
    n, d = X.shape
    k = math.ceil(round(fraction * n, 9))
    if k == 0:
        return X.copy()
    sd = X.std(axis=0, ddof=1) if n > 1 else np.zeros(d)
    lo = X.min(axis=0) - sd
    hi = X.max(axis=0) + sd
    rng = np.random.default_rng(seed)
    extra = lo + (hi - lo) * rng.random((k, d))
    return np.vstack([X, extra])


def make_experiment(n, tau, A, outliers=0.0, seed=0):
    """Sources, clean mixture and (possibly contaminated) mixture for one seeded run.

    Sources and outliers draw from independent child streams of ``seed``, so
    the clean part of the data does not depend on ``outliers``.
    """
    A = as_square(A)
    ss = np.random.SeedSequence(seed).spawn(2)
    S = gen_skew_sources(A.shape[0], n, tau, ss[0])
    X = mix(S, A)
    return S, X, inject_outliers(X, outliers, ss[1])
