"""Small dense linear algebra and dataset helpers.

Datasets are ``(n, d)`` float arrays with one observation per row. Matrices
are square ``(d, d)`` arrays; column ``j`` of an unmixing matrix is the
projection vector of component ``j``.
"""

import numpy as np

from .errors import DegenerateData, DimensionMismatch, InsufficientData, SingularMatrix


def as_dataset(X, min_rows=1):
    """Validate and convert ``X`` to a 2-D float64 array of shape ``(n, d)``.

    A 1-D input is treated as ``n`` observations of a scalar.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.ndim != 2:
        raise DimensionMismatch(f"dataset must be 2-D, got shape {X.shape}")
    n, d = X.shape
    if d < 1:
        raise DimensionMismatch("dataset needs at least one column")
    if n < min_rows:
        raise InsufficientData(f"need at least {min_rows} rows, got {n}")
    if not np.all(np.isfinite(X)):
        raise DegenerateData("dataset contains non-finite entries")
    return X


def as_square(M):
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    return M


def singular_tol(M):
    """Scale-aware threshold below which ``|det(M)|`` counts as singular."""
    M = np.asarray(M, dtype=np.float64)
    scale = max(1.0, float(np.max(np.abs(M)))) if M.size else 1.0
    return 1e-12 * scale ** M.shape[0]


def determinant(M):
    """Determinant by Gaussian elimination with partial pivoting.

    Returns 0.0 for exactly singular input rather than raising.
    """
    A = as_square(M).copy()
    d = A.shape[0]
    det = 1.0
    for k in range(d):
        p = k + int(np.argmax(np.abs(A[k:, k])))
        if A[p, k] == 0.0:
            return 0.0
        if p != k:
            A[[k, p]] = A[[p, k]]
            det = -det
        det *= A[k, k]
        if k + 1 < d:
            factors = A[k + 1:, k] / A[k, k]
            A[k + 1:, k:] -= np.outer(factors, A[k, k:])
    return float(det)


def log_abs_det(M):
    """``ln|det(M)|``; raises :class:`SingularMatrix` below :func:`singular_tol`."""
    M = as_square(M)
    sign, logdet = np.linalg.slogdet(M)
    if sign == 0 or logdet <= np.log(singular_tol(M)):
        raise SingularMatrix("matrix is singular to working precision")
    return float(logdet)


def inverse(M):
    M = as_square(M)
    if abs(determinant(M)) <= singular_tol(M):
        raise SingularMatrix("matrix is singular to working precision")
    return np.linalg.inv(M)


def mean(X):
    X = as_dataset(X)
    return X.sum(axis=0) / X.shape[0]


def covariance(X):
    """Unbiased sample covariance (divisor ``n - 1``)."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] < 2:
        raise InsufficientData("covariance needs at least two rows")
    X = as_dataset(X, min_rows=2)
    Xc = X - mean(X)
    return Xc.T @ Xc / (X.shape[0] - 1)


def inv_sqrt_psd(C):
    """Inverse principal square root of a symmetric positive definite matrix."""
    C = as_square(C)
    vals, vecs = np.linalg.eigh((C + C.T) / 2)
    if vals[0] <= 1e-12 * max(1.0, vals[-1]):
        raise DegenerateData("covariance is not positive definite")
    return (vecs / np.sqrt(vals)) @ vecs.T


def whitening_pair(C):
    """``(C**-0.5, C**0.5)`` for a symmetric positive definite ``C``."""
    C = as_square(C)
    vals, vecs = np.linalg.eigh((C + C.T) / 2)
    if vals[0] <= 1e-12 * max(1.0, vals[-1]):
        raise DegenerateData("covariance is not positive definite")
    root = np.sqrt(vals)
    return (vecs / root) @ vecs.T, (vecs * root) @ vecs.T


def random_rotation(d, rng):
    """Haar-distributed orthogonal matrix with determinant +1."""
    Q, R = np.linalg.qr(rng.standard_normal((d, d)))
    Q = Q * np.sign(np.diag(R))
    if np.linalg.det(Q) < 0:
        Q[:, 0] = -Q[:, 0]
    return Q
