"""Gradient descent on the profiled GSN cost.

Each restart starts from ``m = mean(X)`` and an initial unmixing matrix,
then takes Armijo-backtracked steps along the negative gradient of
``ln l`` jointly in ``(m, W)``. The restart with the lowest final cost wins
and the scale parameters are recovered in closed form.

Descent runs on whitened data ``Y = (X - mu) P`` with ``P = cov(X)**-0.5``.
A point ``(m_y, W_y)`` there is ``(mu + P^-1 m_y, P W_y)`` for ``X`` and the
costs differ by the constant ``(2/3) ln det P``, so this only changes the
conditioning of the descent, not its fixed points.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .cost import Objective, cost_log_l, side_floor, sigma_tau_hat, suff_stats, value_and_grad
from .errors import DegenerateData, DegenerateProjection, InsufficientData, NonFiniteObjective, SingularMatrix
from .gsn import GsnParams
from .linalg import as_dataset, covariance, inv_sqrt_psd, mean, random_rotation, whitening_pair

logger = logging.getLogger(__name__)

INIT_MODES = ("paper", "whiten", "random")


@dataclass(frozen=True)
class FitConfig:
    max_iter: int = 2000
    grad_tol: float = 1e-7
    rel_obj_tol: float = 1e-10
    restarts: int = 4
    init_mode: str = "paper"
    seed: int = 0
    step0: float = 1.0
    armijo_c: float = 1e-4
    backtrack: float = 0.5
    max_backtracks: int = 60

    def __post_init__(self):
        if self.init_mode not in INIT_MODES:
            raise ValueError(f"init_mode must be one of {INIT_MODES}")
        if self.max_iter < 0:
            raise ValueError("max_iter must be >= 0")
        if self.grad_tol <= 0 or self.rel_obj_tol <= 0 or self.step0 <= 0 or self.armijo_c <= 0:
            raise ValueError("tolerances and step sizes must be positive")
        if not 0 < self.backtrack < 1:
            raise ValueError("backtrack must lie in (0, 1)")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")


@dataclass
class FitResult:
    params: GsnParams
    final_log_l: float
    iterations: int
    converged: bool
    restart_index: int
    trace: list = field(default_factory=list)
    """``(iteration, ln l, inf-norm of gradient)`` per iteration of the winning restart."""
    restart_log_l: list = field(default_factory=list)

    def unmix(self, X):
        """Recovered sources ``(X - m) @ W``, one column per component."""
        return self.params.components(X)


def initial_point(X, mode, rng=None):
    """Starting ``(m, W)`` for one restart.

    ``paper`` uses the sample covariance itself as the unmixing matrix,
    ``whiten`` its inverse square root and ``random`` a random rotation of
    the whitening matrix.
    """
    m0 = mean(X)
    C = covariance(X)
    if mode == "paper":
        W0 = C.copy()
    elif mode == "whiten":
        W0 = inv_sqrt_psd(C)
    elif mode == "random":
        if rng is None:
            raise ValueError("random init needs a generator")
        W0 = inv_sqrt_psd(C) @ random_rotation(C.shape[0], rng)
    else:
        raise ValueError(f"unknown init mode {mode!r}")
    return m0, W0


def _safe_cost(obj, m, W):
    # trial points that are singular, one-sided or non-finite are rejected
    try:
        v = obj.value(m, W, strict=True)
    except (SingularMatrix, DegenerateProjection):
        return math.inf
    return v if math.isfinite(v) else math.inf


def descend(X, m, W, cfg, floor=None):
    """Run one gradient descent from ``(m, W)`` in the coordinates of ``X``.

    Every iteration moves along the negative gradient with a step accepted
    by the Armijo rule ``f_new <= f - c * t * |grad|^2``. The first trial
    step is ``cfg.step0``; later ones use the Barzilai-Borwein estimate
    ``s.s / s.y`` from the previous move and are backtracked from there.

    Returns ``(m, W, ln l, iterations, converged, trace)``.
    """
    obj = Objective(X, floor)
    d = obj.d
    try:
        f, g = obj.value_and_grad(m, W)
    except (SingularMatrix, DegenerateProjection) as exc:
        raise NonFiniteObjective(f"initial point is not admissible: {exc}") from exc
    if not math.isfinite(f):
        raise NonFiniteObjective("objective is not finite at the initial point")

    theta = np.concatenate([m, W.ravel()])
    gflat = g.flat()
    trace = []
    converged = False
    prev = None
    it = 0
    while it < cfg.max_iter:
        gnorm = float(np.max(np.abs(gflat)))
        trace.append((it, f, gnorm))
        if gnorm < cfg.grad_tol:
            converged = True
            break
        g2 = float(gflat @ gflat)
        if prev is None:
            t = cfg.step0
        else:
            s_vec, y_vec, t_last = prev
            sy = float(s_vec @ y_vec)
            t = float(s_vec @ s_vec) / sy if sy > 0 else t_last / cfg.backtrack
        for _ in range(cfg.max_backtracks):
            trial = theta - t * gflat
            f_new = _safe_cost(obj, trial[:d], trial[d:].reshape(d, d))
            if f_new <= f - cfg.armijo_c * t * g2:
                break
            t *= cfg.backtrack
        else:
            # no admissible decrease even for tiny steps
            converged = True
            logger.debug("line search exhausted at iteration %d", it)
            break
        f_old = f
        f, g = obj.value_and_grad(trial[:d], trial[d:].reshape(d, d))
        g_new = g.flat()
        prev = (trial - theta, g_new - gflat, t)
        theta, gflat = trial, g_new
        it += 1
        if abs(f_old - f) <= cfg.rel_obj_tol * max(1.0, abs(f)):
            converged = True
            break
    if not trace or trace[-1][0] != it:
        trace.append((it, f, float(np.max(np.abs(gflat)))))
    return theta[:d].copy(), theta[d:].reshape(d, d).copy(), f, it, converged, trace


def fit_ica(X, cfg=None):
    """Fit a GSN model to ``X`` by minimizing the profiled cost.

    Restart 0 starts from the configured initialization; later restarts
    rotate its unmixing matrix by independent random rotations drawn from
    sub-seeds of ``cfg.seed``. Trace costs are reported for ``X``; gradient
    norms are those of the whitened problem the descent actually runs on.
    """
    cfg = FitConfig() if cfg is None else cfg
    X = as_dataset(X)
    n, d = X.shape
    if n < d + 2:
        raise InsufficientData(f"need at least d + 2 = {d + 2} observations, got {n}")
    if np.any(np.ptp(X, axis=0) == 0):
        raise DegenerateData("some coordinate is constant")

    mu = mean(X)
    P, P_inv = whitening_pair(covariance(X))
    Y = (X - mu) @ P
    floor = side_floor(X)
    offset = -2.0 / 3.0 * math.log(abs(np.linalg.det(P)))

    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best = None
    restart_log_l = []
    for r, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        m0, W0 = initial_point(X, cfg.init_mode, rng)
        if r > 0:
            W0 = W0 @ random_rotation(d, rng)
        # ln l ignores column scale; unit columns condition the descent
        Wy = P_inv @ W0
        norms = np.linalg.norm(Wy, axis=0)
        Wy = Wy / norms
        # side sums for X are the working ones times norms**2
        my, Wy, f, it, conv, trace = descend(Y, P @ (m0 - mu), Wy, cfg, floor / norms**2)
        f += offset
        trace = [(k, v + offset, gn) for k, v, gn in trace]
        restart_log_l.append(f)
        logger.info("restart %d: ln l = %.10g after %d iterations (converged=%s)", r, f, it, conv)
        if best is None or f < best[2]:
            best = (mu + P_inv @ my, (P @ Wy) * norms, f, it, conv, trace, r)

    m, W, f, it, conv, trace, r = best
    stats = suff_stats(X, m, W)
    sigma2, tau = sigma_tau_hat(stats, W, n)
    params = GsnParams(m=m, W=W, sigma=np.sqrt(sigma2), tau=tau)
    return FitResult(
        params=params,
        final_log_l=f,
        iterations=it,
        converged=conv,
        restart_index=r,
        trace=trace,
        restart_log_l=restart_log_l,
    )


def gradcheck(X, m, W, h=1e-6):
    """Compare the analytic gradient with central differences of ``ln l``.

    The step for parameter ``i`` is ``h * max(1, |theta_i|)``. The relative
    error per entry is ``|a - b| / max(|a|, |b|, 1e-8 * max(1, |a|_inf))``.
    """
    X = as_dataset(X)
    m = np.asarray(m, dtype=np.float64).ravel()
    W = np.asarray(W, dtype=np.float64)
    d = m.size
    analytic = value_and_grad(X, m, W)[1].flat()
    theta = np.concatenate([m, W.ravel()])
    numeric = np.empty_like(theta)
    for i in range(theta.size):
        step = h * max(1.0, abs(theta[i]))
        tp, tm = theta.copy(), theta.copy()
        tp[i] += step
        tm[i] -= step
        fp = cost_log_l(X, tp[:d], tp[d:].reshape(d, d))
        fm = cost_log_l(X, tm[:d], tm[d:].reshape(d, d))
        numeric[i] = (fp - fm) / (tp[i] - tm[i])
    floor = 1e-8 * max(1.0, float(np.max(np.abs(analytic))))
    rel = np.abs(analytic - numeric) / np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), floor)
    return {
        "analytic": analytic,
        "numeric": numeric,
        "rel_error": rel,
        "max_rel_error": float(np.max(rel)),
    }
