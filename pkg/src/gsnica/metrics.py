"""Tucker's congruence coefficient and optimal source matching."""

import itertools
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DimensionMismatch, ZeroVector

EXHAUSTIVE_MAX_D = 8


def tucker_congruence(s, t):
    """Uncentered cosine similarity of two signals, in ``[-1, 1]``."""
    s = np.asarray(s, dtype=np.float64).ravel()
    t = np.asarray(t, dtype=np.float64).ravel()
    if s.size != t.size:
        raise DimensionMismatch("signals differ in length")
    ns, nt = np.linalg.norm(s), np.linalg.norm(t)
    if ns == 0 or nt == 0:
        raise ZeroVector("congruence is undefined for a zero signal")
    return float(np.clip((s / ns) @ (t / nt), -1.0, 1.0))


def congruence_matrix(recovered, reference):
    """``C[i, j] = Cr(recovered[:, i], reference[:, j])`` for column signals."""
    R = np.asarray(recovered, dtype=np.float64)
    T = np.asarray(reference, dtype=np.float64)
    if R.ndim == 1:
        R = R[:, None]
    if T.ndim == 1:
        T = T[:, None]
    if R.shape != T.shape:
        raise DimensionMismatch(f"shapes differ: {R.shape} vs {T.shape}")
    nr = np.linalg.norm(R, axis=0)
    nt = np.linalg.norm(T, axis=0)
    if np.any(nr == 0) or np.any(nt == 0):
        raise ZeroVector("congruence is undefined for a zero signal")
    return np.clip((R / nr).T @ (T / nt), -1.0, 1.0)


def best_assignment(score):
    """Permutation ``perm`` maximizing ``sum(score[i, perm[i]])``.

    Exhaustive for small ``d`` (ties go to the lexicographically first
    permutation), Hungarian reduction otherwise.
    """
    score = np.asarray(score, dtype=np.float64)
    d = score.shape[0]
    if d <= EXHAUSTIVE_MAX_D:
        rows = np.arange(d)
        best, best_val = None, -np.inf
        for perm in itertools.permutations(range(d)):
            val = score[rows, perm].sum()
            if val > best_val:
                best, best_val = perm, val
        return np.array(best)
    _, cols = linear_sum_assignment(score, maximize=True)
    return cols


@dataclass(frozen=True)
class CongruenceReport:
    matching: np.ndarray
    """``matching[i]`` is the reference index paired with recovered signal ``i``."""
    scores: np.ndarray
    signed: np.ndarray

    @property
    def mean_abs(self):
        return float(np.mean(self.scores))

    def to_dict(self):
        return {
            "matching": [int(j) for j in self.matching],
            "scores": [float(v) for v in self.scores],
            "signed": [float(v) for v in self.signed],
            "mean_abs": self.mean_abs,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2)

    def to_table(self):
        lines = [f"{'recovered':>9}  {'reference':>9}  {'|Cr|':>7}  {'Cr':>8}"]
        for i, (j, a, c) in enumerate(zip(self.matching, self.scores, self.signed)):
            lines.append(f"{i:>9d}  {int(j):>9d}  {a:7.4f}  {c:8.4f}")
        lines.append(f"mean |Cr| = {self.mean_abs:.4f}")
        return "\n".join(lines)


def match_sources(recovered, reference):
    """Pair recovered with reference signals (columns) maximizing total ``|Cr|``."""
    C = congruence_matrix(recovered, reference)
    perm = best_assignment(np.abs(C))
    rows = np.arange(C.shape[0])
    signed = C[rows, perm]
    return CongruenceReport(matching=perm, scores=np.abs(signed), signed=signed)
