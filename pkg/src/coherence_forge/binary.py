"""Binarization of relaxed solutions and sensing-matrix quality metrics."""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DuplicateColumnsWarning, ValidationError, ZeroColumnError
from .manifold import random_matrix
from .optimizer import OptimizerConfig, optimize


def binarize(B, r):
    """Map each column to the indicator of its r largest entries.

    Ties are broken toward the lowest row index (stable argsort on the negated
    values), so the output is deterministic.  Scale-invariant per column.
    Emits DuplicateColumnsWarning when two output columns coincide — that means
    coherence 1 and usually signals a bad seed or a truncated optimization.
    """
    B = np.asarray(B, dtype=float)
    if B.ndim != 2:
        raise ValidationError("binarize expects an (m, n) matrix")
    m, n = B.shape
    if not 1 <= r <= m:
        raise ValidationError("need 1 <= r <= m, got r=%d, m=%d" % (r, m))
    top = np.argsort(-B, axis=0, kind="stable")[:r, :]
    A = np.zeros((m, n), dtype=np.int8)
    np.put_along_axis(A, top, 1, axis=0)
    dups = duplicate_column_pairs(A)
    if dups:
        warnings.warn("%d duplicate column pair(s) after binarization" % dups, DuplicateColumnsWarning)
    return A


def duplicate_column_pairs(A):
    """Number of unordered pairs of identical columns in A."""
    _, counts = np.unique(np.asarray(A), axis=1, return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def welch_bound(m, n):
    """sqrt((n-m)/(m(n-1))): the coherence lower bound; 0 when n <= m."""
    if n <= m:
        return 0.0
    return float(np.sqrt((n - m) / (m * (n - 1.0))))


@dataclass
class CoherenceReport:
    coherence: float
    welch: float
    rip_order: int
    rip_constant_bound: float
    argmax_pair: tuple
    m: int
    n: int
    r: int = 0   # 0 when the matrix is not binary column-regular


def coherence(A):
    """Coherence, Welch bound, and the coherence-implied RIP order of A.

    Accepts real matrices as well as binary ones, so the relaxed iterates can
    be tracked with the same metric.  mu = max_{i<j} |<a_i,a_j>| / (|a_i||a_j|);
    argmax_pair is the lexicographically smallest pair attaining the max.  The
    RIP order is the largest k with k < 1/mu + 1 (computed in exact integer
    arithmetic when A is binary column-regular, where mu = overlap/r); mu = 0
    caps it at m, the most the matrix could ever certify.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[1] < 2:
        raise ValidationError("coherence expects an (m, n>=2) matrix")
    m, n = A.shape
    norms2 = (A * A).sum(axis=0)
    if np.any(norms2 == 0.0):
        raise ZeroColumnError("column %d is zero" % int(np.argmin(norms2)))
    N = A / np.sqrt(norms2)
    G = np.abs(N.T @ N)
    iu = np.triu_indices(n, 1)
    vals = G[iu]
    flat = int(np.argmax(vals))
    mu = float(vals[flat])
    pair = (int(iu[0][flat]), int(iu[1][flat]))

    binary = bool(((A == 0.0) | (A == 1.0)).all())
    weights = A.sum(axis=0)
    regular = binary and bool((weights == weights[0]).all())
    r = int(weights[0]) if regular else 0
    if mu <= 0.0:
        k = m
    elif regular:
        t = int(round(mu * r))
        mu = t / r  # snap to the exact rational the float dot only approximates
        k = -(-r // t)  # ceil(r / t) exactly
    else:
        k = int(np.ceil(1.0 / mu - 1e-12))
    return CoherenceReport(
        coherence=mu,
        welch=welch_bound(m, n),
        rip_order=k,
        rip_constant_bound=mu * (k - 1),
        argmax_pair=pair,
        m=m,
        n=n,
        r=r,
    )


def construct(m, n, r, cfg=None):
    """End-to-end pipeline: random ES_m^n start -> optimize -> binarize -> metrics.

    Returns (A, CoherenceReport, IterationTrace) with A the binarized 0/1
    array.  Fully deterministic for a fixed cfg.seed.
    """
    if cfg is None:
        cfg = OptimizerConfig()
    if not (1 <= r < m < n):
        raise ValidationError("construct needs 1 <= r < m < n, got r=%d m=%d n=%d" % (r, m, n))
    B0 = random_matrix(m, n, r, cfg.seed)
    B, trace = optimize(B0, r, cfg)
    A = binarize(B, r)
    return A, coherence(A), trace
