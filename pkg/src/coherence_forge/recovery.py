"""Sparse-recovery benchmark: signal synthesis, measurement, OMP, aggregation.

The experiment protocol: for each grid cell (sparsity k, input SNR), draw
`trials` independent k-sparse Gaussian signals, measure y = Ax + w with the
noise scaled per realization to the exact target SNR, reconstruct with OMP
given an iteration budget of the true k, and aggregate recovery percentage
and mean output SNR.  All per-trial randomness derives from the master seed
through SeedSequence spawn keys (k, snr-bits, trial index), so any trial is
reproducible in isolation and execution order cannot matter.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .backend import kernels
from .errors import (
    CoherenceForgeError,
    DegenerateSnrError,
    InvalidSparsityError,
    ShapeError,
    ValidationError,
    ZeroColumnError,
)

SUCCESS_REL_TOL = 1e-4   # relative l2 error defining a successful recovery
SNR_CAP_DB = 300.0       # output-SNR cap for (numerically) exact recoveries


@dataclass
class SparseSignal:
    values: np.ndarray
    support: np.ndarray   # sorted ascending
    k: int


@dataclass
class TrialResult:
    success: bool
    output_snr_db: float
    residual_norm: float
    singular_halt: bool = False
    failed: bool = False


@dataclass
class RecoveryReport:
    """Aggregates over the (k, input_snr_db) grid, rows in k-major order."""

    matrix_id: str
    seed: int
    rows: list = field(default_factory=list)  # dicts: k, input_snr_db, trials, recovery_pct, mean_output_snr_db

    def cell(self, k, snr):
        for row in self.rows:
            same_snr = row["input_snr_db"] == snr or (
                math.isinf(row["input_snr_db"]) and math.isinf(snr)
            )
            if row["k"] == k and same_snr:
                return row
        raise KeyError((k, snr))


def gen_sparse_signal(n, k, seed):
    """k-sparse signal: uniform random support, standard-normal values.

    `seed` may be an int or a numpy SeedSequence (the benchmark passes derived
    sequences).  Deterministic either way.
    """
    if not 0 <= k <= n:
        raise InvalidSparsityError("need 0 <= k <= n, got k=%d, n=%d" % (k, n))
    rng = np.random.default_rng(seed)
    support = np.sort(rng.choice(n, size=k, replace=False))
    values = np.zeros(n)
    values[support] = rng.standard_normal(k)
    return SparseSignal(values=values, support=support, k=k)


def _signal_values(x):
    return x.values if isinstance(x, SparseSignal) else np.asarray(x, dtype=float)


def _binary_product(A, x):
    """A @ x for binary A via index summation only — no multiplications.

    Gathers each nonzero x_j once per one-entry of column j and accumulates;
    this is the multiplier-less evaluation binary sensing matrices afford.
    """
    m = A.shape[0]
    y = np.zeros(m)
    nz = np.flatnonzero(x)
    if nz.size == 0:
        return y
    cpos, rows = np.nonzero(A[:, nz].T)
    np.add.at(y, rows, x[nz][cpos])
    return y


def measure(A, x, input_snr_db, rng=0):
    """y = Ax + w with white Gaussian w scaled per-realization to the target SNR.

    input_snr_db = inf means noiseless (w = 0).  The scaling is exact for the
    realization actually drawn: 10 log10(||Ax||^2 / ||w||^2) equals the target
    up to float rounding, not merely in expectation.  `rng` is an int seed, a
    SeedSequence, or a Generator.
    """
    A = np.asarray(A)
    xv = _signal_values(x)
    if A.ndim != 2 or xv.shape != (A.shape[1],):
        raise ShapeError("A is %s but x has shape %s" % (A.shape, xv.shape))
    y = _binary_product(A, xv)
    if math.isinf(input_snr_db):
        return y
    signal_norm = float(np.linalg.norm(y))
    if signal_norm == 0.0:
        raise DegenerateSnrError("finite target SNR with a zero signal")
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    w = rng.standard_normal(A.shape[0])
    w *= signal_norm / float(np.linalg.norm(w)) * 10.0 ** (-input_snr_db / 20.0)
    return y + w


def _binary_supports(A):
    """(n, r) int32 support table of a binary column-regular matrix, else None."""
    A = np.asarray(A)
    if not ((A == 0) | (A == 1)).all():
        return None
    weights = A.sum(axis=0)
    if A.shape[1] == 0 or not (weights == weights[0]).all() or weights[0] == 0:
        return None
    r = int(weights[0])
    rows, cols = np.nonzero(A.T)
    return cols.reshape(A.shape[1], r).astype(np.int32)


def omp(A, y, k, tol=1e-12):
    """Orthogonal matching pursuit: k greedy column picks with LS re-fitting.

    Each iteration selects the unselected column maximizing |<a_j, res>|/||a_j||
    (ties to the lowest index), re-fits on the active set, and updates the
    residual; stops early once the residual norm falls below `tol`.  A singular
    active-set least-squares drops the offending column and halts.  Binary
    column-regular matrices dispatch to the support-table kernel.
    """
    xhat, _, _ = omp_full(A, y, k, tol)
    return xhat


def omp_full(A, y, k, tol=1e-12):
    """omp plus diagnostics: returns (estimate, residual norm, singular flag)."""
    A = np.asarray(A)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2 or y.shape != (A.shape[0],):
        raise ShapeError("A is %s but y has shape %s" % (A.shape, y.shape))
    if not 0 <= k <= A.shape[0]:
        raise InvalidSparsityError("OMP budget must satisfy 0 <= k <= m, got k=%d" % k)
    supports = _binary_supports(A)
    if supports is not None:
        sel, coefs, rn, flag = kernels.omp_binary(supports, y, int(k), tol)
        xhat = np.zeros(A.shape[1])
        xhat[sel] = coefs
        return xhat, rn, bool(flag)
    return _omp_dense(A.astype(float), y, int(k), tol)


def _omp_dense(A, y, k, tol):
    m, n = A.shape
    norms = np.sqrt((A * A).sum(axis=0))
    if np.any(norms == 0.0):
        raise ZeroColumnError("OMP requires nonzero columns")
    res = y.copy()
    active = []
    coefs = np.zeros(0)
    flag = False
    rn = float(np.linalg.norm(res))
    while len(active) < k and rn >= tol:
        scores = np.abs(A.T @ res) / norms
        if active:
            scores[active] = -1.0
        j = int(np.argmax(scores))
        trial = active + [j]
        As = A[:, trial]
        sol, _, rank, _ = np.linalg.lstsq(As, y, rcond=None)
        if rank < len(trial):
            flag = True
            break
        active = trial
        coefs = sol
        res = y - As @ sol
        rn = float(np.linalg.norm(res))
    xhat = np.zeros(n)
    if active:
        xhat[active] = coefs
    return xhat, rn, flag


def output_snr_db(x, xhat):
    """20 log10(||x|| / ||x - xhat||), capped; exact recovery gets the cap,
    an all-zero estimate of a nonzero signal gets exactly 0 dB."""
    xv = _signal_values(x)
    err = float(np.linalg.norm(xv - xhat))
    if err == 0.0:
        return SNR_CAP_DB
    if not np.any(xhat):
        return 0.0
    nx = float(np.linalg.norm(xv))
    return min(20.0 * np.log10(nx / err), SNR_CAP_DB) if nx > 0 else 0.0


def run_trial(A, supports, n, k, input_snr_db, seed, trial_index):
    """One (signal, noise, OMP) draw; reproducible from its coordinates alone."""
    snr_bits = int(np.float64(input_snr_db).view(np.uint64))
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(k, snr_bits, trial_index))
    sig_ss, noise_ss = ss.spawn(2)
    x = gen_sparse_signal(n, k, sig_ss)
    try:
        y = measure(A, x, input_snr_db, rng=np.random.default_rng(noise_ss))
    except CoherenceForgeError:
        return TrialResult(False, 0.0, float("nan"), failed=True)
    sel, coefs, rn, flag = kernels.omp_binary(supports, y, k, 1e-12)
    xhat = np.zeros(n)
    xhat[sel] = coefs
    nx = float(np.linalg.norm(x.values))
    err = float(np.linalg.norm(x.values - xhat))
    success = err < SUCCESS_REL_TOL * nx if nx > 0 else err == 0.0
    return TrialResult(success, output_snr_db(x, xhat), rn, singular_halt=bool(flag))


def aggregate(results):
    """Reduce per-trial results (indexed by trial number) into one grid cell.

    The reduction always runs in trial-index order over the stored array, so
    any execution schedule yields the identical aggregate.
    """
    pct = 100.0 * sum(tr.success for tr in results) / len(results)
    mean_snr = float(np.mean([tr.output_snr_db for tr in results]))
    return pct, mean_snr


def run_experiment(A, k_range, input_snr_list, trials, seed, matrix_id="matrix"):
    """Full grid benchmark of one binary matrix; returns a RecoveryReport.

    Rows come out k-major, SNR-minor.  Failed trials (e.g. a zero signal at
    finite SNR) are recorded as unsuccessful rather than aborting the sweep.
    """
    A = np.asarray(A)
    supports = _binary_supports(A)
    if supports is None:
        raise ValidationError("run_experiment expects a binary column-regular matrix")
    m, n = A.shape
    k_range = [int(k) for k in k_range]
    if any(k < 0 or k > m for k in k_range):
        raise InvalidSparsityError("all k must lie in [0, m=%d]" % m)
    if trials <= 0:
        raise ValidationError("trials must be positive")
    report = RecoveryReport(matrix_id=matrix_id, seed=seed)
    for k in k_range:
        for snr in input_snr_list:
            results = [run_trial(A, supports, n, k, float(snr), seed, t) for t in range(trials)]
            pct, mean_snr = aggregate(results)
            report.rows.append(
                {
                    "k": k,
                    "input_snr_db": float(snr),
                    "trials": trials,
                    "recovery_pct": pct,
                    "mean_output_snr_db": mean_snr,
                }
            )
    return report
