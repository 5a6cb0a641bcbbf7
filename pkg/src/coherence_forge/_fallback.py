"""Pure-NumPy implementations of the hot kernels.

Mirrors the signatures of the compiled `_kernels` extension; `backend.py`
picks whichever is importable.  Kept dependency-free beyond NumPy so the
package always runs, compiled or not.
"""

import numpy as np


def softmax_offdiag_value(G, alpha, r2):
    """Smooth max of the multiset {r2 * G[i, j] : i != j}.

    Stabilized by subtracting the largest exponent, so alpha * r2 * G may reach
    +-1e4 without overflow.  The diagonal is excluded by sending its exponents
    to -inf, which turns into exact zero weights after the shift.
    """
    T = r2 * np.asarray(G, dtype=float)
    E = alpha * T
    np.fill_diagonal(E, -np.inf)
    M = E.max()
    S = np.exp(E - M)
    return float((S * T).sum() / S.sum())


def softmax_offdiag_stats(G, alpha, r2, C):
    """Objective value plus the gradient coupling matrix, in one pass.

    Fills C with C[j, l] = 2 * r2 * w_jl * (1 + alpha * (t_jl - f)) where
    t = r2 * G and w are the off-diagonal softmax weights; the Euclidean
    gradient of the objective is then B @ C.  Returns f.
    """
    T = r2 * np.asarray(G, dtype=float)
    E = alpha * T
    np.fill_diagonal(E, -np.inf)
    M = E.max()
    S = np.exp(E - M)
    den = S.sum()
    f = float((S * T).sum() / den)
    C[:, :] = (2.0 * r2 / den) * S * (1.0 + alpha * (T - f))
    return f


def _solve_chol(L, nsel, b):
    z = np.zeros(nsel)
    for i in range(nsel):
        z[i] = (b[i] - L[i, :i] @ z[:i]) / L[i, i]
    c = np.zeros(nsel)
    for i in reversed(range(nsel)):
        c[i] = (z[i] - L[i + 1 : nsel, i] @ c[i + 1 : nsel]) / L[i, i]
    return c


def omp_binary(supports, y, k, tol=1e-12):
    """OMP specialised to binary column-regular matrices given as support lists.

    supports: (n, r) integer array, row j = the r one-positions of column j.
    Correlations are plain index sums (all column norms equal sqrt(r), so the
    normalized argmax reduces to the raw one); the active-set least squares is
    an incrementally updated Cholesky of the integer Gram.  Ties in the argmax
    go to the lowest column index.  A singular update (new column linearly
    dependent on the active set) drops that column and halts.

    Returns (selected indices, coefficients, residual norm, singular flag).
    """
    supports = np.asarray(supports)
    y = np.asarray(y, dtype=float)
    n, r = supports.shape
    kmax = min(int(k), n)
    sel = np.empty(kmax, dtype=np.int64)
    L = np.zeros((kmax, kmax))
    b = np.zeros(kmax)
    coefs = np.zeros(0)
    res = y.copy()
    rn = float(np.linalg.norm(res))
    nsel = 0
    flag = 0
    while nsel < kmax and rn >= tol:
        corr = np.abs(res[supports].sum(axis=1))
        if nsel:
            corr[sel[:nsel]] = -1.0
        j = int(np.argmax(corr))
        mark = np.zeros(y.shape[0], dtype=bool)
        mark[supports[j]] = True
        g = mark[supports[sel[:nsel]]].sum(axis=1).astype(float)
        w = np.zeros(nsel)
        for i in range(nsel):
            w[i] = (g[i] - L[i, :i] @ w[:i]) / L[i, i]
        d2 = r - w @ w
        if d2 <= 1e-10 * r:
            flag = 1
            break
        L[nsel, :nsel] = w
        L[nsel, nsel] = np.sqrt(d2)
        b[nsel] = y[supports[j]].sum()
        sel[nsel] = j
        nsel += 1
        coefs = _solve_chol(L, nsel, b)
        res = y.copy()
        for t in range(nsel):
            res[supports[sel[t]]] -= coefs[t]
        rn = float(np.linalg.norm(res))
    return sel[:nsel].copy(), np.asarray(coefs[:nsel], dtype=float), rn, flag
