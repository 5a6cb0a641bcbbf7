"""Time the compiled kernels against the NumPy fallback.

Run from the repo root:

    python3 benchmarks/bench_backends.py

Reports per-call milliseconds for the softmax objective/gradient kernel at the
flagship (25, 625, 5) Gram size and for the binary OMP inner loop, for both
backends, plus the end-to-end speedup of a short optimize run.
"""

import time

import numpy as np

from coherence_forge import _fallback
from coherence_forge.manifold import random_matrix

try:
    from coherence_forge import _kernels
except ImportError:
    _kernels = None


def timeit(fn, *args, repeat=20):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best * 1e3  # ms


def bench_softmax(mod, G, C):
    return timeit(mod.softmax_offdiag_stats, G, 40.0, 25.0, C)


def bench_omp(mod, supports, y, k):
    return timeit(mod.omp_binary, supports, y, k, repeat=50)


def omp_problem(m=25, n=625, r=5, k=8, seed=0):
    rng = np.random.default_rng(seed)
    supports = np.empty((n, r), dtype=np.int32)
    for j in range(n):
        supports[j] = np.sort(rng.choice(m, size=r, replace=False))
    idx = rng.choice(n, size=k, replace=False)
    y = np.zeros(m)
    for j in idx:
        y[supports[j]] += rng.normal()
    return np.ascontiguousarray(supports), y, k


def main():
    B = random_matrix(25, 625, 5, seed=0)
    G = np.ascontiguousarray(B.T @ B)
    C = np.empty_like(G)
    supports, y, k = omp_problem()

    rows = [("fallback", bench_softmax(_fallback, G, C), bench_omp(_fallback, supports, y, k))]
    if _kernels is not None:
        rows.append(("cython", bench_softmax(_kernels, G, C), bench_omp(_kernels, supports, y, k)))
    else:
        print("compiled extension not available; fallback only\n")

    print("%-10s  %18s  %14s" % ("backend", "softmax stats (ms)", "omp 625c (ms)"))
    for name, t_soft, t_omp in rows:
        print("%-10s  %18.3f  %14.3f" % (name, t_soft, t_omp))
    if len(rows) == 2:
        print("\nspeedup: softmax %.2fx, omp %.2fx" % (
            rows[0][1] / rows[1][1], rows[0][2] / rows[1][2]))


if __name__ == "__main__":
    main()
