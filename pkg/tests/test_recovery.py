"""Sparse recovery benchmark: signals, measurement, OMP, trial protocol.

The multiplier-less binary product is checked against the dense matmul, the
per-realization SNR scaling is recomputed from the emitted noise, and the OMP
singular-halt path is driven by hand-built rank-deficient instances (one dense,
one binary with a duplicated column).
"""

import math

import numpy as np
import pytest

from coherence_forge import baselines, errors, recovery


# -------------------------------------------------------------------- signals


def test_gen_sparse_signal_shape_and_support():
    x = recovery.gen_sparse_signal(50, 7, 3)
    assert x.k == 7
    assert x.values.shape == (50,)
    assert len(x.support) == 7
    assert (np.diff(x.support) > 0).all()
    off = np.ones(50, dtype=bool)
    off[x.support] = False
    assert not x.values[off].any()


def test_gen_sparse_signal_deterministic():
    a = recovery.gen_sparse_signal(30, 4, 11)
    b = recovery.gen_sparse_signal(30, 4, 11)
    c = recovery.gen_sparse_signal(30, 4, 12)
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)


def test_gen_sparse_signal_k_zero_and_errors():
    x = recovery.gen_sparse_signal(10, 0, 0)
    assert not x.values.any()
    with pytest.raises(errors.InvalidSparsityError):
        recovery.gen_sparse_signal(10, 11, 0)


# ---------------------------------------------------------------- measurement


def test_binary_product_matches_dense_matmul():
    rng = np.random.default_rng(5)
    for seed in range(10):
        A = baselines.random_binary_matrix(12, 40, 3, seed)
        x = np.zeros(40)
        idx = rng.choice(40, 6, replace=False)
        x[idx] = rng.standard_normal(6)
        assert np.allclose(recovery._binary_product(A, x), A @ x, atol=1e-12)
    assert not recovery._binary_product(A, np.zeros(40)).any()


def test_measure_noiseless_is_exact_product():
    A = baselines.random_binary_matrix(10, 25, 3, 1)
    x = recovery.gen_sparse_signal(25, 4, 2)
    y = recovery.measure(A, x, float("inf"))
    assert np.array_equal(y, recovery._binary_product(A, x.values))


def test_measure_hits_target_snr_exactly():
    A = baselines.random_binary_matrix(16, 50, 4, 3)
    x = recovery.gen_sparse_signal(50, 5, 4)
    clean = recovery.measure(A, x, float("inf"))
    for snr in (0.0, 17.5, 60.0, 100.0):
        y = recovery.measure(A, x, snr, rng=99)
        w = y - clean
        achieved = 10.0 * math.log10(float(clean @ clean) / float(w @ w))
        assert achieved == pytest.approx(snr, abs=1e-9)


def test_measure_noise_reproducible_by_seed():
    A = baselines.random_binary_matrix(8, 20, 2, 5)
    x = recovery.gen_sparse_signal(20, 3, 6)
    assert np.array_equal(
        recovery.measure(A, x, 30.0, rng=7), recovery.measure(A, x, 30.0, rng=7)
    )
    assert not np.array_equal(
        recovery.measure(A, x, 30.0, rng=7), recovery.measure(A, x, 30.0, rng=8)
    )


def test_measure_zero_signal_finite_snr_degenerate():
    A = baselines.random_binary_matrix(8, 20, 2, 5)
    with pytest.raises(errors.DegenerateSnrError):
        recovery.measure(A, np.zeros(20), 30.0)
    # noiseless zero signal is fine
    assert not recovery.measure(A, np.zeros(20), float("inf")).any()


def test_measure_shape_mismatch():
    A = baselines.random_binary_matrix(8, 20, 2, 5)
    with pytest.raises(errors.ShapeError):
        recovery.measure(A, np.zeros(19), float("inf"))


# ------------------------------------------------------------------------ OMP


def test_omp_identity_recovers_exactly():
    A = np.eye(6)
    x = np.array([0.0, 2.0, 0.0, -1.5, 0.0, 0.0])
    xhat = recovery.omp(A, x.copy(), 2)
    assert np.allclose(xhat, x, atol=1e-12)


def test_omp_k_zero_returns_zero_vector():
    A = baselines.random_binary_matrix(8, 20, 2, 1)
    xhat, rn, flag = recovery.omp_full(A, np.ones(8), 0)
    assert not xhat.any()
    assert rn == pytest.approx(np.sqrt(8.0))
    assert flag is False


def test_omp_never_reselects_and_residual_monotone_in_budget():
    A = baselines.random_binary_matrix(20, 60, 4, 2).astype(float)
    rng = np.random.default_rng(3)
    y = rng.standard_normal(20)
    rns = []
    for k in range(0, 8):
        xhat, rn, _ = recovery.omp_full(A, y, k)
        assert np.count_nonzero(xhat) <= k
        rns.append(rn)
    assert all(b <= a + 1e-12 for a, b in zip(rns, rns[1:]))


def test_omp_binary_path_matches_dense_path():
    # the support-table kernel and the generic lstsq path must agree on
    # well-conditioned instances; break binary dispatch by scaling a column
    A = baselines.random_binary_matrix(15, 45, 3, 7)
    x = recovery.gen_sparse_signal(45, 4, 8)
    y = recovery.measure(A, x, float("inf"))
    xb = recovery.omp(A, y, 4)
    Af = A.astype(float).copy()
    Af[:, 0] *= 2.0  # no longer 0/1, so the dense path runs
    # normalized scores are scale-invariant and column 0 is not in the support
    xd = recovery.omp(Af, y, 4)
    xd[0] *= 2.0
    assert np.allclose(xb, xd, atol=1e-9)


def test_omp_exact_recovery_within_coherence_guarantee():
    # k = 1 < (1 + 1/mu)/2 for DeVore p=5: every 1-sparse signal is recovered
    A = baselines.devore_matrix(5, 3)
    for seed in range(25):
        x = recovery.gen_sparse_signal(625, 1, seed)
        y = recovery.measure(A, x, float("inf"))
        xhat = recovery.omp(A, y, 1)
        assert np.linalg.norm(xhat - x.values) < 1e-10


def test_omp_singular_halt_dense():
    # c2 = (c0 + c1)/sqrt(2) makes {c0, c1, c2} rank 2; a y slightly off the
    # column span forces OMP to want all three and hit the rank check
    c0 = np.array([1.0, 0.0, 0.0, 0.0])
    c1 = np.array([0.0, 1.0, 0.0, 0.0])
    c2 = (c0 + c1) / np.sqrt(2.0)
    A = np.stack([c0, c1, c2], axis=1)
    y = c0 + 0.9 * c1 + 1e-6 * np.array([0.0, 0.0, 0.0, 1.0])
    xhat, rn, flag = recovery.omp_full(A, y, 3)
    assert flag is True
    assert np.count_nonzero(xhat) == 2
    assert rn == pytest.approx(1e-6, rel=1e-6)


def test_omp_singular_halt_binary_duplicate_column():
    # residual orthogonal to everything leaves a 0-0 tie; the duplicate of an
    # already-selected column wins it by index and triggers the singular rule
    A = np.array(
        [
            [1, 1, 0],
            [1, 1, 0],
            [0, 0, 1],
            [0, 0, 1],
        ],
        dtype=np.int8,
    )
    delta = 1e-3
    y = np.array([delta, -delta, 1.0, 1.0])
    xhat, rn, flag = recovery.omp_full(A, y, 3)
    assert flag is True
    assert xhat[2] == pytest.approx(1.0)
    assert rn == pytest.approx(delta * np.sqrt(2.0), rel=1e-9)


def test_omp_budget_validation():
    A = baselines.random_binary_matrix(8, 20, 2, 1)
    with pytest.raises(errors.InvalidSparsityError):
        recovery.omp(A, np.ones(8), 9)
    with pytest.raises(errors.InvalidSparsityError):
        recovery.omp(A, np.ones(8), -1)
    with pytest.raises(errors.ShapeError):
        recovery.omp(A, np.ones(7), 2)


# ----------------------------------------------------------------- output SNR


def test_output_snr_exact_recovery_capped():
    x = recovery.gen_sparse_signal(20, 3, 0)
    assert recovery.output_snr_db(x, x.values.copy()) == 300.0


def test_output_snr_zero_estimate_is_zero_db():
    x = recovery.gen_sparse_signal(20, 3, 0)
    assert recovery.output_snr_db(x, np.zeros(20)) == 0.0


def test_output_snr_ordinary_value():
    x = np.zeros(10)
    x[2] = 1.0
    xhat = x.copy()
    xhat[2] = 0.9  # error 0.1 -> 20 dB
    assert recovery.output_snr_db(x, xhat) == pytest.approx(20.0, abs=1e-12)


def test_output_snr_zero_signal_zero_estimate():
    assert recovery.output_snr_db(np.zeros(5), np.zeros(5)) == 300.0


# --------------------------------------------------------------------- trials


def test_run_trial_deterministic_coordinates():
    A = baselines.devore_matrix(3, 2)
    sup = recovery._binary_supports(A)
    t1 = recovery.run_trial(A, sup, 27, 2, 35.0, 9, 4)
    t2 = recovery.run_trial(A, sup, 27, 2, 35.0, 9, 4)
    t3 = recovery.run_trial(A, sup, 27, 2, 35.0, 9, 5)
    assert t1 == t2
    assert t1 != t3


def test_run_trial_distinguishes_snr_by_bits():
    A = baselines.devore_matrix(3, 2)
    sup = recovery._binary_supports(A)
    tf = recovery.run_trial(A, sup, 27, 2, float("inf"), 9, 0)
    tn = recovery.run_trial(A, sup, 27, 2, 35.0, 9, 0)
    assert tf != tn


def test_run_trial_zero_signal_finite_snr_marked_failed():
    A = baselines.devore_matrix(3, 2)
    sup = recovery._binary_supports(A)
    t = recovery.run_trial(A, sup, 27, 0, 35.0, 1, 0)
    assert t.failed is True
    assert t.success is False


def test_aggregate_counts():
    results = [
        recovery.TrialResult(True, 300.0, 0.0),
        recovery.TrialResult(True, 100.0, 0.0),
        recovery.TrialResult(False, 20.0, 1.0),
        recovery.TrialResult(True, 60.0, 0.0),
    ]
    pct, snr = recovery.aggregate(results)
    assert pct == 75.0
    assert snr == pytest.approx(120.0)


def test_run_experiment_deterministic_and_grid_order():
    A = baselines.devore_matrix(3, 2)
    r1 = recovery.run_experiment(A, [1, 2], [float("inf"), 40.0], 10, 3, matrix_id="dv")
    r2 = recovery.run_experiment(A, [1, 2], [float("inf"), 40.0], 10, 3, matrix_id="dv")
    assert r1.rows == r2.rows
    assert [(row["k"], row["input_snr_db"]) for row in r1.rows] == [
        (1, float("inf")),
        (1, 40.0),
        (2, float("inf")),
        (2, 40.0),
    ]


def test_run_experiment_k_zero_noiseless_trivially_recovers():
    A = baselines.devore_matrix(3, 2)
    rep = recovery.run_experiment(A, [0], [float("inf")], 5, 0)
    row = rep.rows[0]
    assert row["recovery_pct"] == 100.0
    assert row["mean_output_snr_db"] == 300.0


def test_run_experiment_devore_k1_guaranteed():
    A = baselines.devore_matrix(5, 3)
    rep = recovery.run_experiment(A, [1], [float("inf")], 40, 1)
    assert rep.rows[0]["recovery_pct"] == 100.0


def test_run_experiment_validation():
    A = baselines.devore_matrix(3, 2)
    with pytest.raises(errors.InvalidSparsityError):
        recovery.run_experiment(A, [10], [float("inf")], 5, 0)
    with pytest.raises(errors.ValidationError):
        recovery.run_experiment(A, [1], [float("inf")], 0, 0)
    with pytest.raises(errors.ValidationError):
        recovery.run_experiment(np.full((3, 4), 0.5), [1], [float("inf")], 5, 0)


def test_report_cell_lookup():
    A = baselines.devore_matrix(3, 2)
    rep = recovery.run_experiment(A, [1], [float("inf"), 20.0], 5, 0)
    assert rep.cell(1, float("inf"))["recovery_pct"] == 100.0
    with pytest.raises(KeyError):
        rep.cell(2, 20.0)
