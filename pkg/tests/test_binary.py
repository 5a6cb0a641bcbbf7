"""Binarization, coherence metrics, and the end-to-end construct pipeline.

The RIP-order rule is checked against an exact-rational oracle built with
fractions.Fraction, so no float ceiling artifacts can leak into the expected
values.
"""

from fractions import Fraction

import numpy as np
import pytest

from coherence_forge import binary, errors, manifold
from coherence_forge.baselines import devore_matrix
from coherence_forge.optimizer import OptimizerConfig


# ------------------------------------------------------------------ binarize


def test_binarize_plain_top_r():
    B = np.array([[0.5, 0.1], [0.3, 0.7], [0.2, 0.2]])
    A = binary.binarize(B, 2)
    assert A.tolist() == [[1, 0], [1, 1], [0, 1]]


def test_binarize_tie_goes_to_lowest_row():
    B = np.array([[0.25], [0.25], [0.25], [0.25]])
    A = binary.binarize(B, 2)
    assert A[:, 0].tolist() == [1, 1, 0, 0]


def test_binarize_binary_input_is_fixed_point():
    A0 = devore_matrix(3, 2)
    A = binary.binarize(A0.astype(float), 3)
    assert np.array_equal(A, A0)


def test_binarize_scale_invariance():
    rng = np.random.default_rng(0)
    B = rng.random((9, 6))
    scales = rng.random(6) + 0.5
    assert np.array_equal(binary.binarize(B, 3), binary.binarize(B * scales, 3))


def test_binarize_column_weights():
    B = manifold.random_matrix(12, 20, 4, 1)
    A = binary.binarize(B, 4)
    assert (np.asarray(A).sum(axis=0) == 4).all()
    assert set(np.unique(A)) <= {0, 1}


def test_binarize_warns_on_duplicates():
    B = np.array([[0.9, 0.9], [0.1, 0.1], [0.0, 0.0]])
    with pytest.warns(errors.DuplicateColumnsWarning):
        binary.binarize(B, 1)


def test_duplicate_column_pairs_counts():
    A = np.array([[1, 1, 1, 0], [0, 0, 0, 1]])
    assert binary.duplicate_column_pairs(A) == 3  # three identical columns -> C(3,2)
    assert binary.duplicate_column_pairs(np.eye(3)) == 0


def test_binarize_rejects_bad_r():
    with pytest.raises(errors.ValidationError):
        binary.binarize(np.ones((3, 2)), 0)
    with pytest.raises(errors.ValidationError):
        binary.binarize(np.ones((3, 2)), 4)


# ----------------------------------------------------------------- coherence


def test_welch_bound_values():
    assert binary.welch_bound(25, 625) == pytest.approx(
        np.sqrt(600.0 / (25 * 624)), rel=1e-15
    )
    assert binary.welch_bound(25, 625) == pytest.approx(0.19611613513818404, abs=1e-12)
    assert binary.welch_bound(10, 10) == 0.0
    assert binary.welch_bound(10, 4) == 0.0


def test_coherence_orthonormal_is_zero():
    rep = binary.coherence(np.eye(4))
    assert rep.coherence == 0.0
    assert rep.rip_order == 4  # capped at m
    assert rep.rip_constant_bound == 0.0


def test_coherence_simple_binary():
    A = np.array([[1, 1], [1, 0], [0, 1]])
    rep = binary.coherence(A)
    assert rep.coherence == pytest.approx(0.5, abs=1e-15)
    assert rep.argmax_pair == (0, 1)
    assert rep.r == 2
    assert rep.rip_order == 2


def test_coherence_devore_exact():
    rep = binary.coherence(devore_matrix(3, 2))
    assert rep.coherence == 2.0 / 3.0
    assert rep.m == 9 and rep.n == 27 and rep.r == 3
    assert rep.rip_order == 2  # ceil(3/2)


def test_coherence_real_matrix_path():
    # non-binary input exercises the float rip rule: k = ceil(1/mu - eps)
    rng = np.random.default_rng(3)
    B = rng.standard_normal((20, 8))
    rep = binary.coherence(B)
    assert 0 < rep.coherence < 1
    assert rep.r == 0
    # rule: largest k with k < 1/mu + 1, decided in exact rational arithmetic
    mu = Fraction(rep.coherence)
    limit = 1 / mu + 1
    k_oracle = limit.numerator // limit.denominator
    if limit == k_oracle:
        k_oracle -= 1
    assert rep.rip_order == k_oracle


def test_rip_order_exact_rational_oracle():
    # binary regular matrices: mu = t/r; largest k with k < 1/mu + 1 computed
    # with Fractions must match the integer fast path
    for r in range(1, 8):
        for t in range(1, r + 1):
            mu = Fraction(t, r)
            limit = 1 / mu + 1
            k_oracle = limit.numerator // limit.denominator
            if limit == k_oracle:  # strict inequality: back off exact integers
                k_oracle -= 1
            k_impl = -(-r // t)
            assert k_impl == k_oracle, (r, t)


def test_coherence_argmax_pair_lexicographic():
    # two pairs attain the max; report the row-major smallest
    A = np.array(
        [
            [1, 1, 0, 0],
            [1, 0, 1, 0],
            [0, 1, 0, 1],
            [0, 0, 1, 1],
        ]
    )
    rep = binary.coherence(A)
    assert rep.coherence == 0.5
    assert rep.argmax_pair == (0, 1)


def test_coherence_zero_column_rejected():
    A = np.array([[1.0, 0.0], [1.0, 0.0]])
    with pytest.raises(errors.ZeroColumnError):
        binary.coherence(A)


def test_coherence_overlap_times_r_is_integer():
    # for binary regular matrices mu * r must be an exact small integer
    A = devore_matrix(5, 3)
    rep = binary.coherence(A)
    assert rep.coherence * 5 == pytest.approx(round(rep.coherence * 5), abs=1e-9)
    assert rep.coherence == 3.0 / 5.0


# ----------------------------------------------------------------- construct


def test_construct_deterministic():
    cfg = OptimizerConfig(max_iters=40, alpha_ladder=(50.0, 200.0), seed=5)
    A1, rep1, tr1 = binary.construct(9, 20, 3, cfg)
    A2, rep2, tr2 = binary.construct(9, 20, 3, cfg)
    assert np.array_equal(A1, A2)
    assert rep1 == rep2
    assert tr1.objective == tr2.objective


def test_construct_output_contract():
    cfg = OptimizerConfig(max_iters=40, alpha_ladder=(50.0,), seed=2)
    A, rep, trace = binary.construct(8, 14, 2, cfg)
    A = np.asarray(A)
    assert A.shape == (8, 14)
    assert (A.sum(axis=0) == 2).all()
    assert rep.m == 8 and rep.n == 14 and rep.r == 2
    assert 0.0 < rep.coherence <= 1.0
    assert len(trace) > 0


def test_construct_validates_shape():
    with pytest.raises(errors.ValidationError):
        binary.construct(9, 9, 3)  # m == n
    with pytest.raises(errors.ValidationError):
        binary.construct(9, 20, 9)  # r == m
    with pytest.raises(errors.ValidationError):
        binary.construct(9, 20, 0)
