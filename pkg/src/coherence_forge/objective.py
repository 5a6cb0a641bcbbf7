"""Smooth-max coherence objective on ES_m^n and its gradients.

f(B) = M_alpha({r^2 gamma_ij : i != j}) with gamma_ij = <b_i, b_j>: a
softmax-weighted average of the scaled pairwise inner products that tends to
the worst pair as alpha grows.  Sums run over ordered pairs (each unordered
pair twice), which by symmetry equals the unordered form but keeps the index
bookkeeping identical between the value and the gradient.

The Euclidean gradient has the closed form

    df/db_l = sum_{j != l} 2 w_lj r^2 (1 + alpha (r^2 gamma_lj - f)) b_j,

i.e. grad = B @ C for a symmetric coupling matrix C with zero diagonal; the
kernels build C directly from the Gram matrix.  The formula is exercised
against central finite differences in the test suite rather than trusted.
"""

import numpy as np

from .backend import kernels
from .errors import EmptyInputError, TooFewColumnsError, ValidationError
from .manifold import project_to_tangent


def smooth_max(x, alpha):
    """M_alpha(x) = sum x_i e^{alpha x_i} / sum e^{alpha x_i}, stabilized.

    alpha = 0 gives the arithmetic mean exactly; alpha -> inf tends to max(x).
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size == 0:
        raise EmptyInputError("smooth_max of an empty vector")
    if alpha < 0:
        raise ValidationError("smooth-max sharpness must be >= 0, got %g" % alpha)
    e = alpha * x
    s = np.exp(e - e.max())
    v = float((x * s).sum() / s.sum())
    # the quotient can round one ulp past max(x) when the softmax saturates;
    # clamp so the mean <= M_alpha <= max contract holds in floating point too
    return min(v, float(x.max()))


def gram_offdiag(B):
    """Pairwise inner products of the columns of B, symmetrized exactly."""
    B = np.asarray(B, dtype=float)
    G = B.T @ B
    return 0.5 * (G + G.T)


def _check_columns(B):
    B = np.asarray(B, dtype=float)
    if B.ndim != 2:
        raise ValidationError("expected an (m, n) matrix")
    if B.shape[1] < 2:
        raise TooFewColumnsError("pairwise objective needs n >= 2, got n=%d" % B.shape[1])
    return B


def objective(B, alpha, r):
    """f(B): smooth max of {r^2 gamma_ij} over distinct column pairs."""
    B = _check_columns(B)
    return kernels.softmax_offdiag_value(gram_offdiag(B), alpha, float(r) ** 2)


def objective_and_euclidean_gradient(B, alpha, r):
    """Fused evaluation used by the optimizer: returns (f, grad)."""
    B = _check_columns(B)
    G = gram_offdiag(B)
    C = np.empty_like(G)
    f = kernels.softmax_offdiag_stats(G, alpha, float(r) ** 2, C)
    return f, B @ C


def euclidean_gradient(B, alpha, r):
    """Closed-form df/dB as an (m, n) array, column l = df/db_l."""
    return objective_and_euclidean_gradient(B, alpha, r)[1]


def riemannian_gradient(B, alpha, r):
    """Euclidean gradient projected column-wise onto the tangent spaces."""
    B = _check_columns(B)
    return project_to_tangent(B, euclidean_gradient(B, alpha, r))
