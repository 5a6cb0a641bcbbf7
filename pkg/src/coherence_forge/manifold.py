"""Geometry of ES_m = {x in R^m : sum(x) = 1, ||x||^2 = 1/r} and its n-fold product.

A point of ES_m is the continuous relaxation of a scaled r-hot binary column:
the simplex constraint fixes the coordinate sum, the sphere constraint pins the
participation ratio (sum x)^2 / sum x^2 at exactly r.  Columns are stored as
plain float arrays; a RelaxedMatrix is an (m, n) array whose columns all lie on
ES_m.  Every function here is vectorized over columns and accepts either a
single column of shape (m,) or a matrix of shape (m, n).

The tangent space at x is the orthogonal complement of span{1, x}.  Because
1 and x are not orthogonal to each other, projections go through the
orthonormal pair {1/sqrt(m), (x - mean(x))/||x - mean(x)||}; using the centered
column as the second basis vector keeps the projection well conditioned even
when x has drifted slightly off the manifold.
"""

import numpy as np

from .errors import DegeneratePointError, InvalidWeightError, RetractionFailureError

# Tolerances quoted in the data-model contract.
SUM_TOL = 1e-12
NORM_TOL = 1e-10
NEG_TOL = 1e-9


def _as_cols(x):
    """View input as (m, ncols); return (array, had_single_column)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[:, None], True
    if x.ndim != 2:
        raise ValueError("expected a vector or a matrix, got ndim=%d" % x.ndim)
    return x, False


def check_weight(m, r):
    if r < 1 or r >= m:
        raise InvalidWeightError("need 1 <= r < m, got r=%d, m=%d" % (r, m))


def defect(B, r):
    """Worst-case invariant residuals of B: (sum error, norm error, min entry)."""
    X, _ = _as_cols(B)
    sum_err = float(np.abs(X.sum(axis=0) - 1.0).max())
    norm_err = float(np.abs((X * X).sum(axis=0) - 1.0 / r).max())
    return sum_err, norm_err, float(X.min())


def validate_point(B, r, context=""):
    """Raise if any column of B violates the ES_m membership tolerances."""
    sum_err, norm_err, min_entry = defect(B, r)
    prefix = context + ": " if context else ""
    if sum_err > SUM_TOL:
        raise InvalidWeightError(prefix + "column sum off by %.3e (tol %g)" % (sum_err, SUM_TOL))
    if norm_err > NORM_TOL:
        raise InvalidWeightError(prefix + "squared norm off by %.3e (tol %g)" % (norm_err, NORM_TOL))
    if min_entry < -NEG_TOL:
        raise InvalidWeightError(prefix + "entry %.3e below -%g" % (min_entry, NEG_TOL))


def project_to_tangent(x, g):
    """Orthogonal projection of ambient vector(s) g onto the tangent space at x.

    Removes the components along the all-ones vector and along x itself; the
    result is the Euclidean-closest tangent vector.  Idempotent.
    """
    X, single = _as_cols(x)
    G, gsingle = _as_cols(g)
    if X.shape != G.shape:
        raise ValueError("x and g shapes differ: %s vs %s" % (X.shape, G.shape))
    V = X - X.mean(axis=0)
    nv2 = (V * V).sum(axis=0)
    if np.any(nv2 <= 1e-18):
        raise DegeneratePointError(
            "point is (numerically) parallel to the all-ones vector; "
            "the tangent space collapses when r = m"
        )
    out = G - G.mean(axis=0)
    out = out - V * ((V * out).sum(axis=0) / nv2)
    return out[:, 0] if single and gsingle else out


def tangent_cone_project(x, g, eps_active=1e-10, zero_tol=1e-12):
    """Project g onto the feasible descent cone at x on the nonnegative slice.

    At coordinates sitting on the boundary (x_i <= eps_active) a direction must
    not point outward (negative).  The active set is grown monotonically: zero
    out offending coordinates, re-project onto the tangent space of the free
    support, and repeat until no new coordinate violates.  Because each round
    either terminates or strictly grows the active set, at most m rounds run.

    The output d satisfies d = 0 on the final active set and is orthogonal to
    both the all-ones vector and x restricted to the free support — hence it is
    a genuine tangent vector, and it equals the orthogonal projection of g onto
    the subspace selected by the active set, so <g, d> = ||d||^2.
    """
    X, single = _as_cols(x)
    G, _ = _as_cols(g)
    m = X.shape[0]
    active = np.zeros(X.shape, dtype=bool)
    d = project_to_tangent(X, G)
    for _ in range(m):
        new = (X <= eps_active) & (d < -zero_tol) & ~active
        if not new.any():
            break
        active |= new
        free = ~active
        nfree = free.sum(axis=0).astype(float)
        d = np.where(free, G, 0.0)
        d = np.where(free, d - d.sum(axis=0) / np.maximum(nfree, 1.0), 0.0)
        V = np.where(free, X, 0.0)
        V = np.where(free, V - V.sum(axis=0) / np.maximum(nfree, 1.0), 0.0)
        nv2 = (V * V).sum(axis=0)
        ok = nv2 > 1e-18
        proj = np.where(ok, (V * d).sum(axis=0) / np.where(ok, nv2, 1.0), 0.0)
        d = np.where(free, d - V * proj, 0.0)
    return d[:, 0] if single else d


def _rescale_about_centroid(Y, r):
    """Map Y (column sums already 1) radially about the centroid onto the sphere."""
    m = Y.shape[0]
    q = 1.0 / r - 1.0 / m
    D = Y - 1.0 / m
    nd2 = (D * D).sum(axis=0)
    bad = ~(nd2 > 0.0)
    if bad.any():
        return None, bad
    t = np.sqrt(q / nd2)
    return 1.0 / m + t * D, None


def retract(x, xi, r, max_halvings=60):
    """Centroid-rescale retraction: y = x + xi, then radial rescale about (1/m)1.

    Because xi is tangent the coordinate sum survives the straight-line step;
    a mild affine re-centering is applied anyway so that rounding drift cannot
    feed back over thousands of iterations.  The radial factor then restores
    ||.||^2 = 1/r exactly.  For an exact tangent step the rescale always has a
    real solution (||y - c||^2 = q + ||xi||^2 > 0); the halving loop is kept as
    a guard against non-finite input.
    """
    X, single = _as_cols(x)
    Xi, _ = _as_cols(xi)
    if not Xi.any():
        out = X.copy()
        return out[:, 0] if single else out
    m = X.shape[0]
    check_weight(m, r)
    for _ in range(max_halvings + 1):
        Y = X + Xi
        Y = Y - (Y.mean(axis=0) - 1.0 / m)
        out, bad = _rescale_about_centroid(Y, r)
        if out is not None and np.isfinite(out).all():
            return out[:, 0] if single else out
        Xi = 0.5 * Xi
    raise RetractionFailureError("no admissible rescaling after %d halvings" % max_halvings)


def retract_nonneg(x, xi, r, max_halvings=60):
    """Retraction onto the nonnegative slice of ES_m (the closed simplex part).

    Same centroid-rescale map as `retract`, but applied over the free support:
    coordinates that the step drives negative are clamped to exact zero and the
    sum/sphere corrections are re-solved over the remaining support (with its
    own centroid 1/|F| and dispersion 1/r - 1/|F|).  The clamp set grows
    monotonically, so the inner loop terminates in at most m rounds.  Columns
    whose free support would shrink below r coordinates cannot carry the sphere
    radius; such a step is inadmissible and triggers the halving guard.

    Output columns satisfy sum = 1 and ||.||^2 = 1/r to machine precision with
    exact zeros on the clamped set — iterates never leave the region where the
    top-r binarization is meaningful.
    """
    X, single = _as_cols(x)
    Xi0, _ = _as_cols(xi)
    if not Xi0.any():
        out = X.copy()
        return out[:, 0] if single else out
    m = X.shape[0]
    check_weight(m, r)
    Xi = Xi0
    for _ in range(max_halvings + 1):
        out = _retract_nonneg_once(X + Xi, r)
        if out is not None:
            return out[:, 0] if single else out
        Xi = 0.5 * Xi
    raise RetractionFailureError("no admissible nonnegative rescaling after %d halvings" % max_halvings)


def _retract_nonneg_once(Y, r):
    m = Y.shape[0]
    active = np.zeros(Y.shape, dtype=bool)
    for _ in range(m):
        free = ~active
        nf = free.sum(axis=0).astype(float)
        if np.any(nf < r):
            return None
        qf = 1.0 / r - 1.0 / nf
        mu = np.where(free, Y, 0.0).sum(axis=0) / nf
        D = np.where(free, Y - mu, 0.0)
        nd2 = (D * D).sum(axis=0)
        pos = nd2 > 0.0
        if np.any(~pos & (qf > 0.0)):
            # zero dispersion on a support wider than r cannot carry the radius
            return None
        t = np.zeros_like(nd2)
        t[pos] = np.sqrt(qf[pos] / nd2[pos])
        out = np.where(free, 1.0 / nf + t * D, 0.0)
        if not np.isfinite(out).all():
            return None
        new = (out < 0.0) & free
        if not new.any():
            return out
        active |= new
    return None


def random_point(m, r, seed):
    """Draw one ES_m point, deterministically from `seed` (counter-based Philox).

    Sampling: a symmetric Dirichlet draw with concentration chosen so that the
    expected squared norm already equals 1/r — i.e. a = (r-1)/(m-r), from
    E||p||^2 = (a+1)/(ma+1) — then the centroid rescale restores the sphere
    constraint exactly.  Because the correction factor concentrates near 1, the
    rescaled sample is almost always still nonnegative; the rare violating draw
    is rejected and redrawn from the same stream.  After 100 rejections the
    exact r-hot vertex (a feasible point by construction) is used.
    """
    check_weight(m, r)
    rng = np.random.Generator(np.random.Philox(key=seed))
    a = max((r - 1.0) / (m - r), 0.05)
    c = 1.0 / m
    q = 1.0 / r - c
    for _ in range(100):
        p = rng.dirichlet(np.full(m, a))
        d = p - c
        nd2 = float(d @ d)
        if nd2 <= 0.0:
            continue
        x = c + np.sqrt(q / nd2) * d
        if x.min() >= 0.0:
            return x
    x = np.zeros(m)
    x[rng.choice(m, size=r, replace=False)] = 1.0 / r
    return x


def random_matrix(m, n, r, seed):
    """n-column random ES_m^n point; column j draws from sub-seed seed XOR (j+1).

    The XOR derivation plus a counter-based generator makes column streams
    independent of evaluation order, so any column can be reproduced in
    isolation via random_point(m, r, seed ^ (j+1)).
    """
    check_weight(m, r)
    B = np.empty((m, n))
    for j in range(n):
        B[:, j] = random_point(m, r, seed ^ (j + 1))
    return B
