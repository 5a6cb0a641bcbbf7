"""Comparison matrices: DeVore's polynomial construction and random binary."""

import numpy as np

from .errors import DegreeTooLargeError, InvalidFieldError, InvalidWeightError


def is_prime(p):
    if p < 2:
        return False
    d = 2
    while d * d <= p:
        if p % d == 0:
            return False
        d += 1
    return True


def devore_matrix(p, degree):
    """DeVore's binary matrix from graphs of degree-<=d polynomials over F_p.

    Size p^2 x p^(degree+1).  Rows are the pairs (x, y) in row-major order
    (index x*p + y); column c encodes the polynomial P(t) = c_d t^d + ... + c_0
    where (c_d, ..., c_0) are the base-p digits of c, c_d most significant.
    Entry ((x, y), P) = 1 iff P(x) = y mod p, so every column has weight
    exactly p, two columns overlap in at most `degree` rows, and the coherence
    is exactly degree/p.

    Restricted to prime p: the benchmark sizes need no prime-power fields and
    modular integer arithmetic keeps the construction elementary.
    """
    if not is_prime(p):
        raise InvalidFieldError("p must be prime, got %d" % p)
    if not 1 <= degree < p:
        raise DegreeTooLargeError("need 1 <= degree < p, got degree=%d, p=%d" % (degree, p))
    n = p ** (degree + 1)
    A = np.zeros((p * p, n), dtype=np.int8)
    xs = np.arange(p)
    for col in range(n):
        digits = []
        v = col
        for _ in range(degree + 1):
            digits.append(v % p)   # digits[i] = c_i
            v //= p
        y = np.zeros(p, dtype=np.int64)
        for d in range(degree, -1, -1):
            y = (y * xs + digits[d]) % p
        A[xs * p + y, col] = 1
    return A


def random_binary_matrix(m, n, r, seed):
    """Independent uniform r-subset supports per column, weight exactly r.

    Column j draws from the sub-seed seed XOR (j+1) through a counter-based
    generator, the same derivation random_matrix uses, so individual columns
    are reproducible out of order.  Columns may collide; that is part of what
    the random baseline is measuring.
    """
    if not 1 <= r <= m:
        raise InvalidWeightError("need 1 <= r <= m, got r=%d, m=%d" % (r, m))
    A = np.zeros((m, n), dtype=np.int8)
    for j in range(n):
        rng = np.random.Generator(np.random.Philox(key=seed ^ (j + 1)))
        A[rng.choice(m, size=r, replace=False), j] = 1
    return A
