"""Text serializations: matrices (dense and sparse), reports, figure data.

Both matrix formats open with a `m n r` header line.  Dense then carries m
rows of space-separated 0/1; sparse carries one line per column listing its r
one-positions in ascending order (0-based).  Readers validates shape, weights
and ordering, and report 1-based line numbers on failure.  All floats are
written with 17 significant digits so identical runs produce identical bytes.
"""

import json
import math

import numpy as np

from .errors import MatrixParseError


def write_matrix_dense(path, A, r):
    A = np.asarray(A)
    m, n = A.shape
    with open(path, "w") as fh:
        fh.write("%d %d %d\n" % (m, n, r))
        for i in range(m):
            fh.write(" ".join("%d" % v for v in A[i]) + "\n")


def write_matrix_sparse(path, A, r):
    A = np.asarray(A)
    m, n = A.shape
    with open(path, "w") as fh:
        fh.write("%d %d %d\n" % (m, n, r))
        for j in range(n):
            fh.write(" ".join("%d" % v for v in np.flatnonzero(A[:, j])) + "\n")


def _header(lines):
    if not lines:
        raise MatrixParseError("empty matrix file", line=1)
    parts = lines[0][1].split()
    if len(parts) != 3:
        raise MatrixParseError("header must be 'm n r'", line=lines[0][0])
    try:
        m, n, r = (int(p) for p in parts)
    except ValueError:
        raise MatrixParseError("non-integer header field", line=lines[0][0])
    if m < 1 or n < 1 or r < 1 or r > m:
        raise MatrixParseError("inadmissible header %d %d %d" % (m, n, r), line=lines[0][0])
    return m, n, r


def read_matrix(path):
    """Parse either serialization; returns (A as int8, r).

    Format sniffing: a body line with n tokens all in {0, 1} marks the dense
    layout; otherwise the sparse layout is assumed.  Errors carry the 1-based
    line number of the offending line.
    """
    with open(path) as fh:
        lines = [(i + 1, ln.strip()) for i, ln in enumerate(fh)]
    lines = [(no, ln) for no, ln in lines if ln and not ln.startswith("#")]
    m, n, r = _header(lines)
    body = lines[1:]
    if body:
        toks = body[0][1].split()
        dense = len(toks) == n and set(toks) <= {"0", "1"} and len(body) == m
    else:
        dense = False
    if dense:
        A = np.zeros((m, n), dtype=np.int8)
        for i, (no, ln) in enumerate(body):
            toks = ln.split()
            if len(toks) != n:
                raise MatrixParseError("expected %d entries, got %d" % (n, len(toks)), line=no)
            if not set(toks) <= {"0", "1"}:
                raise MatrixParseError("dense entries must be 0 or 1", line=no)
            A[i] = [int(t) for t in toks]
    else:
        if len(body) != n:
            raise MatrixParseError(
                "expected %d column lines, got %d" % (n, len(body)),
                line=body[-1][0] if body else lines[0][0],
            )
        A = np.zeros((m, n), dtype=np.int8)
        for j, (no, ln) in enumerate(body):
            try:
                pos = [int(t) for t in ln.split()]
            except ValueError:
                raise MatrixParseError("non-integer position", line=no)
            if len(pos) != r:
                raise MatrixParseError("expected %d positions, got %d" % (r, len(pos)), line=no)
            if any(p < 0 or p >= m for p in pos):
                raise MatrixParseError("position out of range [0, %d)" % m, line=no)
            if any(b <= a for a, b in zip(pos, pos[1:])):
                raise MatrixParseError("positions must be strictly ascending", line=no)
            A[pos, j] = 1
    weights = A.sum(axis=0)
    if not (weights == r).all():
        j = int(np.argmin(weights == r))
        raise MatrixParseError("column %d has weight %d, expected %d" % (j, weights[j], r))
    return A, r


def write_coherence_json(path, report, extra=None):
    payload = {
        "coherence": report.coherence,
        "welch": report.welch,
        "rip_order": report.rip_order,
        "rip_constant_bound": report.rip_constant_bound,
        "argmax_pair": list(report.argmax_pair),
        "m": report.m,
        "n": report.n,
        "r": report.r,
    }
    if extra:
        payload.update(extra)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _fmt(v):
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return "%.17g" % v
    return str(v)


def write_report_csv(path, reports):
    """Combined RecoveryReport CSV, one block per report, k-major rows."""
    with open(path, "w") as fh:
        fh.write("matrix_id, k, input_snr_db, trials, recovery_pct, mean_output_snr_db\n")
        for rep in reports:
            for row in rep.rows:
                fh.write(
                    "%s, %d, %s, %d, %s, %s\n"
                    % (
                        rep.matrix_id,
                        row["k"],
                        _fmt(row["input_snr_db"]),
                        row["trials"],
                        _fmt(row["recovery_pct"]),
                        _fmt(row["mean_output_snr_db"]),
                    )
                )


def write_fig_csv(path, xlabel, xs, series, trials):
    """Figure-data CSV: x column plus one y column per matrix.

    `series` is an ordered list of (name, values) pairs; a comment header
    records the trial count behind every point.
    """
    with open(path, "w") as fh:
        fh.write("# trials = %d\n" % trials)
        fh.write(xlabel + ", " + ", ".join(name for name, _ in series) + "\n")
        for i, x in enumerate(xs):
            fh.write(_fmt(x) + ", " + ", ".join(_fmt(vals[i]) for _, vals in series) + "\n")
