"""Command-line harness: ``generate | evaluate | compare``.

Every run is a pure function of (config, master seed): identical inputs
produce byte-identical output files.  Values may come from a JSON config
(``--config``, underscore keys) or from flags (dashed, same names); flags win.
Ranges are written ``a:b`` or ``a:b:step`` (inclusive) or as comma lists, and
SNR lists accept ``inf`` for the noiseless condition.

``COHERENCE_FORGE_THREADS`` caps worker parallelism.  This implementation
always executes the grid sequentially — the seeding scheme makes every trial
independently addressable, so any cap (including 0, the bit-reproducibility
mode) is honoured trivially; the variable is still validated.

Exit codes: 0 success, 2 validation error, 3 runtime failure.
"""

import argparse
import json
import math
import os
import sys
import warnings
from dataclasses import replace

import numpy as np

from . import matrixio
from .baselines import devore_matrix, random_binary_matrix
from .binary import coherence, construct, duplicate_column_pairs
from .errors import (
    CoherenceForgeError,
    LineSearchStallError,
    RetractionFailureError,
    ValidationError,
)
from .optimizer import OptimizerConfig
from .recovery import run_experiment

FIG3_SNR_DB = 35.0
FIG2_K = 6


def parse_int_list(value):
    """'a:b[:step]' (inclusive) or 'v1,v2,...' -> list of ints."""
    if isinstance(value, (list, tuple)):
        return [int(v) for v in value]
    text = str(value).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValidationError("bad range %r, expected a:b or a:b:step" % text)
        try:
            a, b = int(parts[0]), int(parts[1])
            step = int(parts[2]) if len(parts) == 3 else 1
        except ValueError:
            raise ValidationError("non-integer in range %r" % text)
        if step <= 0 or b < a:
            raise ValidationError("empty or descending range %r" % text)
        return list(range(a, b + 1, step))
    try:
        out = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ValidationError("non-integer in list %r" % text)
    if not out:
        raise ValidationError("empty integer list")
    return out


def parse_float_list(value):
    """Float analogue of parse_int_list; accepts 'inf' entries in comma lists."""
    if isinstance(value, (list, tuple)):
        out = [float(v) for v in value]
    else:
        text = str(value).strip()
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (2, 3):
                raise ValidationError("bad range %r, expected a:b or a:b:step" % text)
            try:
                a, b = float(parts[0]), float(parts[1])
                step = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise ValidationError("non-numeric in range %r" % text)
            if not (math.isfinite(a) and math.isfinite(b) and math.isfinite(step)):
                raise ValidationError("range endpoints must be finite in %r" % text)
            if step <= 0 or b < a:
                raise ValidationError("empty or descending range %r" % text)
            count = int(math.floor((b - a) / step + 1e-9)) + 1
            return [a + i * step for i in range(count)]
        try:
            out = [float(t) for t in text.split(",") if t.strip()]
        except ValueError:
            raise ValidationError("non-numeric in list %r" % text)
    if not out:
        raise ValidationError("empty numeric list")
    if any(math.isnan(v) for v in out):
        raise ValidationError("nan is not a valid list entry")
    return out


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise ValidationError("cannot read config: %s" % e)
    except json.JSONDecodeError as e:
        raise ValidationError("config is not valid JSON: %s" % e)
    if not isinstance(cfg, dict):
        raise ValidationError("config must be a JSON object")
    return cfg


def _get(ns, config, key, default=None):
    """Merged lookup: CLI flag beats config beats default."""
    val = getattr(ns, key, None)
    if val is not None:
        return val
    if key in config:
        return config[key]
    return default


def _require_int(ns, config, key):
    val = _get(ns, config, key)
    if val is None:
        raise ValidationError("missing required parameter --%s" % key.replace("_", "-"))
    return int(val)


def _threads_cap():
    raw = os.environ.get("COHERENCE_FORGE_THREADS")
    if raw is None:
        return 0
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError("COHERENCE_FORGE_THREADS must be an integer, got %r" % raw)
    if cap < 0:
        raise ValidationError("COHERENCE_FORGE_THREADS must be >= 0, got %d" % cap)
    return cap


def _optimizer_config(ns, config, seed):
    kwargs = {"seed": seed}
    for key in ("alpha_bar", "beta", "sigma", "tau"):
        val = _get(ns, config, key)
        if val is not None:
            kwargs[key] = float(val)
    for key in ("max_iters", "max_backtracks"):
        val = _get(ns, config, key)
        if val is not None:
            kwargs[key] = int(val)
    positivity = _get(ns, config, "positivity")
    if positivity is not None:
        kwargs["positivity"] = str(positivity)
    ladder = _get(ns, config, "alpha_ladder")
    if ladder is not None:
        kwargs["alpha_ladder"] = tuple(parse_float_list(ladder))
    cfg = OptimizerConfig(**kwargs)
    cfg.validate()
    return cfg


def _retry_seed(master, attempt):
    """Documented derivation for --retry-duplicates: attempt 0 is the master
    seed itself; attempt i > 0 draws from SeedSequence(master, spawn_key=(99991, i))."""
    if attempt == 0:
        return int(master)
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=(99991, attempt))
    return int(ss.generate_state(1, np.uint64)[0])


def cmd_generate(ns):
    config = _load_config(ns.config)
    m = _require_int(ns, config, "m")
    n = _require_int(ns, config, "n")
    r = _require_int(ns, config, "r")
    seed = int(_get(ns, config, "seed", 0))
    out = str(_get(ns, config, "out", "out"))
    retries = int(_get(ns, config, "retry_duplicates", 0))
    if retries < 0:
        raise ValidationError("--retry-duplicates must be >= 0")
    if not (1 <= r < m < n):
        raise ValidationError("need 1 <= r < m < n, got r=%d m=%d n=%d" % (r, m, n))
    cfg = _optimizer_config(ns, config, seed)
    os.makedirs(out, exist_ok=True)

    best = None  # (dups, coherence_report, A, trace, seed_used)
    for attempt in range(retries + 1):
        seed_i = _retry_seed(seed, attempt)
        try:
            A, report, trace = construct(m, n, r, replace(cfg, seed=seed_i))
        except (RetractionFailureError, LineSearchStallError) as exc:
            partial = getattr(exc, "trace", None)
            if partial is not None:
                partial.write_csv(os.path.join(out, "trace.csv"))
            raise
        dups = duplicate_column_pairs(A)
        if best is None or (dups, report.coherence) < (best[0], best[1].coherence):
            best = (dups, report, A, trace, seed_i)
        if dups == 0:
            break
    dups, report, A, trace, seed_used = best
    if dups > 0 and retries > 0:
        warnings.warn(
            "all %d attempts left duplicate columns; keeping the lowest-coherence "
            "one (seed %d, mu=%g)" % (retries + 1, seed_used, report.coherence)
        )

    dense_path = os.path.join(out, "matrix_dense.txt")
    sparse_path = os.path.join(out, "matrix_sparse.txt")
    json_path = os.path.join(out, "coherence.json")
    trace_path = os.path.join(out, "trace.csv")
    matrixio.write_matrix_dense(dense_path, A, r)
    matrixio.write_matrix_sparse(sparse_path, A, r)
    matrixio.write_coherence_json(
        json_path, report, extra={"seed": seed_used, "duplicate_column_pairs": dups}
    )
    trace.write_csv(trace_path)
    for path in (dense_path, sparse_path, json_path, trace_path):
        print("wrote %s" % path)
    print("coherence = %.17g (welch %.17g), status = %s" % (report.coherence, report.welch, trace.status))
    return 0


def _read_matrix_file(path):
    try:
        A, _ = matrixio.read_matrix(str(path))
    except OSError as exc:
        raise ValidationError("cannot read matrix file %s: %s" % (path, exc))
    return A


def cmd_evaluate(ns):
    config = _load_config(ns.config)
    path = _get(ns, config, "matrix")
    if path is None:
        raise ValidationError("missing required parameter --matrix")
    if isinstance(path, list):
        if len(path) != 1:
            raise ValidationError("evaluate takes exactly one --matrix")
        path = path[0]
    out = str(_get(ns, config, "out", "out"))
    seed = int(_get(ns, config, "seed", 0))
    trials = int(_get(ns, config, "trials", 200))
    k_range = parse_int_list(_get(ns, config, "k_range", "1:15"))
    snr_list = parse_float_list(_get(ns, config, "input_snr_list", "0:100:10"))
    matrix_id = _get(ns, config, "matrix_id")
    if matrix_id is None:
        matrix_id = os.path.splitext(os.path.basename(str(path)))[0]
    os.makedirs(out, exist_ok=True)

    A = _read_matrix_file(path)
    if max(k_range) > A.shape[0]:
        raise ValidationError(
            "k=%d exceeds m=%d for matrix %s" % (max(k_range), A.shape[0], matrix_id)
        )
    report = run_experiment(A, k_range, snr_list, trials, seed, matrix_id=matrix_id)
    report_path = os.path.join(out, "report.csv")
    matrixio.write_report_csv(report_path, [report])
    print("wrote %s" % report_path)
    return 0


def _compare_sources(ns, config):
    """Ordered matrix sources: config 'matrices' entries, then --matrix paths."""
    sources = []
    for entry in config.get("matrices", []):
        if not isinstance(entry, dict) or "id" not in entry:
            raise ValidationError("each config matrix entry needs an 'id'")
        sources.append(entry)
    for path in ns.matrix or []:
        sources.append({"id": os.path.splitext(os.path.basename(path))[0], "path": path})
    if len(sources) < 2:
        raise ValidationError("compare needs at least 2 matrix sources, got %d" % len(sources))
    ids = [str(s["id"]) for s in sources]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate matrix ids: %s" % ", ".join(sorted(ids)))
    return sources


def _load_source(src):
    mid = str(src["id"])
    if "path" in src:
        A = _read_matrix_file(src["path"])
    elif "devore" in src:
        spec = src["devore"]
        A = devore_matrix(int(spec["p"]), int(spec["degree"]))
    elif "random" in src:
        spec = src["random"]
        A = random_binary_matrix(
            int(spec["m"]), int(spec["n"]), int(spec["r"]), int(spec.get("seed", 0))
        )
    else:
        raise ValidationError("matrix source %r needs one of: path, devore, random" % mid)
    return mid, A


def cmd_compare(ns):
    config = _load_config(ns.config)
    out = str(_get(ns, config, "out", "out"))
    seed = int(_get(ns, config, "seed", 0))
    trials = int(_get(ns, config, "trials", 200))
    k_range = parse_int_list(_get(ns, config, "k_range", "1:15"))
    snr_list = parse_float_list(_get(ns, config, "input_snr_list", "0:100:10"))
    fig1_snr = float(_get(ns, config, "fig1_snr", float("inf")))
    if math.isnan(fig1_snr):
        raise ValidationError("fig1_snr must not be nan")
    sources = _compare_sources(ns, config)
    os.makedirs(out, exist_ok=True)

    # Load and validate every matrix before a single trial runs.
    loaded = [_load_source(src) for src in sources]
    for mid, A in loaded:
        if max(k_range) > A.shape[0]:
            raise ValidationError(
                "k=%d exceeds m=%d for matrix %s" % (max(k_range), A.shape[0], mid)
            )

    # Shared grid: the configured SNR list plus the figure anchor points.
    grid_snr = list(snr_list)
    for extra in (fig1_snr, FIG3_SNR_DB):
        if extra not in grid_snr:
            grid_snr.append(extra)

    reports = [
        run_experiment(A, k_range, grid_snr, trials, seed, matrix_id=mid)
        for mid, A in loaded
    ]

    report_path = os.path.join(out, "combined_report.csv")
    matrixio.write_report_csv(report_path, reports)
    written = [report_path]

    fig1 = [(rep.matrix_id, [rep.cell(k, fig1_snr)["recovery_pct"] for k in k_range]) for rep in reports]
    fig1_path = os.path.join(out, "fig1_recovery_vs_k.csv")
    matrixio.write_fig_csv(fig1_path, "k", k_range, fig1, trials)
    written.append(fig1_path)

    if FIG2_K in k_range:
        fig2 = [
            (rep.matrix_id, [rep.cell(FIG2_K, snr)["mean_output_snr_db"] for snr in snr_list])
            for rep in reports
        ]
        fig2_path = os.path.join(out, "fig2_output_snr_vs_input_snr.csv")
        matrixio.write_fig_csv(fig2_path, "input_snr_db", snr_list, fig2, trials)
        written.append(fig2_path)
    else:
        warnings.warn("k=%d not in k_range; skipping fig2 data" % FIG2_K)

    fig3 = [
        (rep.matrix_id, [rep.cell(k, FIG3_SNR_DB)["mean_output_snr_db"] for k in k_range])
        for rep in reports
    ]
    fig3_path = os.path.join(out, "fig3_output_snr_vs_sparsity.csv")
    matrixio.write_fig_csv(fig3_path, "k", k_range, fig3, trials)
    written.append(fig3_path)

    for path in written:
        print("wrote %s" % path)
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="coherence-forge",
        description="Low-coherence binary sensing matrices: construction and recovery benchmarks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="optimize and binarize one matrix")
    gen.add_argument("--config", help="JSON config file; flags override its keys")
    gen.add_argument("--m", type=int, help="rows")
    gen.add_argument("--n", type=int, help="columns")
    gen.add_argument("--r", type=int, help="ones per column")
    gen.add_argument("--seed", type=int, help="master seed (default 0)")
    gen.add_argument("--out", help="output directory (default out)")
    gen.add_argument("--alpha-ladder", dest="alpha_ladder", help="comma list, coherence units")
    gen.add_argument("--alpha-bar", dest="alpha_bar", type=float, help="initial step size")
    gen.add_argument("--beta", type=float, help="backtracking factor")
    gen.add_argument("--sigma", type=float, help="Armijo slope fraction")
    gen.add_argument("--tau", type=float, help="gradient-norm tolerance")
    gen.add_argument("--max-iters", dest="max_iters", type=int, help="per-rung iteration cap")
    gen.add_argument("--max-backtracks", dest="max_backtracks", type=int)
    gen.add_argument("--positivity", choices=["guarded", "free"], help="dynamics mode")
    gen.add_argument(
        "--retry-duplicates",
        dest="retry_duplicates",
        type=int,
        help="re-seed and rerun up to N times if binarization leaves duplicate columns",
    )
    gen.set_defaults(func=cmd_generate)

    ev = sub.add_parser("evaluate", help="benchmark one matrix file with OMP recovery")
    ev.add_argument("--config", help="JSON config file; flags override its keys")
    ev.add_argument("--matrix", help="matrix file (dense or sparse serialization)")
    ev.add_argument("--matrix-id", dest="matrix_id", help="label in the report (default: file stem)")
    ev.add_argument("--k-range", dest="k_range", help="sparsity grid, e.g. 1:15 or 2,4,6")
    ev.add_argument("--input-snr-list", dest="input_snr_list", help="dB grid, e.g. 0:100:10 or inf")
    ev.add_argument("--trials", type=int, help="trials per grid cell (default 200)")
    ev.add_argument("--seed", type=int, help="master seed (default 0)")
    ev.add_argument("--out", help="output directory (default out)")
    ev.set_defaults(func=cmd_evaluate)

    cmp_ = sub.add_parser("compare", help="benchmark several matrices on a shared grid")
    cmp_.add_argument("--config", help="JSON config file; may list matrix sources")
    cmp_.add_argument(
        "--matrix",
        action="append",
        help="matrix file to include (repeatable; id = file stem)",
    )
    cmp_.add_argument("--k-range", dest="k_range", help="sparsity grid (default 1:15)")
    cmp_.add_argument("--input-snr-list", dest="input_snr_list", help="dB grid (default 0:100:10)")
    cmp_.add_argument("--fig1-snr", dest="fig1_snr", help="input SNR for fig1 (default inf)")
    cmp_.add_argument("--trials", type=int, help="trials per grid cell (default 200)")
    cmp_.add_argument("--seed", type=int, help="master seed (default 0)")
    cmp_.add_argument("--out", help="output directory (default out)")
    cmp_.set_defaults(func=cmd_compare)
    return parser


def main(argv=None):
    ns = build_parser().parse_args(argv)
    try:
        _threads_cap()
        return ns.func(ns)
    except ValidationError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except CoherenceForgeError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
