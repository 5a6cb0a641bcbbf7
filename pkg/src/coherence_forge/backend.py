"""Kernel backend selection.

The compiled Cython extension is preferred when importable; otherwise the
NumPy fallback takes over with identical signatures.  Set the environment
variable COHERENCE_FORGE_BACKEND to "fallback" or "cython" to force a choice
(benchmarks and backend-parity tests use this).
"""

import os

from . import _fallback

_forced = os.environ.get("COHERENCE_FORGE_BACKEND", "").strip().lower()

if _forced == "fallback":
    kernels = _fallback
    BACKEND = "fallback"
elif _forced == "cython":
    from . import _kernels as kernels  # ImportError here is deliberate

    BACKEND = "cython"
else:
    try:
        from . import _kernels as kernels

        BACKEND = "cython"
    except ImportError:
        kernels = _fallback
        BACKEND = "fallback"
