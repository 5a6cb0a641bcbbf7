"""coherence_forge: low-coherence binary sensing matrices by Riemannian descent.

Columns live on the product manifold ES_m^n (unit sum, squared norm 1/r per
column); a smooth-max surrogate of the worst-case column coherence is driven
down by projected gradient descent with an annealed sharpness ladder, then
each column is binarized onto its r largest entries.  The package also ships
two classical baselines (DeVore's polynomial construction and random
column-regular matrices) and an OMP recovery benchmark for comparing them.
"""

from .backend import BACKEND
from .baselines import devore_matrix, random_binary_matrix
from .binary import (
    CoherenceReport,
    binarize,
    coherence,
    construct,
    duplicate_column_pairs,
    welch_bound,
)
from .errors import (
    CoherenceForgeError,
    ComputationError,
    DegenerateSnrError,
    DuplicateColumnsWarning,
    LineSearchStallError,
    MatrixParseError,
    NegativityWarning,
    RetractionFailureError,
    ValidationError,
)
from .manifold import random_matrix, random_point, retract, validate_point
from .objective import objective, riemannian_gradient, smooth_max
from .optimizer import DEFAULT_LADDER, IterationTrace, OptimizerConfig, optimize
from .recovery import (
    RecoveryReport,
    SparseSignal,
    TrialResult,
    gen_sparse_signal,
    measure,
    omp,
    output_snr_db,
    run_experiment,
    run_trial,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CoherenceForgeError",
    "CoherenceReport",
    "ComputationError",
    "DEFAULT_LADDER",
    "DegenerateSnrError",
    "DuplicateColumnsWarning",
    "IterationTrace",
    "LineSearchStallError",
    "MatrixParseError",
    "NegativityWarning",
    "OptimizerConfig",
    "RecoveryReport",
    "RetractionFailureError",
    "SparseSignal",
    "TrialResult",
    "ValidationError",
    "binarize",
    "coherence",
    "construct",
    "devore_matrix",
    "duplicate_column_pairs",
    "gen_sparse_signal",
    "measure",
    "omp",
    "optimize",
    "output_snr_db",
    "random_binary_matrix",
    "random_matrix",
    "random_point",
    "retract",
    "riemannian_gradient",
    "run_experiment",
    "run_trial",
    "smooth_max",
    "validate_point",
    "welch_bound",
    "__version__",
]
