"""Exception and warning types shared across the package.

Two branches matter to callers: ValidationError covers bad inputs that should
be rejected before any work starts (CLI exit code 2), ComputationError covers
failures of the numerical machinery itself (CLI exit code 3).
"""


class CoherenceForgeError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(CoherenceForgeError):
    """Invalid parameters, configs, or file contents."""


class ComputationError(CoherenceForgeError):
    """A numerical routine failed at runtime."""


class InvalidWeightError(ValidationError):
    """Column weight r outside the admissible range."""


class DegeneratePointError(ValidationError):
    """r = m collapses ES_m to a single point with no tangent space."""


class EmptyInputError(ValidationError):
    pass


class TooFewColumnsError(ValidationError):
    """The pairwise objective needs at least two columns."""


class ZeroColumnError(ValidationError):
    """Coherence is undefined for matrices with a zero column."""


class InvalidFieldError(ValidationError):
    """DeVore construction requires a prime modulus."""


class DegreeTooLargeError(ValidationError):
    """DeVore polynomial degree must be < p."""


class InvalidSparsityError(ValidationError):
    pass


class ShapeError(ValidationError):
    pass


class DegenerateSnrError(ValidationError):
    """Finite target SNR is meaningless for an all-zero signal."""


class MatrixParseError(ValidationError):
    """Matrix file failed to parse; carries a 1-based line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)
        self.line = line


class RetractionFailureError(ComputationError):
    """Retraction produced no admissible point after the halving cap."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class LineSearchStallError(ComputationError):
    """Armijo search exhausted max_backtracks with a non-small gradient."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class DuplicateColumnsWarning(UserWarning):
    """Binarized matrix contains identical columns (coherence 1)."""


class NegativityWarning(UserWarning):
    """Relaxed iterates stayed below -1e-9 for many consecutive iterations."""
