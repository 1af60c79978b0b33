"""Exception types raised across the package.

Everything derives from DmdcError so callers can catch the whole family;
the subclasses distinguish bad inputs, bad files, and numerical trouble.
"""


class DmdcError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(DmdcError, ValueError):
    """Input data violates a precondition (non-finite entries, bad policy)."""


class ShapeError(DmdcError, ValueError):
    """Matrix dimensions are inconsistent with the requested operation."""


class DegenerateMatrixError(DmdcError, ValueError):
    """A matrix has no usable positive spectrum (e.g. all-zero input)."""


class InsufficientDataError(DmdcError, ValueError):
    """Too few snapshots to form the requested data matrices."""


class TruncationOrderError(DmdcError, ValueError):
    """Input-space truncation p is smaller than output-space truncation r."""


class NumericalFailureError(DmdcError, RuntimeError):
    """An iterative kernel (e.g. the eigensolver) failed to converge."""


class DivergenceError(DmdcError, RuntimeError):
    """Simulation produced a non-finite state."""

    def __init__(self, step: int, message: str | None = None):
        self.step = step
        super().__init__(message or f"non-finite state at step {step}")


class SingularFrequencyError(DmdcError, ValueError):
    """A frequency grid point coincides with an eigenvalue of A."""

    def __init__(self, omega: float, message: str | None = None):
        self.omega = omega
        super().__init__(
            message or f"e^(i*{omega!r}) is an eigenvalue of A within 1e-12"
        )


class FormatError(DmdcError, ValueError):
    """A file violates its declared layout (bad magic, ragged rows, ...)."""


class ParseError(DmdcError, ValueError):
    """A cell of a text file does not parse as a finite number."""


class LengthError(DmdcError, ValueError):
    """A binary payload is shorter or longer than its header declares."""


class SchemaError(DmdcError, ValueError):
    """A structured document is missing fields or carries unknown tags."""


class InvalidConfigError(DmdcError, ValueError):
    """A generator or run configuration is out of its valid range."""


class UsageError(DmdcError, ValueError):
    """Command-line arguments are inconsistent or incomplete."""
