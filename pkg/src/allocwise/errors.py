"""Exception hierarchy shared across the package.

Every error raised by allocwise derives from :class:`AllocwiseError` so
callers (CLI, HTTP layer) can map failures to exit codes / status codes
without matching on message text.
"""

from __future__ import annotations


class AllocwiseError(Exception):
    """Base class for all allocwise errors."""


class StructuralMatrixError(AllocwiseError):
    """Judgment matrix is not square or otherwise malformed."""


class OrderError(AllocwiseError):
    """Matrix order (or table index) outside the supported range."""


class InvalidMatrixError(AllocwiseError):
    """Matrix failed structural validation (positivity / unit diagonal)."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ConvergenceError(AllocwiseError):
    """Eigensolver did not converge; carries the last residual seen."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class DegenerateInputError(AllocwiseError):
    """Input carries no usable signal (zero vector, all-zero indices...)."""


class DegenerateRegressorError(AllocwiseError):
    """Regressor column has zero variance."""


class ColumnDomainError(AllocwiseError):
    """A column value is outside the transform's domain."""

    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


class AlignmentError(AllocwiseError):
    """Weights and tier features do not share the criterion layout."""


class InsufficientDataError(AllocwiseError):
    """Series too short for the requested operation."""


class DivergenceError(AllocwiseError):
    """Training produced a non-finite loss; names the offending epoch."""

    def __init__(self, message: str, epoch: int):
        super().__init__(message)
        self.epoch = epoch


class ModelStateError(AllocwiseError):
    """Operation requires a trained model."""


class ParseError(AllocwiseError):
    """Malformed input file; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.line = line


class SchemaValidationError(AllocwiseError):
    """Payload violates its kind's schema; carries field-level details."""

    def __init__(self, message: str, details: list[str] | None = None):
        super().__init__(message)
        self.details = details or []


class NotFoundError(AllocwiseError):
    """Unknown object id."""


class IdConflictError(AllocwiseError):
    """Object id already taken."""


class IntegrityError(AllocwiseError):
    """Stored object references something that does not resolve."""
