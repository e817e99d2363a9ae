"""Exception hierarchy shared by the library and the CLI."""


class KrigboundError(Exception):
    """Base class for all library errors."""


class InvalidInputError(KrigboundError, ValueError):
    """Bad shapes, non-finite values, or out-of-domain parameters."""


class DuplicatePointsError(InvalidInputError):
    """Two design points coincide, so the correlation matrix is singular."""


class SingularMatrixError(KrigboundError, ArithmeticError):
    """Cholesky failed at every rung of the jitter ladder.

    Attributes
    ----------
    pivot : float
        The smallest pivot seen at the last failed attempt.
    """

    def __init__(self, message, pivot=float("nan")):
        super().__init__(message)
        self.pivot = pivot


class ConditioningError(SingularMatrixError):
    """Raised by kriging and sampling when factorization fails."""


class ResourceError(KrigboundError, MemoryError):
    """A requested evaluation grid is too large."""
