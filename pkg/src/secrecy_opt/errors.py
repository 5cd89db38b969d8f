"""Exception hierarchy shared across the package."""


class SecrecyOptError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SecrecyOptError, ValueError):
    """Malformed user input: bad shapes, non-PSD covariances, bad files."""


class DimensionMismatchError(InvalidInputError):
    """Matrix dimensions are inconsistent with each other or with a config."""


class DegenerateChannelError(SecrecyOptError):
    """A construction that needs a generic (full-rank) channel hit a rank
    collapse.  The message carries the offending quantity."""


class InfeasibleConfigError(SecrecyOptError):
    """The antenna configuration cannot support the requested scheme
    (positive secure-degrees-of-freedom condition violated)."""


class SolverFailureError(SecrecyOptError):
    """A numerical solver failed to return a usable solution."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
