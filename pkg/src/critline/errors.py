"""Exception hierarchy shared by all modules.

The CLI maps :class:`UsageError` (and :class:`DomainError`) to exit code 2 and
:class:`NumericError` to exit code 3.
"""


class CritlineError(Exception):
    pass


class UsageError(CritlineError, ValueError):
    """Arguments outside the documented range of an operation."""


class DomainError(UsageError):
    """Input at a pole or outside the analytic domain of a function."""


class PoleError(DomainError):
    pass


class NumericError(CritlineError, ArithmeticError):
    """A numerical procedure failed to reach its stated accuracy."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class ConsistencyError(NumericError):
    """An internal cross-check (e.g. realness of Z) was violated."""


class RepositionError(UsageError):
    """Requested abscissa sits too close to a zero; move it and retry."""
