"""Exception hierarchy shared by all modules."""


class SubsparseError(Exception):
    """Base class for library errors."""


class DomainError(SubsparseError, ValueError):
    """Input outside the mathematical domain of an operation."""


class ResourceError(SubsparseError):
    """A combinatorial budget was exceeded.

    ``cap`` is the configured limit and ``required`` the budget the call
    would have needed.
    """

    def __init__(self, message, cap=None, required=None):
        super().__init__(message)
        self.cap = cap
        self.required = required


class SolverError(SubsparseError):
    """Numerical failure inside an optimization routine."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
