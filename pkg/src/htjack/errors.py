"""Shared exception types."""


class ResourceLimitError(RuntimeError):
    """A combinatorial enumeration would exceed its configured budget."""


class ComputationError(RuntimeError):
    """A numerical construction failed a built-in consistency check.

    Carries a ``details`` dict with the diagnostic payload (per-interval
    masses, scan traces, ...) so callers can emit machine-readable errors.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = dict(details or {})


class BracketError(ComputationError):
    """A predicted root bracket showed no sign change."""
