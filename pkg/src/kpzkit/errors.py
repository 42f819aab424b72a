"""Shared exception types."""


class InvalidParameterError(ValueError):
    """A parameter is outside its documented domain."""


class OutOfWindowError(ValueError):
    """A query cannot be answered exactly from the simulated window.

    Raised when the backward light cone of a requested space-time point is
    not covered by the region on which events were sampled.
    """


class AccuracyError(RuntimeError):
    """A numerical routine could not certify the requested accuracy.

    The message carries diagnostics (truncation sizes, observed shifts)
    so the caller can enlarge the discretization and retry.
    """
