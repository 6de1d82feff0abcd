"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Invalid input data (weights, encodings, parameters)."""


class PrecisionFailureError(ArithmeticError):
    """A series tail bound could not be met at the requested precision."""


class ResourceGuardError(RuntimeError):
    """A configurable size/memory/retry guard was exceeded."""


class UnsupportedPatternError(ValueError):
    """Pattern shape outside what the exact engine can evaluate."""


class InsufficientWindowError(LookupError):
    """A pattern probes addresses beyond the materialized window.

    Deliberately distinct from a False match: the truncated object does not
    carry enough information to decide the constraint.
    """
