"""Simply generated random trees: exact engines, samplers, and limit checks."""

from .errors import (
    InsufficientWindowError,
    PrecisionFailureError,
    ResourceGuardError,
    UnsupportedPatternError,
    ValidationError,
)
from .weights import (
    OffspringLaw,
    SizeBiasedLaw,
    WeightSequence,
    builtin,
    classify,
    from_values,
    load_weights,
    save_weights,
    size_biased,
    span,
)

__version__ = "0.1.0"
