"""Discrete Volterra equations A_g(n) = n^-beta, little Mellin transforms and Tauberian growth tests."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    DomainError,
    GVLabError,
    InvalidArgumentError,
    NotInvertibleError,
    OutOfRangeError,
    PoleProximityError,
    PrecisionError,
    SingularError,
    TruncationError,
    UnsupportedError,
)
