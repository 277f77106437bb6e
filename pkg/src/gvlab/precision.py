"""Default working precision for the high-precision paths."""

import os

import mpmath

DEFAULT_BITS = 256


def default_bits() -> int:
    """Precision in bits, honouring the ``GVLAB_PRECISION_BITS`` override."""
    raw = os.environ.get("GVLAB_PRECISION_BITS")
    if raw:
        bits = int(raw)
        if bits < 53:
            raise ValueError("GVLAB_PRECISION_BITS must be at least 53")
        return bits
    return DEFAULT_BITS


def workprec(bits: int | None = None):
    return mpmath.workprec(bits if bits is not None else default_bits())
