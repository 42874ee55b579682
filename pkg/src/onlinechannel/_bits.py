"""Small shared helpers: bit-vector conversions and integer rounding."""

from __future__ import annotations

import math

import numpy as np

from .exceptions import ValidationError


def to_bits(value, n: int | None = None) -> np.ndarray:
    """Normalize a bit vector to a 1-D uint8 array of 0/1 values.

    Accepts numpy arrays, sequences of 0/1, or a "0101" string.  When ``n``
    is given the length is checked.
    """
    if isinstance(value, str):
        if value and set(value) - {"0", "1"}:
            raise ValidationError(f"bit string may only contain 0/1: {value!r}")
        bits = np.frombuffer(value.encode(), dtype=np.uint8) - ord("0")
    else:
        bits = np.asarray(value, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValidationError(f"expected a 1-D bit vector, got shape {bits.shape}")
    if bits.size and bits.max() > 1:
        raise ValidationError("bit vector entries must be 0 or 1")
    if n is not None and bits.size != n:
        raise ValidationError(f"expected {n} bits, got {bits.size}")
    return bits


def bits_to_string(bits: np.ndarray) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel())


def bits_from_int(value: int, n: int) -> np.ndarray:
    """Binary expansion of ``value``, most significant bit first.

    With this convention numeric order of integers equals lexicographic
    order of the bit strings.
    """
    if value < 0 or value >> n:
        raise ValidationError(f"{value} does not fit in {n} bits")
    return np.array([(value >> (n - 1 - i)) & 1 for i in range(n)], dtype=np.uint8)


def int_from_bits(bits) -> int:
    out = 0
    for b in np.asarray(bits, dtype=np.uint8):
        out = (out << 1) | int(b)
    return out


def hamming(a, b) -> int:
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8)
    if a.shape != b.shape:
        raise ValidationError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))


def weight(bits) -> int:
    return int(np.count_nonzero(np.asarray(bits)))


def round_half_up(x: float) -> int:
    """Round to nearest integer, halves away from zero toward +inf."""
    return int(math.floor(x + 0.5))
