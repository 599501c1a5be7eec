"""Fixed-point encoding of real vectors into the scalar field.

A real x becomes round(x * 2^frac_bits), clamped to the signed
``int_bits``-bit range, and negative integers are embedded as q - |z|.
Configuration rejects any (n_max, int_bits) for which a sum of n_max
clamped values could wrap modulo q.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from zkfl.errors import ConfigError, RangeError


class Quantized(NamedTuple):
    values: list[int]
    clamped: np.ndarray  # bool mask of coordinates that hit the clamp


@dataclass(frozen=True)
class FixedPointCodec:
    order: int
    frac_bits: int = 16
    int_bits: int = 32
    n_max: int = 64

    def __post_init__(self):
        if self.frac_bits < 0 or self.int_bits < 1 or self.n_max < 1:
            raise ConfigError("frac_bits >= 0, int_bits >= 1 and n_max >= 1 required")
        if self.n_max * 2**self.int_bits >= self.order:
            raise ConfigError(
                f"n_max * 2^int_bits = {self.n_max * 2**self.int_bits} must be below the group order "
                f"{self.order}; sums would wrap"
            )

    @property
    def scale(self) -> int:
        return 1 << self.frac_bits

    @property
    def lo(self) -> int:
        return -(1 << (self.int_bits - 1))

    @property
    def hi(self) -> int:
        return (1 << (self.int_bits - 1)) - 1

    def to_int(self, x) -> np.ndarray:
        """Signed fixed-point integers (before field embedding), plus clamp mask."""
        arr = np.asarray(x, dtype=np.float64)
        raw = np.rint(arr * self.scale)
        clamped = (raw < self.lo) | (raw > self.hi)
        return np.clip(raw, self.lo, self.hi).astype(np.int64), clamped

    def embed(self, z: int) -> int:
        return z % self.order

    def quantize_vector(self, x: Sequence[float]) -> Quantized:
        ints, clamped = self.to_int(x)
        q = self.order
        return Quantized([int(v) % q for v in ints], clamped)

    def quantize(self, x: Sequence[float]) -> list[int]:
        return self.quantize_vector(x).values

    def signed(self, z: Sequence[int], n_summed: int = 1) -> np.ndarray:
        """Lift field elements back to signed integers, checking the window for n_summed terms."""
        if n_summed < 1:
            raise ValueError("n_summed must be >= 1")
        q = self.order
        half = q // 2
        bound = n_summed * (1 << (self.int_bits - 1))
        out = np.empty(len(z), dtype=np.int64)
        for j, v in enumerate(z):
            s = v - q if v > half else v
            if abs(s) > bound:
                raise RangeError(f"coordinate {j}: magnitude {abs(s)} exceeds {bound} for {n_summed} summands")
            out[j] = s
        return out

    def dequantize_vector(self, z: Sequence[int], n_summed: int = 1) -> np.ndarray:
        return self.signed(z, n_summed).astype(np.float64) / self.scale


def quantize_vector(x: Sequence[float], codec: FixedPointCodec) -> Quantized:
    return codec.quantize_vector(x)


def dequantize_vector(z: Sequence[int], codec: FixedPointCodec, n_summed: int = 1) -> np.ndarray:
    return codec.dequantize_vector(z, n_summed)
