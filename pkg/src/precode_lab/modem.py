"""Square M-QAM with per-dimension Gray labelling, and the THP modulo map.

Symbols live on the odd-integer grid ``{±1, ±3, ..., ±(sqrt(M)-1)}`` in each
dimension. The first half of a symbol's bits select the in-phase level, the
second half the quadrature level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ParameterError


def _side(m: int) -> int:
    side = math.isqrt(m)
    if m < 4 or side * side != m or side & (side - 1):
        raise ParameterError(f"M must be a square power of two >= 4, got {m}")
    return side


@dataclass(frozen=True)
class QamSpec:
    M: int

    def __post_init__(self):
        _side(self.M)

    @property
    def side(self) -> int:
        return math.isqrt(self.M)

    @property
    def bits_per_symbol(self) -> int:
        return int(math.log2(self.M))

    @property
    def bits_per_dim(self) -> int:
        return self.bits_per_symbol // 2

    @property
    def symbol_variance(self) -> float:
        """``P_s = 2 (M - 1) / 3`` for equiprobable symbols."""
        return 2.0 * (self.M - 1) / 3.0

    @property
    def modulo_period(self) -> float:
        return 2.0 * self.side

    @cached_property
    def levels(self) -> np.ndarray:
        return np.arange(-(self.side - 1), self.side, 2, dtype=float)

    @cached_property
    def gray_codes(self) -> np.ndarray:
        """Gray code of each level index (ascending amplitude)."""
        idx = np.arange(self.side)
        return idx ^ (idx >> 1)

    @cached_property
    def _level_of_code(self) -> np.ndarray:
        inv = np.empty(self.side, dtype=int)
        inv[self.gray_codes] = np.arange(self.side)
        return inv

    @cached_property
    def alphabet(self) -> np.ndarray:
        lv = self.levels
        return (lv[:, None] + 1j * lv[None, :]).ravel()


def _bits_to_int(bits: np.ndarray) -> np.ndarray:
    weights = 1 << np.arange(bits.shape[-1] - 1, -1, -1)
    return bits @ weights


def _int_to_bits(values: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1)
    return (values[..., None] >> shifts) & 1


def map_bits(bits, M: int) -> np.ndarray:
    """Map a flat 0/1 sequence to QAM symbols, MSB first per dimension.

    For 16-QAM each dimension uses ``00 -> -3, 01 -> -1, 11 -> +1, 10 -> +3``.
    """
    spec = QamSpec(M)
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size % spec.bits_per_symbol:
        raise ParameterError(
            f"bit count {bits.size} is not a multiple of {spec.bits_per_symbol}"
        )
    if bits.size and (bits.min() < 0 or bits.max() > 1):
        raise ParameterError("bits must be 0 or 1")
    groups = bits.reshape(-1, 2, spec.bits_per_dim)
    codes = _bits_to_int(groups)
    lvl = spec.levels[spec._level_of_code[codes]]
    return lvl[:, 0] + 1j * lvl[:, 1]


def _slice_index(v: np.ndarray, spec: QamSpec) -> np.ndarray:
    # nearest odd level; exact midpoints go to the smaller level
    idx = np.ceil((v + spec.side - 2) / 2.0)
    return np.clip(idx, 0, spec.side - 1).astype(np.int64)


def decide(y, M: int) -> np.ndarray:
    """Nearest alphabet point of each sample (per-dimension slicing)."""
    spec = QamSpec(M)
    y = np.asarray(y, dtype=complex)
    lv = spec.levels
    return lv[_slice_index(y.real, spec)] + 1j * lv[_slice_index(y.imag, spec)]


def demap(y, M: int) -> np.ndarray:
    """Hard-decision bits for received samples, flattened symbol by symbol."""
    spec = QamSpec(M)
    y = np.atleast_1d(np.asarray(y, dtype=complex)).ravel()
    gi = spec.gray_codes[_slice_index(y.real, spec)]
    gq = spec.gray_codes[_slice_index(y.imag, spec)]
    b = spec.bits_per_dim
    return np.concatenate([_int_to_bits(gi, b), _int_to_bits(gq, b)], axis=1).ravel()


def symbol_bits(symbols, M: int) -> np.ndarray:
    """Bit labels of alphabet points; same as ``demap`` on noiseless input."""
    return demap(symbols, M)


def mod_reduce(x, M: int):
    """Fold ``x`` into the square ``[-sqrt(M), sqrt(M))^2`` along the lattice
    ``2 sqrt(M) (Z + jZ)``."""
    period = 2.0 * _side(M)
    x = np.asarray(x, dtype=complex)
    re = x.real - period * np.floor(0.5 + x.real / period)
    im = x.imag - period * np.floor(0.5 + x.imag / period)
    out = re + 1j * im
    return out[()] if out.ndim == 0 else out


def random_symbols(rng: np.random.Generator, shape, M: int) -> np.ndarray:
    """Uniform i.i.d. alphabet points."""
    spec = QamSpec(M)
    lv = spec.levels
    i = rng.integers(0, spec.side, size=shape)
    q = rng.integers(0, spec.side, size=shape)
    return lv[i] + 1j * lv[q]
