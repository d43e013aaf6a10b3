"""Sobol digital net in base 2 with Gray-code ordering.

Direction numbers are read from a plain-text table: a header line, then rows
``d s a m_1 ... m_s`` for dimensions 2, 3, ...  Dimension 1 is the van der
Corput sequence.  The bundled table holds the Joe-Kuo (new-joe-kuo-6.21201)
numbers for the first 4096 dimensions.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, ContractError

BITS = 32
MAX_INDEX = 2**BITS - 1
_SCALE = 2.0**-BITS

DEFAULT_TABLE_PATH = os.path.join(os.path.dirname(__file__), "data", "joe_kuo_6_4096.txt")


@dataclass(frozen=True)
class DirectionTable:
    """``v[j, k]`` is the k-th direction number of dimension j+1 (as 32-bit ints)."""

    v: np.ndarray

    @property
    def capacity(self) -> int:
        return self.v.shape[0]


def _direction_numbers(s: int, a: int, m: list) -> np.ndarray:
    v = np.zeros(BITS, dtype=np.uint64)
    for k in range(min(s, BITS)):
        v[k] = m[k] << (BITS - 1 - k)
    for k in range(s, BITS):
        x = int(v[k - s])
        x ^= x >> s
        for i in range(1, s):
            if (a >> (s - 1 - i)) & 1:
                x ^= int(v[k - i])
        v[k] = x
    return v


def parse_direction_table(lines, max_dim=None) -> DirectionTable:
    """Build a table from the text rows; ``max_dim`` truncates early."""
    it = iter(lines)
    try:
        next(it)  # header
    except StopIteration:
        raise ConfigurationError("empty direction-number table") from None
    rows = [np.array([1 << (BITS - 1 - k) for k in range(BITS)], dtype=np.uint64)]
    expected = 2
    for lineno, line in enumerate(it, start=2):
        if max_dim is not None and expected > max_dim:
            break
        fields = line.split()
        if not fields:
            continue
        try:
            d, s, a, *m = (int(f) for f in fields)
        except ValueError:
            raise ConfigurationError(f"line {lineno}: non-integer field") from None
        if d != expected:
            raise ConfigurationError(f"line {lineno}: expected dimension {expected}, got {d}")
        if s < 1 or len(m) != s:
            raise ConfigurationError(f"line {lineno}: degree {s} but {len(m)} initial numbers")
        if a < 0 or a >= 1 << max(s - 1, 0):
            raise ConfigurationError(f"line {lineno}: coefficient word {a} out of range")
        for k, mk in enumerate(m, start=1):
            if mk % 2 == 0 or mk >= 1 << k:
                raise ConfigurationError(f"line {lineno}: m_{k}={mk} must be odd and < 2^{k}")
        rows.append(_direction_numbers(s, a, m))
        expected += 1
    return DirectionTable(np.vstack(rows).astype(np.uint32))


def load_direction_table(path=DEFAULT_TABLE_PATH, max_dim=None) -> DirectionTable:
    with open(path) as fh:
        return parse_direction_table(fh, max_dim)


@lru_cache(maxsize=4)
def default_table() -> DirectionTable:
    return load_direction_table()


def _check(table: DirectionTable, index: int, dim: int):
    if dim < 1:
        raise ContractError("dimension must be positive")
    if dim > table.capacity:
        raise ConfigurationError(
            f"dimension {dim} exceeds the direction table capacity {table.capacity}"
        )
    if index < 0 or index > MAX_INDEX:
        raise ContractError(f"Sobol index {index} outside [0, 2^{BITS})")


def sobol_int(table: DirectionTable, index: int, dim: int) -> np.ndarray:
    """Integer coordinates of point ``index``: XOR of direction numbers over Gray-code bits."""
    _check(table, index, dim)
    gray = index ^ (index >> 1)
    x = np.zeros(dim, dtype=np.uint32)
    k = 0
    while gray:
        if gray & 1:
            x ^= table.v[:dim, k]
        gray >>= 1
        k += 1
    return x


def sobol_point(table: DirectionTable, index: int, dim: int) -> np.ndarray:
    return sobol_int(table, index, dim) * _SCALE


def sobol_block(table: DirectionTable, start: int, count: int, dim: int) -> np.ndarray:
    """Points ``start .. start+count-1`` as a ``(count, dim)`` array.

    Consecutive Gray codes differ in the lowest set bit of the index, so each
    row is the previous one XOR a single direction number.
    """
    return sobol_block_int(table, start, count, dim) * _SCALE


def sobol_block_int(table: DirectionTable, start: int, count: int, dim: int) -> np.ndarray:
    """Like :func:`sobol_block` but returning raw 32-bit integers."""
    if count < 1:
        return np.empty((0, dim), dtype=np.uint32)
    _check(table, start + count - 1, dim)
    first = sobol_int(table, start, dim)
    idx = np.arange(start + 1, start + count, dtype=np.int64)
    ctz = np.log2(idx & -idx).astype(np.int64)
    steps = np.empty((count, dim), dtype=np.uint32)
    steps[0] = first
    steps[1:] = table.v[:dim, ctz].T
    np.bitwise_xor.accumulate(steps, axis=0, out=steps)
    return steps
