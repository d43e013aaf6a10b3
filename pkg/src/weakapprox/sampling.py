"""Point sources on [0,1)^dim and the Monte Carlo / quasi-Monte Carlo estimator."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import ContractError, EstimationError, StepFailure
from .sobol import DirectionTable, default_table, sobol_block_int

DEFAULT_BLOCK = 16384


class PointSource:
    """Indexable sequence of points in [0,1)^dim.

    ``block(start, count)`` returns points ``start .. start+count-1`` as a
    ``(count, dim)`` array and must agree row-for-row with ``point(i)``.
    """

    dim: int
    kind: str

    def block(self, start: int, count: int) -> np.ndarray:
        raise NotImplementedError

    def point(self, i: int) -> np.ndarray:
        return self.block(i, 1)[0]

    def describe(self) -> str:
        return self.kind


class PrngSource(PointSource):
    """Counter-based Philox-4x64 stream keyed by ``(seed, stream)``.

    Point i is produced from counters starting at ``i * ceil(dim/4)``, so any
    point can be generated without touching its predecessors.  Uniforms are
    ``(k + 1/2) 2**-53`` for a 53-bit integer k, which keeps them strictly
    inside (0, 1).
    """

    kind = "mc"

    def __init__(self, dim: int, seed: int = 0, stream: int = 0):
        if dim < 1:
            raise ContractError("dimension must be positive")
        self.dim = int(dim)
        self.seed = int(seed) & (2**64 - 1)
        self.stream = int(stream) & (2**64 - 1)
        self._stride = -(-self.dim // 4)

    def block(self, start: int, count: int) -> np.ndarray:
        if start < 0 or count < 0:
            raise ContractError("negative point index")
        gen = np.random.Philox(key=[self.seed, self.stream], counter=[start * self._stride, 0, 0, 0])
        raw = gen.random_raw(count * self._stride * 4).reshape(count, self._stride * 4)
        return ((raw[:, : self.dim] >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53

    def describe(self) -> str:
        return f"mc:{self.seed}"


class SobolSource(PointSource):
    """Unscrambled Sobol points, optionally with a seeded digital shift.

    Index i of the source is Sobol index ``skip + i``; the default skip of 1
    drops the all-zero first point.
    """

    kind = "qmc"

    def __init__(
        self,
        dim: int,
        skip: int = 1,
        table: Optional[DirectionTable] = None,
        shift_seed: Optional[int] = None,
    ):
        if dim < 1:
            raise ContractError("dimension must be positive")
        if skip < 0:
            raise ContractError("skip must be non-negative")
        self.dim = int(dim)
        self.skip = int(skip)
        self.table = table if table is not None else default_table()
        self.shift = None
        if shift_seed is not None:
            rng = np.random.default_rng(shift_seed)
            self.shift = rng.integers(0, 2**32, size=self.dim, dtype=np.uint64).astype(np.uint32)

    def block(self, start: int, count: int) -> np.ndarray:
        ints = sobol_block_int(self.table, self.skip + start, count, self.dim)
        if self.shift is not None:
            ints ^= self.shift
        return ints * 2.0**-32

    def describe(self) -> str:
        return f"qmc:{self.skip}"


@dataclass(frozen=True)
class EstimateResult:
    mean: float
    variance: float
    stderr: float
    m: int


def _partial(values: np.ndarray):
    mean = float(np.mean(values))
    return values.size, mean, float(np.sum((values - mean) ** 2))


def merge_stats(a, b):
    """Combine two ``(count, mean, M2)`` triples (Chan et al.)."""
    na, ma, sa = a
    nb, mb, sb = b
    n = na + nb
    delta = mb - ma
    return n, ma + delta * (nb / n), sa + sb + delta * delta * (na * nb / n)


def estimate(
    sample_fn: Callable[[np.ndarray], np.ndarray],
    m: int,
    source: PointSource,
    block: int = DEFAULT_BLOCK,
    threads: int = 1,
) -> EstimateResult:
    """Mean and sample variance of ``sample_fn`` over source points ``0 .. m-1``.

    ``sample_fn`` maps a ``(count, dim)`` array of points to ``count`` values.
    Points are processed in fixed blocks and the per-block statistics are
    merged in block order, so the result does not depend on ``threads``.
    """
    if m < 2:
        raise ContractError("need at least two samples")
    if block < 1:
        raise ContractError("block size must be positive")
    starts = range(0, m, block)

    def run(start):
        count = min(block, m - start)
        try:
            values = np.asarray(sample_fn(source.block(start, count)), dtype=float)
        except StepFailure as exc:
            if exc.sample is not None:
                exc.point_index = start + exc.sample
            raise
        if values.shape != (count,):
            raise ContractError(f"sample function returned shape {values.shape}, expected ({count},)")
        bad = ~np.isfinite(values)
        if bad.any():
            idx = start + int(np.argmax(bad))
            raise EstimationError(f"non-finite sample at point {idx}", idx)
        return _partial(values)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, starts))
    else:
        parts = [run(s) for s in starts]

    total = parts[0]
    for p in parts[1:]:
        total = merge_stats(total, p)
    n, mean, m2 = total
    variance = m2 / (n - 1)
    return EstimateResult(mean, variance, math.sqrt(variance / n), n)


def make_source(sampler: str, dim: int, seed: int = 0, skip: int = 1, stream: int = 0) -> PointSource:
    if sampler == "mc":
        return PrngSource(dim, seed, stream)
    if sampler == "qmc":
        return SobolSource(dim, skip)
    raise ContractError(f"unknown sampler {sampler!r}")
