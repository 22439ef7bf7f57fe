"""Seeded randomness: count distributions, pixel partitions, center placement.

Every stochastic choice flows through a numpy Generator obtained from
stream_rng(seed, stream), so identical (seed, stream) pairs replay the same
draw sequence and a dataset is a pure function of its spec.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

UNIFORM = "uniform"
POW102X = "pow102x"


def stream_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Independent, reproducible random stream for (seed, stream)."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence((seed, stream))))


@dataclass(frozen=True)
class CountDistribution:
    """Law of the per-image object count.

    UNIFORM draws from {low..m}.  POW102X draws from {1..m} with
    cumulative weight F(x) = 10^(2x) / 10^(2m) on 1 < x <= m (0 below, 1
    above), which piles nearly all mass on m; a `uniform_mix` fraction of
    draws falls back to uniform{1..m} so small counts still appear.
    """

    kind: str
    m: int
    uniform_mix: float = 0.1
    low: int = 0

    def __post_init__(self):
        if self.kind not in (UNIFORM, POW102X):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if not 3 <= self.m <= 9:
            raise ValueError(f"maximum count m={self.m} outside 3..9")
        if not 0.0 <= self.uniform_mix <= 1.0:
            raise ValueError(f"uniform_mix {self.uniform_mix} outside [0, 1]")
        if self.low not in (0, 1):
            raise ValueError(f"low={self.low} must be 0 or 1")

    @property
    def support(self):
        lo = self.low if self.kind == UNIFORM else 1
        return range(lo, self.m + 1)


def count_pmf(dist: CountDistribution) -> np.ndarray:
    """Probability of each count in dist.support, in order."""
    return _pmf_cached(dist.kind, dist.m, dist.uniform_mix, dist.low).copy()


@lru_cache(maxsize=None)
def _pmf_cached(kind, m, mix, low):
    if kind == UNIFORM:
        n = m - low + 1
        return np.full(n, 1.0 / n)

    def cdf(x):
        if x <= 1:
            return 0.0
        if x >= m:
            return 1.0
        return 10.0 ** (2 * x) / 10.0 ** (2 * m)

    base = np.array([cdf(n) - cdf(n - 1) for n in range(1, m + 1)])
    return (1.0 - mix) * base + mix / m


@lru_cache(maxsize=None)
def _cdf_cached(kind, m, mix, low):
    return np.cumsum(_pmf_cached(kind, m, mix, low))


def sample_count(dist: CountDistribution, rng: np.random.Generator) -> int:
    """One draw from the count distribution."""
    cdf = _cdf_cached(dist.kind, dist.m, dist.uniform_mix, dist.low)
    i = int(np.searchsorted(cdf, rng.random(), side="right"))
    i = min(i, len(cdf) - 1)  # guard the cdf[-1] < 1 rounding sliver
    return dist.support[i]


def sample_counts(dist: CountDistribution, rng: np.random.Generator, size: int) -> np.ndarray:
    cdf = _cdf_cached(dist.kind, dist.m, dist.uniform_mix, dist.low)
    idx = np.minimum(np.searchsorted(cdf, rng.random(size), side="right"), len(cdf) - 1)
    return np.asarray(dist.support)[idx]


@dataclass(frozen=True)
class PixelPartition:
    """Disjoint train/test split of the legal center positions."""

    universe: tuple
    train_side: tuple
    test_side: tuple

    def __post_init__(self):
        train, test = set(self.train_side), set(self.test_side)
        if train & test:
            raise ValueError("train and test sides overlap")
        if train | test != set(self.universe):
            raise ValueError("sides do not cover the universe")

    @property
    def sizes(self):
        return (len(self.train_side), len(self.test_side))


def partition_pixels(universe, test_size: int, rng: np.random.Generator) -> PixelPartition:
    """Uniformly random test_size-subset becomes the test side."""
    universe = tuple(universe)
    if not 0 < test_size < len(universe):
        raise ValueError(
            f"test_size {test_size} must be strictly between 0 and {len(universe)}"
        )
    picks = set(rng.choice(len(universe), size=test_size, replace=False).tolist())
    test = tuple(p for i, p in enumerate(universe) if i in picks)
    train = tuple(p for i, p in enumerate(universe) if i not in picks)
    return PixelPartition(universe=universe, train_side=train, test_side=test)


def sample_centers(n: int, allowed, distinct: bool, rng: np.random.Generator):
    """n positions uniform over `allowed`; without replacement when distinct."""
    size = len(allowed)
    if n == 0:
        return []
    if not distinct:
        return [allowed[i] for i in rng.integers(0, size, size=n)]
    if n > size:
        raise ValueError(f"cannot draw {n} distinct centers from {size} positions")
    if 2 * n >= size:
        idx = rng.permutation(size)[:n]
    else:
        # rejection is cheaper than choice(replace=False) for small n
        while True:
            idx = rng.integers(0, size, size=n)
            if len(set(idx.tolist())) == n:
                break
    return [allowed[i] for i in idx]
