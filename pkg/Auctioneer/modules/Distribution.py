"""
This module defines the value distributions bidders are drawn from.

`DiscreteDistribution` is a finite support with probabilities on [0, H]; it holds both
empirical distributions (uniform over a multiset of samples) and discrete true
distributions. `EpsGrid` partitions [0, H] into the semiopen ε-intervals
[jε, (j+1)ε). The `SampleSource` classes draw seeded samples by inverse CDF.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from ..utils.errors import DistributionError, GridError

logger = logging.getLogger(__name__)

PROB_TOL = 1e-12
"""Absolute tolerance for probability sums and comparisons."""

GRID_TOL = 1e-9
"""Relative slack used when dividing a value by ε, so that 0.3 / 0.1 lands on index 3."""


@dataclass(frozen=True)
class EpsGrid:
    """
    The ε-grid over [0, H].

    Index j names the semiopen interval [jε, (j+1)ε). The value H itself belongs to the
    top index ⌊H/ε⌋, so the grid partitions the closed range [0, H].

    Attributes:
        eps (float): Interval width ε (currency units).
        H (float): Upper bound of all values (currency units).
    """

    eps: float
    H: float

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise GridError(f'Error: ε must be positive, got {self.eps}.')
        if not self.H > 0:
            raise GridError(f'Error: H must be positive, got {self.H}.')

    @cached_property
    def top(self) -> int:
        """The largest interval index ⌊H/ε⌋."""
        return math.floor(self.H / self.eps + GRID_TOL)

    @property
    def indices(self) -> range:
        return range(self.top + 1)

    def lower(self, j: int) -> float:
        """Left end jε of interval j."""
        return j * self.eps

    def upper(self, j: int) -> float:
        """Right end (j+1)ε of interval j (excluded from the interval)."""
        return (j + 1) * self.eps

    def intervalIndex(self, v: float) -> int:
        """
        Returns the index j with jε ≤ v < (j+1)ε.

        Args:
            v (float): A value in [0, H].

        Returns:
            int: The interval index; H maps to ⌊H/ε⌋.

        Raises:
            GridError: If v lies outside [0, H].
        """
        if v < 0 or v > self.H * (1 + PROB_TOL):
            raise GridError(f'Error: Value {v} lies outside [0, {self.H}].')

        return min(math.floor(v / self.eps + GRID_TOL), self.top)

    def floor(self, v: float) -> float:
        """⌊v⌋_ε, the largest grid point not above v."""
        return self.lower(math.floor(v / self.eps + GRID_TOL))

    def ceil(self, v: float) -> float:
        """⌈v⌉_ε, the smallest grid point not below v."""
        return self.lower(math.ceil(v / self.eps - GRID_TOL))

    def isGridPoint(self, v: float) -> bool:
        ratio = v / self.eps
        return abs(ratio - round(ratio)) <= GRID_TOL

    def contains(self, j: int, v: float) -> bool:
        """Whether v lies in interval j."""
        return 0 <= v <= self.H and self.intervalIndex(v) == j

    def toDict(self) -> dict:
        return {'eps': self.eps, 'H': self.H}


@dataclass(frozen=True)
class DiscreteDistribution:
    """
    A distribution with finite support on [0, H].

    Attributes:
        support (tuple[float, ...]): Strictly ascending values in [0, H].
        probs (tuple[float, ...]): Positive probabilities summing to 1.
        H (float): Upper bound of the value range.
    """

    support: tuple
    probs: tuple
    H: float

    def __post_init__(self) -> None:
        object.__setattr__(self, 'support', tuple(float(v) for v in self.support))
        object.__setattr__(self, 'probs', tuple(float(p) for p in self.probs))

        if not self.support:
            raise DistributionError('Error: A distribution needs a nonempty support.')
        if len(self.support) != len(self.probs):
            raise DistributionError(f'Error: {len(self.support)} support values but {len(self.probs)} probabilities.')
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise DistributionError(f'Error: Support must be strictly ascending, got {self.support}.')
        if self.support[0] < 0 or self.support[-1] > self.H:
            raise DistributionError(f'Error: Support must lie in [0, {self.H}], got {self.support}.')
        if any(p <= 0 for p in self.probs):
            raise DistributionError(f'Error: Probabilities must be positive, got {self.probs}.')
        if abs(math.fsum(self.probs) - 1.0) > PROB_TOL:
            raise DistributionError(f'Error: Probabilities sum to {math.fsum(self.probs)}, not 1.')

    @classmethod
    def pointMass(cls, v: float, H: float) -> 'DiscreteDistribution':
        return cls((v,), (1.0,), H)

    @classmethod
    def uniform(cls, values: Sequence[float], H: float) -> 'DiscreteDistribution':
        """The uniform distribution over distinct `values`."""
        values = sorted(values)
        return cls(values, [1.0 / len(values)] * len(values), H)

    def __len__(self) -> int:
        return len(self.support)

    @cached_property
    def cumulative(self) -> np.ndarray:
        """P(V ≤ support[k]) for each k; the last entry is forced to 1."""
        cdf = np.cumsum(self.probs)
        cdf[-1] = 1.0
        return cdf

    def pmf(self, v: float) -> float:
        for value, p in zip(self.support, self.probs):
            if value == v:
                return p
        return 0.0

    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.support, self.probs))

    def massOn(self, j: int, grid: EpsGrid) -> float:
        """F([jε, (j+1)ε))."""
        return math.fsum(p for v, p in zip(self.support, self.probs) if grid.intervalIndex(v) == j)

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        """Draws `count` values by inverse CDF."""
        u = rng.random(count)
        index = np.searchsorted(self.cumulative, u, side='right')
        return np.asarray(self.support)[np.minimum(index, len(self.support) - 1)]

    def toDict(self) -> dict:
        return {'kind': 'discrete', 'support': list(self.support), 'probs': list(self.probs), 'H': self.H}


def empiricalFromSamples(samples: Sequence[float], H: float) -> DiscreteDistribution:
    """
    Builds the empirical distribution F̂, uniform over the multiset of samples.

    Args:
        samples (Sequence[float]): Sample values in [0, H].
        H (float): Upper bound of the value range.

    Returns:
        DiscreteDistribution: Distinct sample values ascending, each with probability
            multiplicity / count.

    Raises:
        DistributionError: On empty input or a value outside [0, H].
    """
    values = np.asarray(samples, dtype=float)

    if values.size == 0:
        raise DistributionError('Error: no samples.')

    outside = values[(values < 0) | (values > H)]
    if outside.size:
        raise DistributionError(f'Error: Sample value {outside[0]} lies outside [0, {H}].')

    support, counts = np.unique(values, return_counts=True)
    return DiscreteDistribution(support, counts / values.size, H)


def conditionalOnInterval(F: DiscreteDistribution, j: int, grid: EpsGrid) -> DiscreteDistribution | None:
    """
    Restricts F to interval j and renormalizes.

    Args:
        F (DiscreteDistribution): The distribution to restrict.
        j (int): An interval index of `grid`.
        grid (EpsGrid): The ε-grid.

    Returns:
        DiscreteDistribution | None: F|_j, or None when F puts no mass on interval j.
    """
    if j not in grid.indices:
        raise GridError(f'Error: Interval index {j} outside 0..{grid.top}.')

    inside = [(v, p) for v, p in zip(F.support, F.probs) if grid.intervalIndex(v) == j]

    if not inside:
        return None

    mass = math.fsum(p for _, p in inside)
    return DiscreteDistribution([v for v, _ in inside], [p / mass for _, p in inside], F.H)


def totalVariation(F: DiscreteDistribution, G: DiscreteDistribution) -> float:
    """Total-variation distance between two discrete distributions."""
    points = set(F.support) | set(G.support)
    return 0.5 * math.fsum(abs(F.pmf(v) - G.pmf(v)) for v in points)


class SampleSource:
    """
    Base class of the seedable value sources.

    Attributes:
        H (float): Upper bound of every drawn value.
    """

    H: float

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def toDict(self) -> dict:
        raise NotImplementedError


class DiscreteSource(SampleSource):
    """Draws from a `DiscreteDistribution`."""

    def __init__(self, distribution: DiscreteDistribution) -> None:
        self.distribution = distribution
        self.H = distribution.H

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return self.distribution.sample(count, rng)

    def toDict(self) -> dict:
        return self.distribution.toDict()


class UniformSource(SampleSource):
    """Draws from the continuous uniform distribution on [lo, hi] ⊆ [0, H]."""

    def __init__(self, lo: float, hi: float, H: float) -> None:
        if not 0 <= lo < hi <= H:
            raise DistributionError(f'Error: Uniform range [{lo}, {hi}] must satisfy 0 ≤ lo < hi ≤ {H}.')

        self.lo = lo
        self.hi = hi
        self.H = H

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return self.lo + (self.hi - self.lo) * rng.random(count)

    def toDict(self) -> dict:
        return {'kind': 'uniform', 'lo': self.lo, 'hi': self.hi, 'H': self.H}


class TriangleSource(SampleSource):
    """
    The rising-triangle density of width ε placed just below ⌊1⌋_ε, with H = 2.

    Its density is f(x) = 2/ε² · (x − a) on [a, a + ε] with a = ⌊1⌋_ε − ε, so the
    inverse CDF is x = a + ε√u.
    """

    def __init__(self, eps: float, H: float = 2.0) -> None:
        if not 0 < eps < 1:
            raise DistributionError(f'Error: Triangle width must lie in (0, 1), got {eps}.')

        self.eps = eps
        self.H = H
        self.a = EpsGrid(eps, H).floor(1.0) - eps

    def sample(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return self.a + self.eps * np.sqrt(rng.random(count))

    def toDict(self) -> dict:
        return {'kind': 'triangle', 'eps': self.eps, 'H': self.H}


def draw(source: SampleSource, count: int, seed: int) -> np.ndarray:
    """
    Draws `count` values from `source`, deterministically for a given seed.

    Args:
        source (SampleSource): Where to draw from.
        count (int): Number of values, at least 0.
        seed (int): Generator seed.

    Returns:
        np.ndarray: The drawn values, all in [0, H].
    """
    if count < 0:
        raise DistributionError(f'Error: Cannot draw {count} values.')

    return source.sample(count, np.random.default_rng(seed))


def sourceFromDict(data: dict, H: float | None = None) -> SampleSource:
    """
    Builds a source from its JSON description.

    Args:
        data (dict): `{"kind": "discrete" | "uniform" | "triangle", ...}`.
        H (float | None): Bound used when `data` carries none.

    Returns:
        SampleSource: The described source.
    """
    kind = data.get('kind')
    bound = data.get('H', H)

    if kind == 'discrete':
        return DiscreteSource(DiscreteDistribution(data['support'], data['probs'], bound))
    if kind == 'uniform':
        return UniformSource(data['lo'], data['hi'], bound)
    if kind == 'triangle':
        return TriangleSource(data['eps'], bound if bound is not None else 2.0)

    raise DistributionError(f"Error: Unknown distribution kind '{kind}'.")
