"""
This module defines ironed virtual valuations and the single-item Myersonian auction.

An ironed virtual valuation is stored as a right-continuous nondecreasing step
function over [0, H]. Bids below its first breakpoint take the `BELOW_ALL` level,
which compares lower than every finite level, 0 included, so such bids never win.
The auction sells to the lowest-index bidder among those with the highest level,
provided that level is nonnegative, and charges their minimal winning bid.
"""

import bisect
import functools
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from ..utils.errors import DistributionError
from .Distribution import PROB_TOL, DiscreteDistribution

logger = logging.getLogger(__name__)


@functools.total_ordering
class BelowAll:
    """The level of a bid below every breakpoint: less than any finite level."""

    _instance = None

    def __new__(cls) -> 'BelowAll':
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other) -> bool:
        return other is not self

    def __eq__(self, other) -> bool:
        return other is self

    def __hash__(self) -> int:
        return hash('BELOW_ALL')

    def __repr__(self) -> str:
        return 'BELOW_ALL'

    def __reduce__(self):
        return (BelowAll, ())


BELOW_ALL = BelowAll()
"""Singleton level of bids below the first breakpoint."""


def levelKey(level) -> float:
    """Maps a level to a float for vectorized ordering (BELOW_ALL becomes −inf)."""
    return -math.inf if level is BELOW_ALL else float(level)


def levelToJson(level):
    return 'BELOW_ALL' if level is BELOW_ALL else level


def levelFromJson(value):
    return BELOW_ALL if value == 'BELOW_ALL' else float(value)


@dataclass(frozen=True)
class SteppedVirtualValuation:
    """
    A right-continuous nondecreasing step function on [0, H].

    φ(v) is the level of the greatest breakpoint ≤ v, and BELOW_ALL left of the first
    breakpoint.

    Attributes:
        breakpoints (tuple[float, ...]): Strictly ascending values in [0, H].
        levels (tuple): Nondecreasing levels, one per breakpoint (BELOW_ALL allowed).
        H (float): Upper bound of the value range.
    """

    breakpoints: tuple
    levels: tuple
    H: float

    def __post_init__(self) -> None:
        object.__setattr__(self, 'breakpoints', tuple(float(b) for b in self.breakpoints))
        object.__setattr__(self, 'levels', tuple(level if level is BELOW_ALL else float(level) for level in self.levels))

        if len(self.breakpoints) != len(self.levels):
            raise DistributionError(f'Error: {len(self.breakpoints)} breakpoints but {len(self.levels)} levels.')
        if any(b <= a for a, b in zip(self.breakpoints, self.breakpoints[1:])):
            raise DistributionError(f'Error: Breakpoints must be strictly ascending, got {self.breakpoints}.')
        if self.breakpoints and (self.breakpoints[0] < 0 or self.breakpoints[-1] > self.H):
            raise DistributionError(f'Error: Breakpoints must lie in [0, {self.H}].')
        if any(b < a for a, b in zip(self.levels, self.levels[1:])):
            raise DistributionError(f'Error: Levels must be nondecreasing, got {self.levels}.')

    def evaluate(self, v: float):
        """
        Evaluates φ at v.

        Args:
            v (float): A value in [0, H].

        Returns:
            float | BelowAll: The level of the greatest breakpoint ≤ v, or BELOW_ALL.
        """
        k = bisect.bisect_right(self.breakpoints, v) - 1
        return self.levels[k] if k >= 0 else BELOW_ALL

    __call__ = evaluate

    @cached_property
    def breakpointArray(self) -> np.ndarray:
        return np.asarray(self.breakpoints, dtype=float)

    @cached_property
    def levelArray(self) -> np.ndarray:
        """Levels as floats, with BELOW_ALL mapped to −inf."""
        return np.asarray([levelKey(level) for level in self.levels], dtype=float)

    def toDict(self) -> dict:
        return {
            'breakpoints': list(self.breakpoints),
            'levels': [levelToJson(level) for level in self.levels],
        }

    @classmethod
    def fromDict(cls, data: dict, H: float) -> 'SteppedVirtualValuation':
        return cls(data['breakpoints'], [levelFromJson(value) for value in data['levels']], H)


def ironedVirtualValuation(F: DiscreteDistribution) -> SteppedVirtualValuation:
    """
    Computes the ironed virtual valuation of a discrete distribution.

    The revenue curve in quantile space has the points (q_k, q_k·v_k) with
    q_k = P(V ≥ v_k), together with (0, 0). φ(v_k) is the slope of the upper concave
    envelope of these points on the segment ending at q_k. Points on one envelope
    segment share a level exactly.

    Args:
        F (DiscreteDistribution): The value distribution.

    Returns:
        SteppedVirtualValuation: Breakpoints at supp F with the envelope slopes as levels.
    """
    support = F.support
    m = len(support)

    # suffix sums give P(V ≥ v_k)
    tail = [0.0] * m
    running = 0.0
    for k in range(m - 1, -1, -1):
        running += F.probs[k]
        tail[k] = min(running, 1.0)

    points = [(0.0, 0.0)] + [(tail[k], tail[k] * support[k]) for k in range(m - 1, -1, -1)]

    hull: list[tuple[float, float]] = []
    for point in points:
        while len(hull) >= 2:
            (ox, oy), (ax, ay) = hull[-2], hull[-1]
            bx, by = point
            if (ax - ox) * (by - oy) - (ay - oy) * (bx - ox) >= 0:
                hull.pop()
            else:
                break
        hull.append(point)

    xs = [x for x, _ in hull]
    levels = []
    for k in range(m):
        s = bisect.bisect_left(xs, tail[k]) - 1
        (x0, y0), (x1, y1) = hull[s], hull[s + 1]
        levels.append((y1 - y0) / (x1 - x0))

    # the envelope slopes are nonincreasing in q, hence nondecreasing in v
    for k in range(1, m):
        if levels[k] < levels[k - 1]:
            levels[k] = levels[k - 1]

    return SteppedVirtualValuation(support, levels, F.H)


@dataclass(frozen=True)
class Outcome:
    """
    The allocation and payments of one auction run.

    Attributes:
        allocation (tuple[float, ...]): Fraction x_i ∈ [0, 1] won by each bidder.
        payments (tuple[float, ...]): Nonnegative payment of each bidder.
    """

    allocation: tuple
    payments: tuple

    @classmethod
    def noSale(cls, n: int) -> 'Outcome':
        return cls((0.0,) * n, (0.0,) * n)

    @classmethod
    def singleWinner(cls, n: int, winner: int, payment: float) -> 'Outcome':
        allocation = [0.0] * n
        payments = [0.0] * n
        allocation[winner] = 1.0
        payments[winner] = payment
        return cls(tuple(allocation), tuple(payments))

    @property
    def revenue(self) -> float:
        return math.fsum(self.payments)

    @property
    def winner(self) -> int | None:
        """The bidder holding the whole item, if any."""
        for i, x in enumerate(self.allocation):
            if x == 1.0:
                return i
        return None


def checkBids(bids: Sequence[float], n: int, H: float) -> tuple:
    bids = tuple(float(b) for b in bids)

    if len(bids) != n:
        raise DistributionError(f'Error: Expected {n} bids, got {len(bids)}.')
    for b in bids:
        if b < 0 or b > H * (1 + PROB_TOL):
            raise DistributionError(f'Error: Bid {b} lies outside [0, {H}].')

    return bids


def infimumWinningBid(winsWith: Callable[[float], bool], candidates: Sequence[float], H: float) -> float | None:
    """
    Finds the infimum of a monotone winning set from the points where it can change.

    The winning set is an up-set of [0, H] whose boundary is one of `candidates`. For
    each candidate c in ascending order, the bidder wins at c or just above c exactly
    when c is the infimum.

    Args:
        winsWith (Callable[[float], bool]): Whether the bidder wins with a given bid.
        candidates (Sequence[float]): Every point where the outcome may change.
        H (float): Upper bound of the bid range.

    Returns:
        float | None: The minimal winning bid, or None if no bid up to H wins.
    """
    points = sorted({c for c in candidates if 0 <= c <= H} | {0.0, H})

    for k, c in enumerate(points):
        if winsWith(c):
            return c
        above = (c + points[k + 1]) / 2 if k + 1 < len(points) else None
        if above is not None and winsWith(above):
            return c

    return None


@dataclass(frozen=True)
class SingleItemAuction:
    """
    A Myersonian single-item auction.

    Attributes:
        phis (tuple[SteppedVirtualValuation, ...]): One ironed virtual valuation per bidder.
    """

    phis: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, 'phis', tuple(self.phis))

        if not self.phis:
            raise DistributionError('Error: An auction needs at least one bidder.')
        if len({phi.H for phi in self.phis}) != 1:
            raise DistributionError('Error: All virtual valuations must share H.')

    @property
    def n(self) -> int:
        return len(self.phis)

    @property
    def H(self) -> float:
        return self.phis[0].H

    def levels(self, bids: Sequence[float]) -> list:
        return [phi(b) for phi, b in zip(self.phis, bids)]

    def winner(self, bids: Sequence[float]) -> int | None:
        """Lowest index among the highest levels, if that level is nonnegative."""
        levels = self.levels(bids)
        best = 0

        for i in range(1, self.n):
            if levels[i] > levels[best]:
                best = i

        return best if levels[best] >= 0 else None

    def wins(self, i: int, bid: float, bids: Sequence[float]) -> bool:
        """Whether bidder i wins with `bid` against the other entries of `bids`."""
        level = self.phis[i](bid)

        if not level >= 0:
            return False

        for j in range(self.n):
            if j == i:
                continue
            other = self.phis[j](bids[j])
            if j < i and not level > other:
                return False
            if j > i and not level >= other:
                return False

        return True

    def minimalWinningBid(self, i: int, bids: Sequence[float]) -> float | None:
        """
        Returns the smallest breakpoint of φ_i with which bidder i wins.

        Allocation is constant between breakpoints of φ_i, so the infimum of the
        winning bids is always attained at a breakpoint.

        Args:
            i (int): The bidder.
            bids (Sequence[float]): A bid profile; entry i is ignored.

        Returns:
            float | None: The minimal winning bid, or None when i cannot win.
        """
        for breakpoint in self.phis[i].breakpoints:
            if self.wins(i, breakpoint, bids):
                return breakpoint

        return None

    def run(self, bids: Sequence[float]) -> Outcome:
        """
        Runs the auction on a bid profile.

        Args:
            bids (Sequence[float]): One bid in [0, H] per bidder.

        Returns:
            Outcome: The winner (if any) pays their minimal winning bid; others pay 0.
        """
        bids = checkBids(bids, self.n, self.H)
        winner = self.winner(bids)

        if winner is None:
            return Outcome.noSale(self.n)

        return Outcome.singleWinner(self.n, winner, self.minimalWinningBid(winner, bids))

    def toDict(self) -> dict:
        return {
            'type': 'single-item',
            'H': self.H,
            'n': self.n,
            'phis': [phi.toDict() for phi in self.phis],
        }

    @classmethod
    def fromDict(cls, data: dict) -> 'SingleItemAuction':
        phis = [SteppedVirtualValuation.fromDict(entry, data['H']) for entry in data['phis']]

        if len(phis) != data.get('n', len(phis)):
            raise DistributionError(f"Error: Document declares n={data['n']} but lists {len(phis)} bidders.")

        return cls(phis)


def elkindAuction(distributions: Sequence[DiscreteDistribution]) -> SingleItemAuction:
    """The revenue-optimal single-item auction for a product of discrete distributions."""
    return SingleItemAuction([ironedVirtualValuation(F) for F in distributions])
