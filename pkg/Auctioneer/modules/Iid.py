"""
This module handles bidders whose values are i.i.d.

For F^n the optimal auction is a second-price auction with a reserve price and ironed
intervals. Rounding its parameters down to the ε-grid loses less than ε on every
single bid profile, so the learned auction needs no distribution-aware rounding.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from ..stores.AuditTrail import AuditTrail
from ..utils.errors import DistributionError, FileFormatError, GridError, InsufficientSamplesError
from .Distribution import DiscreteDistribution, EpsGrid, empiricalFromSamples
from .Learn import LearnReport, applyCap, smallestSatisfying
from .Myerson import BELOW_ALL, Outcome, checkBids, infimumWinningBid, ironedVirtualValuation

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ReserveIronedAuction:
    """
    A second-price auction with reserve price p and ironed intervals I.

    A bid below p never wins. Bids inside one ironed interval [ℓ, h) are treated as
    equal, at ℓ. The winner is the lowest index among the highest treated bids and
    pays their minimal winning bid.

    Attributes:
        p (float): The reserve price.
        intervals (tuple[tuple[float, float], ...]): Disjoint [ℓ, h) with p ≤ ℓ < h ≤ H, ascending.
        H (float): Upper bound of the bids.
        closedTop (bool): An interval ending at H also holds H.
    """

    p: float
    intervals: tuple
    H: float
    closedTop: bool = False

    def __post_init__(self) -> None:
        intervals = tuple(sorted((float(l), float(h)) for l, h in self.intervals))
        object.__setattr__(self, 'p', float(self.p))
        object.__setattr__(self, 'intervals', intervals)

        if not 0 <= self.p <= self.H:
            raise DistributionError(f'Error: Reserve {self.p} lies outside [0, {self.H}].')

        for l, h in intervals:
            if not self.p <= l < h <= self.H:
                raise DistributionError(f'Error: Ironed interval [{l}, {h}) must satisfy {self.p} ≤ ℓ < h ≤ {self.H}.')

        for (_, h), (l, _) in zip(intervals, intervals[1:]):
            if l < h:
                raise DistributionError(f'Error: Ironed intervals overlap at {l}.')

    @property
    def breakpoints(self) -> list[float]:
        """The reserve and every interval end; the outcome may change only at these and at other bids."""
        return sorted({self.p} | {x for interval in self.intervals for x in interval})

    def level(self, v: float) -> float | None:
        """The treated bid: ℓ inside an ironed interval, v elsewhere, None below the reserve."""
        if v < self.p:
            return None

        for l, h in self.intervals:
            if l <= v < h or self.closedTop and v == h == self.H:
                return l

        return v

    def wins(self, i: int, bid: float, bids: Sequence[float]) -> bool:
        own = self.level(bid)

        if own is None:
            return False

        for j, other in enumerate(bids):
            if j == i:
                continue
            level = self.level(other)
            if level is None:
                continue
            if j < i and not own > level:
                return False
            if j > i and not own >= level:
                return False

        return True

    def winner(self, bids: Sequence[float]) -> int | None:
        for i, bid in enumerate(bids):
            if self.wins(i, bid, bids):
                return i
        return None

    def run(self, bids: Sequence[float]) -> Outcome:
        """
        Runs the auction on a bid profile.

        Args:
            bids (Sequence[float]): One bid in [0, H] per bidder.

        Returns:
            Outcome: The winner, if any, paying the infimum of their winning bids.
        """
        bids = checkBids(bids, len(bids), self.H)
        winner = self.winner(bids)

        if winner is None:
            return Outcome.noSale(len(bids))

        others = [b for j, b in enumerate(bids) if j != winner]
        candidates = self.breakpoints + others + [level for level in map(self.level, others) if level is not None]
        payment = infimumWinningBid(lambda b: self.wins(winner, b, bids), candidates, self.H)

        return Outcome.singleWinner(len(bids), winner, payment)

    def threshold(self, level: float, strict: bool) -> float:
        """The smallest bid whose treated level reaches `level` (or exceeds it, when `strict`)."""
        def reaches(b: float) -> bool:
            own = self.level(b)
            return own is not None and (own > level if strict else own >= level)

        payment = infimumWinningBid(reaches, self.breakpoints + [level], self.H)
        return payment if payment is not None else 0.0

    def revenue(self, F: DiscreteDistribution, n: int) -> float:
        """
        Computes Rev(F^n) exactly.

        Every sale has a winner i and a runner-up: the bidder preceding all others but
        i, or the reserve when all others bid below it. The sum runs over these pairs
        and the runner-up's value. Precedence is by treated bid, lower index on ties.

        Args:
            F (DiscreteDistribution): The common value distribution.
            n (int): Number of bidders.

        Returns:
            float: The expected revenue.
        """
        treated = [(self.level(v), q) for v, q in zip(F.support, F.probs)]
        below = math.fsum(q for level, q in treated if level is None)

        def massBelow(level: float, inclusive: bool) -> float:
            return below + math.fsum(q for other, q in treated
                                     if other is not None and (other < level or inclusive and other == level))

        # the reserve is the runner-up
        total = [n * self.p * (1 - below) * below ** (n - 1)]

        for i in range(n):
            for j in range(n):
                if j == i:
                    continue
                for level, q in treated:
                    if level is None:
                        continue
                    beats = 1 - massBelow(level, inclusive=i > j)
                    others = math.prod(massBelow(level, inclusive=j < k) for k in range(n) if k not in (i, j))
                    total.append(self.threshold(level, strict=i > j) * beats * q * others)

        return math.fsum(total)

    def toText(self) -> str:
        """The reserve and H on the first line (plus `closed` for a closed top), then one `ℓ h` line per interval."""
        head = f'{self.p!r} {self.H!r}' + (' closed' if self.closedTop else '')
        lines = [head] + [f'{l!r} {h!r}' for l, h in self.intervals]
        return '\n'.join(lines) + '\n'

    @classmethod
    def fromText(cls, text: str) -> 'ReserveIronedAuction':
        rows = [line.split() for line in text.splitlines() if line.strip()]

        if not rows or len(rows[0]) not in (2, 3) or rows[0][2:] not in ([], ['closed']):
            raise FileFormatError('Error: The first line must hold the reserve and H, optionally followed by closed.')

        closedTop = rows[0][2:] == ['closed']
        rows[0] = rows[0][:2]

        try:
            values = [[float(x) for x in row] for row in rows]
        except ValueError as e:
            raise FileFormatError(f'Error: Non-numeric entry: {e}.') from e

        for number, row in enumerate(values[1:], start=2):
            if len(row) != 2:
                raise FileFormatError(f'Error: Line {number} must hold two bounds, got {len(row)} entries.')

        (p, H), intervals = values[0], values[1:]
        return cls(p, [tuple(row) for row in intervals], H, closedTop)

    def toDict(self) -> dict:
        return {
            'type': 'reserve-ironed',
            'p': self.p,
            'intervals': [list(interval) for interval in self.intervals],
            'closedTop': self.closedTop,
            'H': self.H,
        }

    @classmethod
    def fromDict(cls, data: dict) -> 'ReserveIronedAuction':
        return cls(data['p'], [tuple(interval) for interval in data['intervals']], data['H'], bool(data.get('closedTop', False)))


def optimalReserveIroned(F: DiscreteDistribution) -> ReserveIronedAuction:
    """
    Computes the revenue-optimal auction for F^n, for every n.

    The reserve is the smallest support value with nonnegative ironed virtual value.
    Every maximal run of support values sharing a nonnegative level becomes an ironed
    interval reaching to the next support value. The top run reaches to H and holds it.

    Args:
        F (DiscreteDistribution): The common value distribution.

    Returns:
        ReserveIronedAuction: The auction, equal to the Myersonian auction with φ_i = φ for all i.
    """
    phi = ironedVirtualValuation(F)
    support, levels = phi.breakpoints, phi.levels

    start = next(k for k, level in enumerate(levels) if level is not BELOW_ALL and level >= 0)
    intervals = []
    closedTop = False
    k = start

    while k < len(support):
        end = k
        while end + 1 < len(support) and levels[end + 1] == levels[k]:
            end += 1

        top = end + 1 == len(support)
        h = F.H if top else support[end + 1]
        if support[k] < h:
            intervals.append((support[k], h))
            closedTop = top
        k = end + 1

    auction = ReserveIronedAuction(support[start], intervals, F.H, closedTop)
    logger.debug('Reserve %g with ironed intervals %s', auction.p, auction.intervals)

    return auction


def roundDownAuction(a: ReserveIronedAuction, eps: float) -> ReserveIronedAuction:
    """
    Rounds the reserve and every interval end down to the ε-grid, dropping collapsed intervals.

    Args:
        a (ReserveIronedAuction): The auction.
        eps (float): The grid step.

    Returns:
        ReserveIronedAuction: ⌊(p, I)⌋_ε.
    """
    grid = EpsGrid(eps, a.H)
    intervals = []

    for l, h in a.intervals:
        low, high = grid.floor(l), grid.floor(h)
        if low < high:
            intervals.append((low, high))

    return ReserveIronedAuction(grid.floor(a.p), intervals, a.H, a.closedTop)


def classSizeBoundIid(grid: EpsGrid) -> float:
    """
    ln of an upper bound on the number of rounded-down auctions.

    A reserve index, the closed-top bit, and per grid point whether an interval starts
    there, ends there, both or neither.
    """
    points = grid.top + 1
    return math.log(points) + math.log(2) + points * math.log(4)


START = 1
END = 2


def encodeRoundedDown(a: ReserveIronedAuction, grid: EpsGrid) -> dict:
    """
    Encodes a rounded-down auction as its reserve index and per-grid-point flags.

    Args:
        a (ReserveIronedAuction): An auction with all parameters on the grid.
        grid (EpsGrid): The grid.

    Returns:
        dict: `{"reserve": j, "closedTop": bool, "flags": [...]}` with flag bit 1 for an
            interval start and bit 2 for an interval end.

    Raises:
        GridError: If some parameter is off the grid.
    """
    for x in a.breakpoints:
        if not grid.isGridPoint(x):
            raise GridError(f'Error: {x} is not a multiple of {grid.eps}.')

    flags = [0] * (grid.top + 1)
    for l, h in a.intervals:
        flags[grid.intervalIndex(l)] |= START
        flags[grid.intervalIndex(h)] |= END

    return {'reserve': grid.intervalIndex(a.p), 'closedTop': a.closedTop, 'flags': flags}


def decodeRoundedDown(code: dict, grid: EpsGrid) -> ReserveIronedAuction:
    intervals = []
    opened = None

    for j, flag in enumerate(code['flags']):
        if flag & END and opened is not None:
            intervals.append((grid.lower(opened), grid.lower(j)))
            opened = None
        if flag & START:
            opened = j

    if opened is not None:
        raise GridError(f'Error: Interval starting at index {opened} never ends.')

    return ReserveIronedAuction(grid.lower(code['reserve']), intervals, grid.H, code['closedTop'])


def sampleSizeIid(H: float, n: int, eps: float, delta: float, logClassSize: float | None = None) -> int:
    """
    The smallest t meeting both concentration conditions for F̂^n.

    With R = (t−1)!/(t−n)!, t must satisfy
    R · (n(n−1)+1) · 2 exp(−√t ε²/(2H²)) ≤ δ′ and R · (t − n(n−1)√t)/t^n ≥ 1 − ε/(2H).

    Args:
        H (float): Value bound.
        n (int): Number of bidders.
        eps (float): Accuracy.
        delta (float): Failure probability.
        logClassSize (float | None): ln|S| for a union bound, making δ′ = δ/(|S|+1).

    Returns:
        int: The number of samples.
    """
    if not 0 < eps <= 1 or not 0 < delta <= 1 or not H > 0:
        raise DistributionError(f'Error: Need ε, δ in (0, 1] and H > 0, got ε={eps}, δ={delta}, H={H}.')

    logDelta = math.log(delta)
    if logClassSize is not None:
        logDelta -= float(np.logaddexp(logClassSize, 0.0))
    crossings = n * (n - 1)
    target = math.log1p(-eps / (2 * H)) if eps < 2 * H else -math.inf

    def holds(t: int) -> bool:
        logRatio = float(gammaln(t) - gammaln(t - n + 1))
        root = math.sqrt(t)

        failure = logRatio + math.log(crossings + 1) + math.log(2) - root * eps ** 2 / (2 * H ** 2)
        if failure > logDelta:
            return False

        covered = t - crossings * root
        if covered <= 0:
            return False

        return logRatio + math.log(covered) - n * math.log(t) >= target

    return smallestSatisfying(holds, start=n)


def learnIid(samples: Sequence[float], n: int, H: float, eps: float, delta: float,
             sampleCap: int | None = None, trail: AuditTrail | None = None):
    """
    Learns an auction for n i.i.d. bidders from samples of their common distribution.

    Args:
        samples (Sequence[float]): Samples of F.
        n (int): Number of bidders.
        H (float): Value bound.
        eps (float): Accuracy.
        delta (float): Failure probability.
        sampleCap (int | None): Optional bound on the required samples.
        trail (AuditTrail | None): Receives the intermediate revenues.

    Returns:
        tuple[ReserveIronedAuction, LearnReport]: The optimal auction for F̂^n rounded
            down to multiples of ε/3, and its report.

    Raises:
        InsufficientSamplesError: If fewer samples than required are given.
    """
    trail = trail if trail is not None else AuditTrail()
    grid = EpsGrid(eps / 3, H)

    formula = sampleSizeIid(H, n, grid.eps, delta, classSizeBoundIid(grid))
    required = applyCap(formula, sampleCap, trail, 'samples')
    if len(samples) < required:
        raise InsufficientSamplesError(required, len(samples), 'samples')

    Fhat = empiricalFromSamples(samples, H)
    optimal = optimalReserveIroned(Fhat)
    optimumRevenue = optimal.revenue(Fhat, n)
    trail.record('empirical-optimum', revenue=optimumRevenue, t=len(samples))

    rounded = roundDownAuction(optimal, grid.eps)
    roundedRevenue = rounded.revenue(Fhat, n)
    trail.record('round-down', revenue=roundedRevenue, grid=grid.eps, loss=optimumRevenue - roundedRevenue)

    logger.info('Learned reserve %g with %d ironed intervals from %d samples', rounded.p, len(rounded.intervals),
                len(samples))

    report = LearnReport(
        kind='iid', t=len(samples), eps=eps, delta=delta, H=H, n=n, grid=grid.eps,
        auction=rounded.toDict(), empiricalRevenue=roundedRevenue, optimumRevenue=optimumRevenue,
        required={'t': formula}, trail=trail.entries, caveats=trail.caveats,
    )
    return rounded, report
