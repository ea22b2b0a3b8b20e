"""
This module encodes ε-coarse single-item Myersonian auctions as priority sequences.

A sequence P of (bidder, interval) pairs is run by scanning it in order: the first
pair (i, j) whose bidder bids at least jε wins, and the winner pays the smallest
threshold that keeps one of their pairs ahead of every other satisfied pair.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence

from scipy.special import gammaln

from ..utils.errors import CoarsenessError, FileFormatError, GridError
from .Distribution import EpsGrid
from .Myerson import BELOW_ALL, Outcome, SingleItemAuction, SteppedVirtualValuation, checkBids
from .Rounding import isCoarse

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimpleAuctionSequence:
    """
    An (H, ε)-simple auction.

    Attributes:
        pairs (tuple[tuple[int, int], ...]): Distinct (bidder, interval) pairs in priority order.
        grid (EpsGrid): The ε-grid.
        n (int): Number of bidders.
    """

    pairs: tuple
    grid: EpsGrid
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, 'pairs', tuple((int(i), int(j)) for i, j in self.pairs))

        if len(set(self.pairs)) != len(self.pairs):
            raise GridError('Error: Priority pairs must be distinct.')

        for i, j in self.pairs:
            if not 0 <= i < self.n:
                raise GridError(f'Error: Bidder {i} outside 0..{self.n - 1}.')
            if j not in self.grid.indices:
                raise GridError(f'Error: Interval {j} outside 0..{self.grid.top}.')

    def isCanonical(self) -> bool:
        """Whether (i, j') precedes (i, j) for every listed (i, j) and every j' > j."""
        position = {pair: k for k, pair in enumerate(self.pairs)}

        for (i, j), k in position.items():
            for higher in range(j + 1, self.grid.top + 1):
                if position.get((i, higher), len(self.pairs)) > k:
                    return False

        return True

    def winner(self, bids: Sequence[float]) -> tuple[int, int] | None:
        """Position and bidder of the first satisfied pair."""
        indices = [self.grid.intervalIndex(b) for b in bids]

        for k, (i, j) in enumerate(self.pairs):
            if indices[i] >= j:
                return k, i

        return None

    def threshold(self, winner: int, bids: Sequence[float]) -> float:
        """
        The smallest jε with which `winner` still comes first.

        Args:
            winner (int): The winning bidder.
            bids (Sequence[float]): The bid profile; the winner's own entry is ignored.

        Returns:
            float: min jε over the winner's pairs placed before the first pair
                satisfied by another bidder.
        """
        indices = [self.grid.intervalIndex(b) for b in bids]
        best = math.inf

        for i, j in self.pairs:
            if i == winner:
                best = min(best, self.grid.lower(j))
            elif indices[i] >= j:
                break

        return best

    def run(self, bids: Sequence[float]) -> Outcome:
        """
        Runs the simple auction.

        Args:
            bids (Sequence[float]): One bid in [0, H] per bidder.

        Returns:
            Outcome: The first satisfied pair's bidder wins at their threshold; no sale
                when no pair is satisfied.
        """
        bids = checkBids(bids, self.n, self.grid.H)
        first = self.winner(bids)

        if first is None:
            return Outcome.noSale(self.n)

        _, winner = first
        return Outcome.singleWinner(self.n, winner, self.threshold(winner, bids))

    def toAuction(self) -> SingleItemAuction:
        """
        Decodes P into an outcome-equivalent Myersonian auction.

        Pair k gets level len(P) − k, so earlier pairs take precedence; φ_i(jε) is the
        highest level among bidder i's pairs at intervals ≤ j.
        """
        rank = {pair: len(self.pairs) - k for k, pair in enumerate(self.pairs)}
        phis = []

        for i in range(self.n):
            breakpoints, levels = [], []
            level = BELOW_ALL
            for j in self.grid.indices:
                if (i, j) in rank and (level is BELOW_ALL or rank[(i, j)] > level):
                    level = float(rank[(i, j)])
                    breakpoints.append(self.grid.lower(j))
                    levels.append(level)
            phis.append(SteppedVirtualValuation(breakpoints, levels, self.grid.H))

        return SingleItemAuction(phis)

    def toText(self) -> str:
        lines = [f'{self.n} {self.grid.H!r} {self.grid.eps!r}']
        lines.extend(f'{i} {j}' for i, j in self.pairs)
        return '\n'.join(lines) + '\n'

    @classmethod
    def fromText(cls, text: str) -> 'SimpleAuctionSequence':
        """
        Parses the `n H eps` header and the `i j` lines that follow it.

        Raises:
            FileFormatError: On a malformed header or pair line.
        """
        lines = [line.split() for line in text.splitlines() if line.strip()]

        if not lines or len(lines[0]) != 3:
            raise FileFormatError('Error: Simple auction text must start with a header "n H eps".')

        try:
            n, H, eps = int(lines[0][0]), float(lines[0][1]), float(lines[0][2])
            pairs = [(int(i), int(j)) for i, j in lines[1:]]
        except ValueError as e:
            raise FileFormatError(f'Error: Malformed simple auction text ({e}).')

        return cls(pairs, EpsGrid(eps, H), n)

    def toDict(self) -> dict:
        return {
            'type': 'simple',
            'n': self.n,
            'grid': self.grid.toDict(),
            'pairs': [list(pair) for pair in self.pairs],
        }

    @classmethod
    def fromDict(cls, data: dict) -> 'SimpleAuctionSequence':
        return cls(data['pairs'], EpsGrid(data['grid']['eps'], data['grid']['H']), int(data['n']))


def encodeSimple(A: SingleItemAuction, grid: EpsGrid) -> SimpleAuctionSequence:
    """
    Encodes an ε-coarse Myersonian auction as a priority sequence.

    Args:
        A (SingleItemAuction): An ε-coarse auction.
        grid (EpsGrid): The ε-grid A is coarse on.

    Returns:
        SimpleAuctionSequence: All (i, j) with φ_i ≥ 0 on interval j, by decreasing
            level, then lower bidder, then higher interval.

    Raises:
        CoarsenessError: If A has a breakpoint off the grid.
    """
    if not isCoarse(A, grid):
        raise CoarsenessError(f'Error: Auction is not coarse on step {grid.eps}.')

    entries = []
    for i, phi in enumerate(A.phis):
        for j in grid.indices:
            level = phi(grid.lower(j))
            if level >= 0:
                entries.append((level, i, j))

    entries.sort(key=lambda entry: (-entry[0], entry[1], -entry[2]))

    return SimpleAuctionSequence([(i, j) for _, i, j in entries], grid, A.n)


def classSizeBound(n: int, grid: EpsGrid) -> float:
    """
    Natural log of an overcount of the (H, ε)-simple auctions with n bidders.

    There are M = n(⌊H/ε⌋+1) pairs; counting every subset in every order gives at
    most (M+1)!·2^M sequences.

    Args:
        n (int): Number of bidders.
        grid (EpsGrid): The ε-grid.

    Returns:
        float: ln((M+1)!) + M·ln 2.
    """
    M = n * (grid.top + 1)
    return float(gammaln(M + 2)) + M * math.log(2)
