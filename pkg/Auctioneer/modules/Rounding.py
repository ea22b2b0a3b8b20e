"""
This module implements ε-rounding of single-item Myersonian auctions.

A rounding action (i, j, v) makes bidder i's virtual valuation constant on interval j
at the level φ_i(v). Applying one action per (bidder, interval) pair yields an
ε-coarse auction. Rules are drawn at random from the conditional distributions
(`drawRandomizedRule`) or chosen greedily against exact revenue (`greedyRound`);
`roundDownBaseline` is the naive rule that treats every bid as ⌊b⌋_ε.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..utils.errors import DistributionError, GridError
from .Distribution import EpsGrid, conditionalOnInterval
from .Myerson import BELOW_ALL, SingleItemAuction, SteppedVirtualValuation
from .Revenue import PROFILE_BUDGET, ProductDistribution, exactRevenueSingleItem

logger = logging.getLogger(__name__)

REVENUE_TOL = 1e-12
"""A candidate must beat the incumbent by more than this to replace it."""


@dataclass(frozen=True)
class RoundingAction:
    """
    The triplet (i, j, v): flatten bidder i's φ on interval j at level φ_i(v).

    Attributes:
        bidder (int): The bidder i.
        interval (int): The interval index j.
        value (float): The representative v, with jε ≤ v < (j+1)ε.
    """

    bidder: int
    interval: int
    value: float


@dataclass(frozen=True)
class RoundingRule:
    """
    One action for every (bidder, interval) pair.

    Attributes:
        actions (tuple[RoundingAction, ...]): The actions, in application order.
        grid (EpsGrid): The ε-grid the intervals refer to.
        n (int): Number of bidders.
    """

    actions: tuple
    grid: EpsGrid
    n: int

    def __post_init__(self) -> None:
        object.__setattr__(self, 'actions', tuple(self.actions))

        pairs = [(a.bidder, a.interval) for a in self.actions]
        expected = {(i, j) for i in range(self.n) for j in self.grid.indices}

        if len(pairs) != len(set(pairs)) or set(pairs) != expected:
            raise GridError('Error: A rounding rule needs exactly one action per (bidder, interval) pair.')

    def toDict(self) -> dict:
        return {
            'grid': self.grid.toDict(),
            'n': self.n,
            'actions': [[a.bidder, a.interval, a.value] for a in self.actions],
        }

    @classmethod
    def fromDict(cls, data: dict) -> 'RoundingRule':
        grid = EpsGrid(data['grid']['eps'], data['grid']['H'])
        return cls([RoundingAction(int(i), int(j), float(v)) for i, j, v in data['actions']], grid, int(data['n']))


def _isAtGridPoint(b: float, j: int, grid: EpsGrid) -> bool:
    return grid.intervalIndex(b) == j and grid.isGridPoint(b)


def _stripLeading(breakpoints: list, levels: list) -> tuple[list, list]:
    """Drops leading BELOW_ALL breakpoints; they do not change the function."""
    k = 0
    while k < len(levels) and levels[k] is BELOW_ALL:
        k += 1
    return breakpoints[k:], levels[k:]


def flattenInterval(phi: SteppedVirtualValuation, j: int, level, grid: EpsGrid) -> SteppedVirtualValuation:
    """
    Makes φ constant on interval j at `level`, leaving it unchanged elsewhere.

    Args:
        phi (SteppedVirtualValuation): The function to modify.
        j (int): The interval index.
        level: The new level on [jε, (j+1)ε); it must lie between the neighbouring levels.
        grid (EpsGrid): The ε-grid.

    Returns:
        SteppedVirtualValuation: The modified function.
    """
    lower = grid.lower(j)
    breakpoints: list = []
    levels: list = []

    for b, l in zip(phi.breakpoints, phi.levels):
        if grid.intervalIndex(b) < j:
            breakpoints.append(b)
            levels.append(l)

    breakpoints.append(lower)
    levels.append(level)

    if j < grid.top:
        upper = grid.upper(j)
        later = [(b, l) for b, l in zip(phi.breakpoints, phi.levels) if grid.intervalIndex(b) > j]

        if not later or not _isAtGridPoint(later[0][0], j + 1, grid):
            breakpoints.append(min(upper, phi.H))
            levels.append(phi(upper))

        for b, l in later:
            breakpoints.append(b)
            levels.append(l)

    breakpoints, levels = _stripLeading(breakpoints, levels)
    return SteppedVirtualValuation(breakpoints, levels, phi.H)


def applyAction(A: SingleItemAuction, action: RoundingAction, grid: EpsGrid) -> SingleItemAuction:
    """
    Applies one ε-rounding action.

    Args:
        A (SingleItemAuction): The auction to round.
        action (RoundingAction): The action; its value must lie in its interval.
        grid (EpsGrid): The ε-grid.

    Returns:
        SingleItemAuction: The auction whose bidder `action.bidder` has φ constant at
            φ(action.value) on the action's interval; other bidders are untouched.
    """
    if grid.intervalIndex(action.value) != action.interval:
        raise GridError(f'Error: Value {action.value} is not in interval {action.interval} of step {grid.eps}.')
    if not 0 <= action.bidder < A.n:
        raise DistributionError(f'Error: Bidder {action.bidder} outside 0..{A.n - 1}.')

    phi = A.phis[action.bidder]
    phis = list(A.phis)
    phis[action.bidder] = flattenInterval(phi, action.interval, phi(action.value), grid)

    return SingleItemAuction(phis)


def applyRule(A: SingleItemAuction, rule: RoundingRule, order: Sequence[int] | None = None) -> SingleItemAuction:
    """
    Applies every action of a rule.

    Args:
        A (SingleItemAuction): The auction to round.
        rule (RoundingRule): A complete rule over A's bidders.
        order (Sequence[int] | None): Optional permutation of the action indices.

    Returns:
        SingleItemAuction: The ε-coarse rounded auction (independent of `order`).
    """
    if rule.n != A.n:
        raise DistributionError(f'Error: Rule covers {rule.n} bidders but the auction has {A.n}.')

    actions = rule.actions if order is None else [rule.actions[k] for k in order]

    for action in actions:
        A = applyAction(A, action, rule.grid)

    return A


def drawRandomizedRule(Fhat: ProductDistribution, grid: EpsGrid, rng: np.random.Generator | int) -> RoundingRule:
    """
    Draws an F-randomized ε-rounding rule.

    Each v_ij is drawn from F_i restricted to interval j. Intervals where F_i has no
    mass take v_ij = jε.

    Args:
        Fhat (ProductDistribution): The distributions to condition.
        grid (EpsGrid): The ε-grid.
        rng (np.random.Generator | int): A generator, or a seed for a fresh one.

    Returns:
        RoundingRule: The drawn rule, bidders ascending then intervals ascending.
    """
    if not isinstance(rng, np.random.Generator):
        rng = np.random.default_rng(rng)

    actions = []
    for i, F in enumerate(Fhat.factors):
        for j in grid.indices:
            conditional = conditionalOnInterval(F, j, grid)
            value = float(conditional.sample(1, rng)[0]) if conditional is not None else grid.lower(j)
            actions.append(RoundingAction(i, j, value))

    return RoundingRule(actions, grid, Fhat.n)


def withGridBreakpoints(phi: SteppedVirtualValuation, grid: EpsGrid) -> SteppedVirtualValuation:
    """Adds a breakpoint at every grid point jε carrying φ(jε); the function is unchanged."""
    points = dict(zip(phi.breakpoints, phi.levels))

    for j in grid.indices:
        lower = grid.lower(j)
        if not any(_isAtGridPoint(b, j, grid) for b in phi.breakpoints):
            points[lower] = phi(lower)

    breakpoints = sorted(points)
    breakpoints, levels = _stripLeading(breakpoints, [points[b] for b in breakpoints])

    return SteppedVirtualValuation(breakpoints, levels, phi.H)


def greedyRound(A: SingleItemAuction, Fhat: ProductDistribution, grid: EpsGrid) -> SingleItemAuction:
    """
    Rounds deterministically, one (bidder, interval) pair at a time.

    Every φ_i first gets a breakpoint at each grid point. Then for each bidder and
    each interval, every support value of F̂_i inside the interval is tried as the
    representative, and the one giving the highest exact revenue is kept (the
    smallest value on ties). Intervals without support values are flattened at their
    left grid point. The loss against A is below nε.

    Args:
        A (SingleItemAuction): A Myersonian auction over F̂'s supports.
        Fhat (ProductDistribution): The empirical product distribution.
        grid (EpsGrid): The ε-grid.

    Returns:
        SingleItemAuction: An ε-coarse auction.
    """
    current = SingleItemAuction([withGridBreakpoints(phi, grid) for phi in A.phis])

    for i, F in enumerate(Fhat.factors):
        for j in grid.indices:
            candidates = [v for v in F.support if grid.intervalIndex(v) == j]

            if not candidates:
                current = applyAction(current, RoundingAction(i, j, grid.lower(j)), grid)
                continue

            best, bestRevenue = None, -math.inf
            for v in candidates:
                trial = applyAction(current, RoundingAction(i, j, v), grid)
                revenue = exactRevenueSingleItem(trial, Fhat)
                logger.debug('Bidder %d interval %d candidate %.12g: revenue %.12g', i, j, v, revenue)

                if revenue > bestRevenue + REVENUE_TOL:
                    best, bestRevenue = trial, revenue

            current = best

    logger.info('Greedy rounding at step %g: revenue %.12g', grid.eps, exactRevenueSingleItem(current, Fhat))

    return current


def roundDownBaseline(A: SingleItemAuction, grid: EpsGrid) -> SingleItemAuction:
    """
    The auction that allocates as A would on the rounded-down bids ⌊b_i⌋_ε.

    Args:
        A (SingleItemAuction): The auction to discretize.
        grid (EpsGrid): The ε-grid.

    Returns:
        SingleItemAuction: Breakpoints at the grid points with levels φ_i(jε); payments
            follow as minimal winning bids.
    """
    phis = []

    for phi in A.phis:
        breakpoints = [grid.lower(j) for j in grid.indices]
        levels = [phi(b) for b in breakpoints]
        breakpoints, levels = _stripLeading(breakpoints, levels)
        phis.append(SteppedVirtualValuation(breakpoints, levels, phi.H))

    return SingleItemAuction(phis)


def isCoarse(A: SingleItemAuction, grid: EpsGrid) -> bool:
    """Whether every breakpoint of every φ_i is a grid point, so outcomes are constant on ε-boxes."""
    return all(grid.isGridPoint(b) for phi in A.phis for b in phi.breakpoints)


def coarsenessWitnesses(A: SingleItemAuction, grid: EpsGrid) -> list[dict]:
    """The off-grid breakpoints that make A fail to be ε-coarse."""
    return [
        {'bidder': i, 'breakpoint': b, 'interval': grid.intervalIndex(b)}
        for i, phi in enumerate(A.phis)
        for b in phi.breakpoints
        if not grid.isGridPoint(b)
    ]


def lossBoundProbabilities(A: SingleItemAuction, Fhat: ProductDistribution, grid: EpsGrid,
                           budget: int = PROFILE_BUDGET) -> tuple[float, list[list[float]]]:
    """
    Computes the probabilities that bound the loss of randomized rounding.

    Args:
        A (SingleItemAuction): The auction before rounding.
        Fhat (ProductDistribution): The product distribution.
        grid (EpsGrid): The ε-grid.
        budget (int): Largest admissible number of profiles.

    Returns:
        tuple[float, list[list[float]]]: p, the probability that some bidder wins, and
            p[i][j], the probability that bidder i wins and pays a price strictly inside
            interval j.
    """
    p = []
    pij = [[[] for _ in grid.indices] for _ in range(A.n)]

    for profile, probability in Fhat.profiles(budget):
        outcome = A.run(profile)
        winner = outcome.winner

        if winner is None:
            continue

        p.append(probability)
        price = outcome.payments[winner]

        if not grid.isGridPoint(price):
            pij[winner][grid.intervalIndex(price)].append(probability)

    return math.fsum(p), [[math.fsum(cell) for cell in row] for row in pij]


def ruleRevenues(A: SingleItemAuction, Fhat: ProductDistribution, grid: EpsGrid, draws: int,
                 seed: int) -> Iterable[float]:
    """Yields the exact revenue of A under `draws` independently drawn randomized rules."""
    rng = np.random.default_rng(seed)

    for _ in range(draws):
        yield exactRevenueSingleItem(applyRule(A, drawRandomizedRule(Fhat, grid, rng)), Fhat)
