"""
This module defines single-parameter environments and their Myersonian auctions.

An environment is a finite set X of feasible allocation vectors. Each one can find
the allocation maximizing Σ x_i·φ_i (ties go to the lexicographically greatest
vector) and report W_X, the largest total allocation. `SPAuction` runs such a
maximizer on ironed virtual bids and charges the Myerson payments, computed as the
sum of allocation jumps times the bid at which they happen.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Sequence

from ..utils.errors import BudgetError, DistributionError, MonotonicityError
from .Myerson import BELOW_ALL, Outcome, SteppedVirtualValuation, checkBids, levelKey
from .Revenue import ProductDistribution

logger = logging.getLogger(__name__)

MAX_WEIGHT = 10 ** 4
"""Largest integer knapsack weight or capacity accepted by the exact maximizer."""

EXHAUSTIVE_MAX_BIDDERS = 6
"""Largest bidder count for which feasible allocations are enumerated."""

MONOTONE_TOL = 1e-12
"""Allocation decreases smaller than this are treated as rounding noise."""


def welfare(allocation: Sequence[float], values: Sequence[float]) -> float:
    """Σ x_i·v_i summed in index order, skipping bidders with x_i = 0."""
    total = 0.0
    for x, v in zip(allocation, values):
        if x:
            total += x * v
    return total


def _keys(values: Sequence) -> list[float]:
    return [levelKey(v) for v in values]


def _ranked(values: Sequence[float], members: Sequence[int]) -> list[int]:
    """Members with a nonnegative value, by decreasing value then increasing index."""
    return sorted((i for i in members if values[i] >= 0), key=lambda i: (-values[i], i))


class Environment:
    """
    Base class of the single-parameter environments.

    Attributes:
        kind (str): The environment name used in configuration files.
        n (int): Number of bidders.
        rankingClass (bool): Whether the auctions of the environment are determined by how
            the coarse virtual values rank, so the simple-auction class size bounds them.
    """

    kind: str = ''
    approximationFactor: float = 1.0
    rankingClass: bool = False

    def __init__(self, n: int) -> None:
        if n < 1:
            raise DistributionError(f'Error: An environment needs at least one bidder, got {n}.')
        self.n = n

    def maximize(self, values: Sequence) -> tuple:
        """
        Finds the lexicographically greatest allocation maximizing Σ x_i·φ_i.

        Args:
            values (Sequence): One virtual value per bidder (BELOW_ALL allowed).

        Returns:
            tuple[float, ...]: The allocation vector.
        """
        raise NotImplementedError

    def approxMaximize(self, values: Sequence) -> tuple:
        return self.maximize(values)

    def wMax(self) -> float:
        """W_X, the largest Σ x_i over feasible allocations."""
        raise NotImplementedError

    def feasibleAllocations(self) -> list[tuple]:
        """Every allocation in X; only for small n."""
        raise NotImplementedError

    def exhaustiveMaximum(self, values: Sequence) -> float:
        """The best welfare over all feasible allocations, by enumeration."""
        keys = _keys(values)
        return max(welfare(x, keys) for x in self.feasibleAllocations())

    def _checkSize(self) -> None:
        if self.n > EXHAUSTIVE_MAX_BIDDERS:
            raise BudgetError(f'Error: Enumeration supports n ≤ {EXHAUSTIVE_MAX_BIDDERS}, got {self.n}.')

    def toDict(self) -> dict:
        return {'kind': self.kind, 'n': self.n}

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.toDict() == other.toDict()

    def __hash__(self) -> int:
        return hash(repr(self.toDict()))

    def __repr__(self) -> str:
        return f'{type(self).__name__}({self.toDict()})'


class SingleItem(Environment):
    kind = 'single-item'
    rankingClass = True

    def maximize(self, values: Sequence) -> tuple:
        keys = _keys(values)
        ranked = _ranked(keys, range(self.n))
        return tuple(1.0 if ranked and i == ranked[0] else 0.0 for i in range(self.n))

    def wMax(self) -> float:
        return 1.0

    def feasibleAllocations(self) -> list[tuple]:
        self._checkSize()
        return [(0.0,) * self.n] + [tuple(1.0 if i == k else 0.0 for i in range(self.n)) for k in range(self.n)]


class UniformMatroid(Environment):
    """Any set of at most k bidders may win."""

    kind = 'uniform-matroid'
    rankingClass = True

    def __init__(self, n: int, k: int) -> None:
        super().__init__(n)
        if k < 0:
            raise DistributionError(f'Error: Matroid rank must be nonnegative, got {k}.')
        self.k = k

    def isIndependent(self, winners: frozenset) -> bool:
        return len(winners) <= self.k

    def maximize(self, values: Sequence) -> tuple:
        chosen = set(_ranked(_keys(values), range(self.n))[:self.k])
        return tuple(1.0 if i in chosen else 0.0 for i in range(self.n))

    def wMax(self) -> float:
        return float(min(self.k, self.n))

    def feasibleAllocations(self) -> list[tuple]:
        self._checkSize()
        return [x for x in itertools.product((0.0, 1.0), repeat=self.n)
                if self.isIndependent(frozenset(i for i in range(self.n) if x[i]))]

    def toDict(self) -> dict:
        return {'kind': self.kind, 'n': self.n, 'k': self.k}


class PartitionMatroid(Environment):
    """
    Bidders are split into blocks; block b admits at most capacities[b] winners.

    Attributes:
        blocks (tuple[tuple[int, ...], ...]): A partition of the bidder indices.
        capacities (tuple[int, ...]): Winner limit per block.
    """

    kind = 'partition-matroid'
    rankingClass = True

    def __init__(self, blocks: Sequence[Sequence[int]], capacities: Sequence[int]) -> None:
        self.blocks = tuple(tuple(int(i) for i in block) for block in blocks)
        self.capacities = tuple(int(c) for c in capacities)
        members = sorted(i for block in self.blocks for i in block)

        super().__init__(len(members))

        if members != list(range(self.n)):
            raise DistributionError(f'Error: Blocks {self.blocks} must partition 0..{len(members) - 1}.')
        if len(self.capacities) != len(self.blocks) or any(c < 0 for c in self.capacities):
            raise DistributionError('Error: Each block needs one nonnegative capacity.')

    def isIndependent(self, winners: frozenset) -> bool:
        return all(len(winners.intersection(block)) <= c for block, c in zip(self.blocks, self.capacities))

    def maximize(self, values: Sequence) -> tuple:
        keys = _keys(values)
        chosen = set()

        for block, capacity in zip(self.blocks, self.capacities):
            chosen.update(_ranked(keys, block)[:capacity])

        return tuple(1.0 if i in chosen else 0.0 for i in range(self.n))

    def wMax(self) -> float:
        return float(sum(min(c, len(block)) for block, c in zip(self.blocks, self.capacities)))

    def feasibleAllocations(self) -> list[tuple]:
        self._checkSize()
        return [x for x in itertools.product((0.0, 1.0), repeat=self.n)
                if self.isIndependent(frozenset(i for i in range(self.n) if x[i]))]

    def toDict(self) -> dict:
        return {'kind': self.kind, 'blocks': [list(b) for b in self.blocks], 'capacities': list(self.capacities)}


class PublicProject(Environment):
    """Either everybody wins or nobody does."""

    kind = 'public-project'

    def maximize(self, values: Sequence) -> tuple:
        keys = _keys(values)
        build = -math.inf not in keys and welfare((1.0,) * self.n, keys) >= 0
        return (1.0 if build else 0.0,) * self.n

    def wMax(self) -> float:
        return float(self.n)

    def feasibleAllocations(self) -> list[tuple]:
        return [(0.0,) * self.n, (1.0,) * self.n]


class Position(Environment):
    """
    Seats with fractions x⁽¹⁾ ≥ … ≥ x⁽ⁿ⁾; the k-th seated bidder wins x⁽ᵏ⁾.

    Bidders with a negative virtual value are not seated.
    """

    kind = 'position'
    rankingClass = True

    def __init__(self, multipliers: Sequence[float]) -> None:
        self.multipliers = tuple(float(x) for x in multipliers)
        super().__init__(len(self.multipliers))

        if any(not 0 <= x <= 1 for x in self.multipliers):
            raise DistributionError(f'Error: Position multipliers must lie in [0, 1], got {self.multipliers}.')
        if any(b > a for a, b in zip(self.multipliers, self.multipliers[1:])):
            raise DistributionError(f'Error: Position multipliers must be nonincreasing, got {self.multipliers}.')

    def maximize(self, values: Sequence) -> tuple:
        allocation = [0.0] * self.n

        for seat, i in enumerate(_ranked(_keys(values), range(self.n))):
            allocation[i] = self.multipliers[seat]

        return tuple(allocation)

    def wMax(self) -> float:
        return math.fsum(self.multipliers)

    def feasibleAllocations(self) -> list[tuple]:
        self._checkSize()
        allocations = set()

        for size in range(self.n + 1):
            for seated in itertools.permutations(range(self.n), size):
                allocation = [0.0] * self.n
                for seat, i in enumerate(seated):
                    allocation[i] = self.multipliers[seat]
                allocations.add(tuple(allocation))

        return sorted(allocations)

    def toDict(self) -> dict:
        return {'kind': self.kind, 'multipliers': list(self.multipliers)}


class Knapsack(Environment):
    """
    Winners whose integer weights fit within the capacity.

    The exact maximizer is a dynamic program over capacities; `approxMaximize` is the
    monotone 2-approximation (density-greedy prefix against the best single item).
    """

    kind = 'knapsack'
    approximationFactor = 2.0

    def __init__(self, weights: Sequence[int], capacity: int) -> None:
        if any(float(w) != int(w) or not 0 < int(w) <= MAX_WEIGHT for w in weights):
            raise DistributionError(f'Error: Knapsack weights must be integers in 1..{MAX_WEIGHT}, got {list(weights)}.')
        if float(capacity) != int(capacity) or not 0 <= int(capacity) <= MAX_WEIGHT:
            raise DistributionError(f'Error: Knapsack capacity must be an integer in 0..{MAX_WEIGHT}, got {capacity}.')

        self.weights = tuple(int(w) for w in weights)
        self.capacity = int(capacity)
        super().__init__(len(self.weights))

    def maximize(self, values: Sequence) -> tuple:
        keys = _keys(values)
        n, capacity = self.n, self.capacity

        # best[k][c]: highest welfare from items k.. within capacity c
        best = [[0.0] * (capacity + 1) for _ in range(n + 1)]
        for k in range(n - 1, -1, -1):
            w, v = self.weights[k], keys[k]
            for c in range(capacity + 1):
                best[k][c] = best[k + 1][c]
                if v >= 0 and w <= c and v + best[k + 1][c - w] > best[k][c]:
                    best[k][c] = v + best[k + 1][c - w]

        allocation = []
        c = capacity
        for k in range(n):
            w, v = self.weights[k], keys[k]
            if v >= 0 and w <= c and v + best[k + 1][c - w] >= best[k + 1][c]:
                allocation.append(1.0)
                c -= w
            else:
                allocation.append(0.0)

        return tuple(allocation)

    def approxMaximize(self, values: Sequence) -> tuple:
        return knapsackApprox(self.weights, self.capacity, values)

    def wMax(self) -> float:
        count, used = 0, 0
        for w in sorted(self.weights):
            if used + w > self.capacity:
                break
            used += w
            count += 1
        return float(count)

    def feasibleAllocations(self) -> list[tuple]:
        self._checkSize()
        return [x for x in itertools.product((0.0, 1.0), repeat=self.n)
                if sum(w for w, chosen in zip(self.weights, x) if chosen) <= self.capacity]

    def toDict(self) -> dict:
        return {'kind': self.kind, 'weights': list(self.weights), 'capacity': self.capacity}


def knapsackApprox(weights: Sequence[int], capacity: int, values: Sequence) -> tuple:
    """
    The monotone greedy 2-approximation for knapsack welfare.

    Items heavier than the capacity and items with nonpositive value are dropped. The
    rest are scanned by decreasing density v_i/w_i (lower index on ties) and taken
    until the first one that does not fit. The result is compared with the single
    most valuable item, and the better of the two is returned.

    Args:
        weights (Sequence[int]): Positive item weights.
        capacity (int): Knapsack capacity.
        values (Sequence): Virtual values (BELOW_ALL allowed).

    Returns:
        tuple[float, ...]: The chosen allocation.
    """
    keys = _keys(values)
    n = len(weights)
    items = [i for i in range(n) if weights[i] <= capacity and keys[i] > 0]

    prefix, used = [], 0
    for i in sorted(items, key=lambda i: (-keys[i] / weights[i], i)):
        if used + weights[i] > capacity:
            break
        prefix.append(i)
        used += weights[i]

    single = min(items, key=lambda i: (-keys[i], i)) if items else None

    prefixAllocation = tuple(1.0 if i in prefix else 0.0 for i in range(n))
    if single is None:
        return prefixAllocation

    singleAllocation = tuple(1.0 if i == single else 0.0 for i in range(n))
    return prefixAllocation if welfare(prefixAllocation, keys) >= keys[single] else singleAllocation


def environmentFromDict(data: dict) -> Environment:
    """
    Builds an environment from its JSON configuration.

    Args:
        data (dict): `{"kind": ..., ...}` with the kind's parameters.

    Returns:
        Environment: The configured environment.
    """
    kind = data.get('kind')

    if kind == 'single-item':
        return SingleItem(int(data['n']))
    if kind == 'uniform-matroid':
        return UniformMatroid(int(data['n']), int(data['k']))
    if kind == 'partition-matroid':
        return PartitionMatroid(data['blocks'], data['capacities'])
    if kind == 'public-project':
        return PublicProject(int(data['n']))
    if kind == 'position':
        return Position(data['multipliers'])
    if kind == 'knapsack':
        return Knapsack(data['weights'], data['capacity'])

    raise DistributionError(f"Error: Unknown environment kind '{kind}'.")


@dataclass(frozen=True)
class SPAuction:
    """
    A Myersonian auction over a single-parameter environment.

    Attributes:
        phis (tuple[SteppedVirtualValuation, ...]): One virtual valuation per bidder.
        env (Environment): The feasible outcomes.
        approx (bool): Use the environment's approximate maximizer.
    """

    phis: tuple
    env: Environment
    approx: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, 'phis', tuple(self.phis))

        if len(self.phis) != self.env.n:
            raise DistributionError(f'Error: {len(self.phis)} virtual valuations for {self.env.n} bidders.')
        if len({phi.H for phi in self.phis}) != 1:
            raise DistributionError('Error: All virtual valuations must share H.')

    @property
    def n(self) -> int:
        return self.env.n

    @property
    def H(self) -> float:
        return self.phis[0].H

    def allocate(self, levels: Sequence) -> tuple:
        return self.env.approxMaximize(levels) if self.approx else self.env.maximize(levels)

    def thresholdPayment(self, i: int, bid: float, levels: Sequence) -> float:
        """
        Myerson's payment for bidder i with the others' levels fixed.

        Walks φ_i's breakpoints up to `bid`, starting from the allocation at BELOW_ALL,
        and charges each allocation jump times the breakpoint where it happens.

        Raises:
            MonotonicityError: If i's allocation decreases as the bid grows.
        """
        own = list(levels)
        own[i] = BELOW_ALL
        previous = self.allocate(own)[i]
        payment = 0.0

        for breakpoint, level in zip(self.phis[i].breakpoints, self.phis[i].levels):
            if breakpoint > bid:
                break
            own[i] = level
            current = self.allocate(own)[i]

            if current < previous - MONOTONE_TOL:
                raise MonotonicityError(f'Error: monotonicity violated for bidder {i} at bid {breakpoint}.')

            payment += (current - previous) * breakpoint
            previous = current

        return payment

    def run(self, bids: Sequence[float]) -> Outcome:
        """
        Runs the auction on a bid profile.

        Args:
            bids (Sequence[float]): One bid in [0, H] per bidder.

        Returns:
            Outcome: The maximizer's allocation at φ(bids) with Myerson payments.
        """
        bids = checkBids(bids, self.n, self.H)
        levels = [phi(b) for phi, b in zip(self.phis, bids)]
        allocation = self.allocate(levels)
        payments = tuple(self.thresholdPayment(i, bids[i], levels) for i in range(self.n))

        return Outcome(allocation, payments)

    def toDict(self) -> dict:
        return {
            'type': 'single-parameter',
            'H': self.H,
            'n': self.n,
            'env': self.env.toDict(),
            'approx': self.approx,
            'phis': [phi.toDict() for phi in self.phis],
        }

    @classmethod
    def fromDict(cls, data: dict) -> 'SPAuction':
        phis = [SteppedVirtualValuation.fromDict(entry, data['H']) for entry in data['phis']]
        return cls(phis, environmentFromDict(data['env']), bool(data.get('approx', False)))


SP_OPT_MAX_BIDDERS = 2
SP_OPT_MAX_SUPPORT = 3


def bruteForceSpOpt(env: Environment, Fhat: ProductDistribution) -> float:
    """
    The best revenue of any monotone deterministic auction over X, by exhaustion.

    An auction assigns a feasible allocation to every support profile so that each
    bidder's share is nondecreasing in their own value; its revenue-maximal payments
    charge every allocation jump at the support value where it happens. Revenue is a
    sum over such jumps, so rows of bidder 0's values are chained by dynamic
    programming over the possible row assignments.

    Args:
        env (Environment): An environment with at most two bidders.
        Fhat (ProductDistribution): Bidder distributions with at most three support values.

    Returns:
        float: The optimal expected revenue.
    """
    if env.n != Fhat.n:
        raise DistributionError(f'Error: Environment has {env.n} bidders but the product has {Fhat.n} factors.')
    if Fhat.n > SP_OPT_MAX_BIDDERS or any(len(F) > SP_OPT_MAX_SUPPORT for F in Fhat.factors):
        raise BudgetError(f'Error: Exhaustive optimum supports n ≤ {SP_OPT_MAX_BIDDERS} and supports ≤ {SP_OPT_MAX_SUPPORT}.')

    options = env.feasibleAllocations()
    first = Fhat.factors[0]
    tail0 = [math.fsum(first.probs[k:]) for k in range(len(first))]

    if Fhat.n == 1:
        shares = sorted({x[0] for x in options})
        best = {0.0: 0.0}
        for r, a in enumerate(first.support):
            best = {
                share: max(value + (share - low) * a * tail0[r] for low, value in best.items() if low <= share)
                for share in shares if any(low <= share for low in best)
            }
        return max(best.values())

    second = Fhat.factors[1]
    m1 = len(second)
    tail1 = [math.fsum(second.probs[k:]) for k in range(m1)]

    rows = [row for row in itertools.product(options, repeat=m1)
            if all(row[c][1] <= row[c + 1][1] for c in range(m1 - 1))]

    def ownRevenue(row: tuple) -> float:
        total, previous = 0.0, 0.0
        for c, x in enumerate(row):
            total += (x[1] - previous) * second.support[c] * tail1[c]
            previous = x[1]
        return total

    rowRevenue = {row: ownRevenue(row) for row in rows}
    best = {(0.0,) * m1: 0.0}

    for r, a in enumerate(first.support):
        nextBest = {}
        for row in rows:
            shares = tuple(x[0] for x in row)
            candidates = [
                value + math.fsum(second.probs[c] * (shares[c] - low[c]) * a * tail0[r] for c in range(m1))
                for low, value in best.items()
                if all(low[c] <= shares[c] for c in range(m1))
            ]
            if candidates:
                value = max(candidates) + first.probs[r] * rowRevenue[row]
                nextBest[shares] = max(nextBest.get(shares, -math.inf), value)
        best = nextBest

    return max(best.values())
