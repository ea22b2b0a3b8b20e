"""
This module computes the expected revenue of auctions over product distributions.

`exactRevenueSingleItem` is the fast exact path for Myersonian single-item auctions:
the revenue depends only on the winner and the runner-up in precedence order, so it
enumerates (runner-up, runner-up value) pairs instead of full profiles. A dummy
bidder with constant level 0 who loses every tie stands in for the reserve. The
brute-force functions enumerate full profiles and serve as oracles.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ..utils.errors import BudgetError, DistributionError
from .Distribution import DiscreteDistribution, SampleSource
from .Myerson import SingleItemAuction, levelKey

logger = logging.getLogger(__name__)

PROFILE_BUDGET = 10 ** 6
"""Largest number of profiles a brute-force enumeration may visit."""

OPT_MAX_BIDDERS = 2
"""Largest bidder count accepted by `bruteForceOpt`."""

OPT_MAX_SUPPORT = 4
"""Largest support size per bidder accepted by `bruteForceOpt`."""


@dataclass(frozen=True)
class ProductDistribution:
    """
    Independent bidder distributions F_1 × ⋯ × F_n.

    Attributes:
        factors (tuple[DiscreteDistribution, ...]): One distribution per bidder.
    """

    factors: tuple

    def __post_init__(self) -> None:
        object.__setattr__(self, 'factors', tuple(self.factors))

        if not self.factors:
            raise DistributionError('Error: A product needs at least one factor.')
        if len({F.H for F in self.factors}) != 1:
            raise DistributionError('Error: All factors must share H.')

    @classmethod
    def iid(cls, F: DiscreteDistribution, n: int) -> 'ProductDistribution':
        return cls((F,) * n)

    @property
    def n(self) -> int:
        return len(self.factors)

    @property
    def H(self) -> float:
        return self.factors[0].H

    def profileCount(self) -> int:
        return math.prod(len(F) for F in self.factors)

    def profiles(self, budget: int = PROFILE_BUDGET) -> Iterator[tuple[tuple, float]]:
        """
        Yields every profile of the product support with its probability.

        Args:
            budget (int): Largest admissible number of profiles.

        Raises:
            BudgetError: If the product support exceeds `budget`.
        """
        count = self.profileCount()

        if count > budget:
            raise BudgetError(f'Error: {count} profiles exceed the budget of {budget}.')

        for combo in itertools.product(*(zip(F.support, F.probs) for F in self.factors)):
            yield tuple(v for v, _ in combo), math.prod(p for _, p in combo)

    def toDict(self) -> dict:
        return {'H': self.H, 'factors': [F.toDict() for F in self.factors]}


def _lessMass(levels: np.ndarray, cumulative: np.ndarray, threshold: np.ndarray, inclusive: bool) -> np.ndarray:
    """P(level < threshold), or P(level ≤ threshold) when `inclusive`, for sorted levels."""
    side = 'right' if inclusive else 'left'
    return cumulative[np.searchsorted(levels, threshold, side=side)]


def exactRevenueSingleItem(A: SingleItemAuction, Fhat: ProductDistribution) -> float:
    """
    Computes Rev^A(F̂) exactly for a Myersonian single-item auction.

    Bidder j at value v_j is the runner-up for winner i when i precedes (j, v_j) and
    (j, v_j) precedes every other bidder, the dummy reserve bidder included. The winner
    then pays w_i, the first breakpoint of φ_i whose level precedes (j, φ_j(v_j)).
    Precedence is the lexicographic rule: higher level first, lower index on ties.

    Args:
        A (SingleItemAuction): The auction.
        Fhat (ProductDistribution): Independent bidder distributions.

    Returns:
        float: The expected revenue.

    Raises:
        DistributionError: If the auction and the product disagree on n or H.
    """
    if A.n != Fhat.n:
        raise DistributionError(f'Error: Auction has {A.n} bidders but the product has {Fhat.n} factors.')
    if A.H != Fhat.H:
        raise DistributionError(f'Error: Auction uses H={A.H} but the product uses H={Fhat.H}.')

    n = A.n
    dummy = n

    # per bidder: levels at support values (nondecreasing), probabilities, prefix masses
    levels, probs, cumulative = [], [], []
    for phi, F in zip(A.phis, Fhat.factors):
        levels.append(np.asarray([levelKey(phi(v)) for v in F.support], dtype=float))
        probs.append(np.asarray(F.probs, dtype=float))
        cumulative.append(np.concatenate(([0.0], np.cumsum(F.probs))))

    levels.append(np.zeros(1))
    probs.append(np.ones(1))

    total = 0.0

    for i in range(n):
        breakpoints = A.phis[i].breakpointArray
        breakpointLevels = A.phis[i].levelArray

        for j in range(n + 1):
            if j == i:
                continue

            runnerUp = levels[j]

            # i precedes j: level_i > level_j, or equal with i < j
            beats = 1.0 - _lessMass(levels[i], cumulative[i], runnerUp, inclusive=i > j)

            # j precedes every k outside {i, j}
            others = np.ones_like(runnerUp)
            for k in range(n + 1):
                if k in (i, j):
                    continue
                if k == dummy:
                    others = others * (runnerUp >= 0)
                else:
                    others = others * _lessMass(levels[k], cumulative[k], runnerUp, inclusive=j < k)

            index = np.searchsorted(breakpointLevels, runnerUp, side='left' if i < j else 'right')
            reachable = index < len(breakpoints)
            threshold = np.where(reachable, breakpoints[np.minimum(index, len(breakpoints) - 1)], 0.0)

            total += float(np.sum(threshold * beats * probs[j] * others))

    return total


def bruteForceRevenue(A, Fhat: ProductDistribution, budget: int = PROFILE_BUDGET) -> float:
    """
    Computes Rev^A(F̂) by running the auction on every profile.

    Args:
        A: Any auction exposing `run(bids) -> Outcome`.
        Fhat (ProductDistribution): Independent bidder distributions.
        budget (int): Largest admissible number of profiles.

    Returns:
        float: Σ over profiles of probability × revenue.

    Raises:
        BudgetError: If the instance is too large.
    """
    return math.fsum(p * A.run(profile).revenue for profile, p in Fhat.profiles(budget))


def _singleBidderOpt(F: DiscreteDistribution) -> tuple[float, float | None]:
    best, reserve = 0.0, None

    for k, v in enumerate(F.support):
        revenue = v * math.fsum(F.probs[k:])
        if revenue > best:
            best, reserve = revenue, v

    return best, reserve


def bruteForceOpt(Fhat: ProductDistribution) -> tuple[float, dict]:
    """
    Finds the optimal deterministic truthful auction by exhaustive search.

    Every such auction is described by own-value thresholds: for each value of the
    opponent, a bidder wins exactly at their support values from some index on, and pays
    the value at that index. Two bidders may never win together. With bidder 0's
    threshold per column fixed, each row's threshold for bidder 1 is optimized
    independently.

    Args:
        Fhat (ProductDistribution): At most two bidders with at most four support values each.

    Returns:
        tuple[float, dict]: The optimal revenue and a description of the thresholds
            (index len(support) means "never wins").

    Raises:
        BudgetError: If the instance exceeds the exhaustive-search limits.
    """
    if Fhat.n > OPT_MAX_BIDDERS or any(len(F) > OPT_MAX_SUPPORT for F in Fhat.factors):
        raise BudgetError(f'Error: Exhaustive optimum supports n ≤ {OPT_MAX_BIDDERS} and supports ≤ {OPT_MAX_SUPPORT}.')

    if Fhat.n == 1:
        revenue, reserve = _singleBidderOpt(Fhat.factors[0])
        return revenue, {'reserve': reserve}

    first, second = Fhat.factors
    m0, m1 = len(first), len(second)
    tail0 = [math.fsum(first.probs[k:]) for k in range(m0)] + [0.0]
    tail1 = [math.fsum(second.probs[k:]) for k in range(m1)] + [0.0]

    best, bestDescription = -1.0, {}

    for thresholds0 in itertools.product(range(m0 + 1), repeat=m1):
        revenue0 = math.fsum(
            second.probs[c] * tail0[t] * first.support[t]
            for c, t in enumerate(thresholds0) if t < m0
        )

        thresholds1 = []
        revenue1 = 0.0
        for r in range(m0):
            rowBest, rowThreshold = 0.0, m1
            for t in range(m1):
                # bidder 1 wins on columns t.. of row r; bidder 0 must lose there
                if not all(r < thresholds0[c] for c in range(t, m1)):
                    continue
                value = second.support[t] * tail1[t]
                if value > rowBest:
                    rowBest, rowThreshold = value, t
            thresholds1.append(rowThreshold)
            revenue1 += first.probs[r] * rowBest

        revenue = revenue0 + revenue1
        if revenue > best:
            best = revenue
            bestDescription = {'thresholds0': list(thresholds0), 'thresholds1': thresholds1}

    logger.debug('Exhaustive optimum %.12g with %s', best, bestDescription)

    return best, bestDescription


def _cdf(F: DiscreteDistribution, x: float) -> float:
    """P(V ≤ x)."""
    k = int(np.searchsorted(F.support, x, side='right'))
    return float(F.cumulative[k - 1]) if k > 0 else 0.0


def expectedWelfare(Fhat: ProductDistribution) -> float:
    """E[max_i v_i], the expected welfare of always selling to the highest value."""
    points = sorted({v for F in Fhat.factors for v in F.support})
    previous = 0.0
    total = []

    for x in points:
        below = math.prod(_cdf(F, x) for F in Fhat.factors)
        total.append(x * (below - previous))
        previous = below

    return math.fsum(total)


def monteCarloRevenue(A, sources: Sequence[SampleSource], trials: int, seed: int) -> tuple[float, float]:
    """
    Estimates the expected revenue by running the auction on sampled profiles.

    Each bidder draws from their own child generator of `seed`, so the estimate is
    reproducible and the draws of one bidder do not depend on the others.

    Args:
        A: Any auction exposing `run(bids) -> Outcome`.
        sources (Sequence[SampleSource]): One source per bidder.
        trials (int): Number of sampled profiles, at least 1.
        seed (int): Generator seed.

    Returns:
        tuple[float, float]: The sample mean and its standard error.
    """
    if trials < 1:
        raise DistributionError(f'Error: Monte Carlo needs at least one trial, got {trials}.')

    generators = [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(len(sources))]
    columns = [source.sample(trials, rng) for source, rng in zip(sources, generators)]

    revenues = np.fromiter((A.run(profile).revenue for profile in zip(*columns)), dtype=float, count=trials)
    stdError = float(revenues.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0

    logger.debug('Monte Carlo over %d trials: %.6g ± %.3g', trials, revenues.mean(), stdError)

    return float(revenues.mean()), stdError
