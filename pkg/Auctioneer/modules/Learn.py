"""
This module turns bidder samples into auctions with revenue guarantees.

The sample-size calculators solve the concentration inequalities behind each
guarantee. The pipelines build the empirical distribution, compute its optimal
(ironed) auction, round it to a coarse grid and report the revenue chain in a
`LearnReport`:

- `learnSingleItem`: greedy rounding at ε/(n+2), encoded as a simple auction.
- `learnSingleParameter`: derandomized rounding at ε/(W_X+3) for any shipped environment.
- `learnApproxSingleParameter`: the same over the approximate knapsack maximizer.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import binom

from ..stores.AuditTrail import AuditTrail
from ..utils.errors import BudgetError, DistributionError, InsufficientSamplesError
from ..utils.version import VERSION
from .Distribution import DiscreteSource, EpsGrid, empiricalFromSamples
from .Environment import Environment, Knapsack, SPAuction
from .Myerson import elkindAuction
from .Revenue import ProductDistribution, bruteForceRevenue, exactRevenueSingleItem, monteCarloRevenue
from .Rounding import greedyRound
from .Simple import classSizeBound, encodeSimple
from .SPRounding import derandomizedRoundSp

logger = logging.getLogger(__name__)

ACCEPTANCE_CONFIDENCE = 0.999
"""Confidence level of the binomial acceptance test."""

REPORT_PROFILE_BUDGET = 20000
"""Largest empirical product evaluated exactly in a report; larger ones use Monte Carlo."""

REPORT_TRIALS = 10000
"""Monte Carlo trials used when a report cannot evaluate exactly."""


def _logFailureBound(t: int, n: int, H: float, eps: float) -> float:
    """ln(t^{n−1} · 2 exp(−2tε²/H²))."""
    return (n - 1) * math.log(t) + math.log(2) - 2 * t * eps ** 2 / H ** 2


def smallestSatisfying(holds, start: int = 1) -> int:
    """
    Finds the smallest t ≥ start with holds(t), by doubling then binary search.

    Args:
        holds (Callable[[int], bool]): A predicate that stays true once it becomes true.
        start (int): The first candidate.

    Returns:
        int: The boundary t.
    """
    if holds(start):
        return start

    low, high = start, start * 2
    while not holds(high):
        low, high = high, high * 2

    while high - low > 1:
        middle = (low + high) // 2
        if holds(middle):
            high = middle
        else:
            low = middle

    return high


def sampleSizeSingleItem(H: float, n: int, eps: float, delta: float, logClassSize: float | None = None) -> int:
    """
    The smallest t with t^{n−1} · 2 exp(−2tε²/H²) ≤ δ′.

    Args:
        H (float): Upper bound of the values.
        n (int): Number of bidders.
        eps (float): Accuracy, in (0, 1].
        delta (float): Failure probability, in (0, 1].
        logClassSize (float | None): ln|S| of the auction class for a union bound,
            making δ′ = δ/(|S|+1); None means δ′ = δ.

    Returns:
        int: The number of samples per bidder.
    """
    if not 0 < eps <= 1 or not 0 < delta <= 1 or not H > 0:
        raise DistributionError(f'Error: Need ε, δ in (0, 1] and H > 0, got ε={eps}, δ={delta}, H={H}.')

    logDelta = math.log(delta)
    if logClassSize is not None:
        logDelta -= float(np.logaddexp(logClassSize, 0.0))

    return smallestSatisfying(lambda t: _logFailureBound(t, n, H, eps) <= logDelta)


def binomialAcceptance(successes: int, trials: int, delta: float, confidence: float = ACCEPTANCE_CONFIDENCE) -> bool:
    """
    Whether `successes` out of `trials` is consistent with a success rate of at least 1−δ.

    The test rejects only when so few successes would occur with probability below
    1 − confidence under the rate 1−δ.

    Args:
        successes (int): Trials meeting the guarantee.
        trials (int): Total trials.
        delta (float): Allowed failure probability.
        confidence (float): Confidence level of the test.

    Returns:
        bool: True when the run is accepted.
    """
    return float(binom.cdf(successes, trials, 1 - delta)) >= 1 - confidence


@dataclass
class LearnReport:
    """
    Everything a learning run measured, for auditing and reproduction.

    Attributes:
        kind (str): The pipeline.
        t (int): Samples per bidder behind the empirical distribution.
        eps (float): Requested accuracy.
        delta (float): Requested failure probability.
        H (float): Value bound.
        n (int): Number of bidders.
        grid (float): Rounding step used.
        auction (dict): The learned auction, serialized.
        empiricalRevenue (float): Its revenue from F̂.
        optimumRevenue (float): Revenue of the optimal auction for F̂ from F̂.
        revenueMode (str): 'exact' or 'monte-carlo'.
        s (int | None): Extra sample profiles, where used.
        e (int | None): The derandomization bit, where used.
        required (dict): Formula sample counts.
        trail (list[dict]): Intermediate entries.
        caveats (list[str]): Caps or overrides that weaken the stated guarantee.
    """

    kind: str
    t: int
    eps: float
    delta: float
    H: float
    n: int
    grid: float
    auction: dict
    empiricalRevenue: float
    optimumRevenue: float
    revenueMode: str = 'exact'
    s: int | None = None
    e: int | None = None
    required: dict = field(default_factory=dict)
    trail: list = field(default_factory=list)
    caveats: list = field(default_factory=list)

    def toDict(self) -> dict:
        return {
            'version': VERSION,
            'kind': self.kind,
            'parameters': {'eps': self.eps, 'delta': self.delta, 'H': self.H, 'n': self.n, 'grid': self.grid},
            't': self.t,
            's': self.s,
            'e': self.e,
            'required': self.required,
            'auction': self.auction,
            'empiricalRevenue': self.empiricalRevenue,
            'optimumRevenue': self.optimumRevenue,
            'revenueMode': self.revenueMode,
            'trail': self.trail,
            'caveats': self.caveats,
        }


def empiricalProduct(samples: Sequence[Sequence[float]], H: float, t: int | None = None) -> ProductDistribution:
    """F̂ = F̂_1 × ⋯ × F̂_n from per-bidder samples, optionally over the first t of each."""
    return ProductDistribution([empiricalFromSamples(column if t is None else column[:t], H) for column in samples])


def checkCounts(samples: Sequence[Sequence[float]], required: int) -> int:
    if not samples:
        raise DistributionError('Error: no samples.')

    given = min(len(column) for column in samples)
    if given < required:
        raise InsufficientSamplesError(required, given)

    return given


def applyCap(required: int, cap: int | None, trail: AuditTrail, what: str) -> int:
    """Bounds a formula sample count by an optional cap, recording a caveat when the cap binds."""
    if cap is not None and cap < required:
        trail.caveat(f'{what} capped at {cap} (formula {required})')
        return cap
    return required


def _revenueOverEmpirical(A, Fhat: ProductDistribution, seed: int) -> tuple[float, str]:
    try:
        return bruteForceRevenue(A, Fhat, REPORT_PROFILE_BUDGET), 'exact'
    except BudgetError:
        sources = [DiscreteSource(F) for F in Fhat.factors]
        estimate, _ = monteCarloRevenue(A, sources, REPORT_TRIALS, seed)
        return estimate, 'monte-carlo'


def learnSingleItem(samples: Sequence[Sequence[float]], H: float, eps: float, delta: float,
                    sampleCap: int | None = None, trail: AuditTrail | None = None):
    """
    Learns a single-item auction whose revenue is within ε of optimal with probability 1−δ.

    The pipeline is: empirical distribution, ironed virtual valuations, greedy
    rounding at step ε/(n+2), and encoding as a simple auction.

    Args:
        samples (Sequence[Sequence[float]]): One sample list per bidder.
        H (float): Value bound.
        eps (float): Accuracy.
        delta (float): Failure probability.
        sampleCap (int | None): Optional bound on the required samples per bidder.
        trail (AuditTrail | None): Receives the intermediate revenues.

    Returns:
        tuple[SimpleAuctionSequence, LearnReport]: The learned auction and its report.

    Raises:
        InsufficientSamplesError: If some bidder has fewer samples than required.
    """
    trail = trail if trail is not None else AuditTrail()
    n = len(samples)
    grid = EpsGrid(eps / (n + 2), H)

    formula = sampleSizeSingleItem(H, n, grid.eps, delta, classSizeBound(n, grid))
    required = applyCap(formula, sampleCap, trail, 'samples per bidder')
    t = checkCounts(samples, required)

    Fhat = empiricalProduct(samples, H)
    optimal = elkindAuction(Fhat.factors)
    optimumRevenue = exactRevenueSingleItem(optimal, Fhat)
    trail.record('empirical-optimum', revenue=optimumRevenue, t=t)

    rounded = greedyRound(optimal, Fhat, grid)
    roundedRevenue = exactRevenueSingleItem(rounded, Fhat)
    trail.record('greedy-rounding', revenue=roundedRevenue, grid=grid.eps, loss=optimumRevenue - roundedRevenue)

    if not roundedRevenue > optimumRevenue - n * grid.eps:
        logger.warning('Rounding lost %.6g, more than nε = %.6g', optimumRevenue - roundedRevenue, n * grid.eps)

    sequence = encodeSimple(rounded, grid)
    logger.info('Learned a simple auction with %d pairs from %d samples per bidder', len(sequence.pairs), t)

    report = LearnReport(
        kind='single-item', t=t, eps=eps, delta=delta, H=H, n=n, grid=grid.eps,
        auction=sequence.toDict(), empiricalRevenue=roundedRevenue, optimumRevenue=optimumRevenue,
        required={'t': formula}, trail=trail.entries, caveats=trail.caveats,
    )
    return sequence, report


def learnSingleParameter(samples: Sequence[Sequence[float]], env: Environment, H: float, eps: float, delta: float,
                         t: int | None = None, sampleCap: int | None = None, extraSampleCap: int | None = None,
                         ruleCap: int | None = None, profileCap: int | None = None, approx: bool = False,
                         seed: int = 0, trail: AuditTrail | None = None):
    """
    Learns an auction for a single-parameter environment.

    The first t rows of the s sample profiles form the empirical distribution; all s
    rows feed the derandomized rounding at step ε/(W_X+3).

    Args:
        samples (Sequence[Sequence[float]]): One column of s values per bidder.
        env (Environment): The environment.
        H (float): Value bound.
        eps (float): Accuracy.
        delta (float): Failure probability, split evenly between estimation and rounding.
        t (int | None): Rows used for F̂; defaults to the single-item sample size at
            step ε/(W_X+3) and δ/2, split over the simple-auction class.
        sampleCap (int | None): Optional bound on the default t.
        extraSampleCap (int | None): Optional bound on the required s.
        ruleCap (int | None): Optional bound on D.
        profileCap (int | None): Optional bound on E.
        approx (bool): Run the environment's approximate maximizer.
        seed (int): Seed for Monte Carlo evaluation of large reports.
        trail (AuditTrail | None): Receives the intermediate results.

    Returns:
        tuple[SPAuction, LearnReport]: The learned auction and its report.
    """
    trail = trail if trail is not None else AuditTrail()
    n = env.n

    if len(samples) != n:
        raise DistributionError(f'Error: {len(samples)} sample columns for {n} bidders.')
    if len({len(column) for column in samples}) > 1:
        raise DistributionError('Error: Sample columns must have equal length.')

    grid = EpsGrid(eps / (env.wMax() + 3), H)
    formula = sampleSizeSingleItem(H, n, grid.eps, delta / 2, classSizeBound(n, grid))

    if not env.rankingClass:
        trail.caveat(f'{env.kind} auctions are not ranking auctions; t uses the ranking class size bound')

    if t is None:
        t = applyCap(formula, sampleCap, trail, 'samples per bidder')
    elif t < formula:
        trail.caveat(f'prefix length set to {t} (formula {formula})')

    s = checkCounts(samples, t)

    Fhat = empiricalProduct(samples, H, t)
    optimal = SPAuction(elkindAuction(Fhat.factors).phis, env, approx)
    optimumRevenue, mode = _revenueOverEmpirical(optimal, Fhat, seed)
    trail.record('empirical-optimum', revenue=optimumRevenue, t=t, mode=mode)

    profiles = list(zip(*samples))
    outcome = derandomizedRoundSp(optimal, Fhat, profiles, grid.eps, delta / 2, t=t, ruleCap=ruleCap,
                                  profileCap=profileCap, sampleCap=extraSampleCap, trail=trail)

    learnedRevenue, mode = _revenueOverEmpirical(outcome.auction, Fhat, seed)
    trail.record('learned', revenue=learnedRevenue, e=outcome.e, mode=mode)

    report = LearnReport(
        kind='approx-single-parameter' if approx else 'single-parameter', t=t, eps=eps, delta=delta, H=H, n=n,
        grid=grid.eps, auction=outcome.auction.toDict(), empiricalRevenue=learnedRevenue,
        optimumRevenue=optimumRevenue, revenueMode=mode, s=s, e=outcome.e,
        required={'t': formula, 's': outcome.required}, trail=trail.entries, caveats=trail.caveats,
    )
    return outcome.auction, report


def learnApproxSingleParameter(samples: Sequence[Sequence[float]], env: Knapsack, H: float, eps: float, delta: float,
                               **options):
    """
    Learns a knapsack auction over the greedy 2-approximate maximizer.

    With probability 1−δ the optimal revenue is below C·(Rev(learned) + ε) with C = 2.
    Keyword options are those of `learnSingleParameter`.
    """
    if not isinstance(env, Knapsack):
        raise DistributionError(f'Error: The approximate pipeline needs a knapsack environment, got {env.kind}.')

    return learnSingleParameter(samples, env, H, eps, delta, approx=True, **options)
