"""
This module rounds Myersonian auctions for single-parameter environments.

`randomizedRoundSp` draws E valuation profiles and D randomized rounding rules from
the empirical distribution and keeps the rule whose estimated revenue is highest.
Every random choice reads a fixed number of bits from a `BitStream`, so the same
bits always give the same auction. `derandomizedRoundSp` supplies those bits from
fresh samples of the true distribution: ordered pairs of differing profiles give
unbiased bits, and when too few pairs differ every bidder is (nearly) an atom and
the welfare-extracting auction at the modal values is returned instead.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..stores.AuditTrail import AuditTrail
from ..utils.errors import BudgetError, DistributionError, InsufficientSamplesError
from .Distribution import EpsGrid, conditionalOnInterval
from .Environment import SPAuction
from .Myerson import SteppedVirtualValuation
from .Revenue import ProductDistribution
from .Rounding import REVENUE_TOL, flattenInterval

logger = logging.getLogger(__name__)

GUARD_BITS = 32
"""Extra bits read per draw beyond ⌈log₂ m⌉; the per-outcome bias is below 2⁻³²."""


def ruleDraws(H: float, eps: float, delta: float) -> int:
    """D = ⌈9H²/(2ε²) · ln(2/δ)⌉, the number of rounding rules drawn."""
    return math.ceil(9 * H ** 2 / (2 * eps ** 2) * math.log(2 / delta))


def profileDraws(H: float, eps: float, delta: float, D: int) -> int:
    """E = ⌈9H²/(2ε²) · ln(4D/δ)⌉, the number of profiles each rule is scored on."""
    return math.ceil(9 * H ** 2 / (2 * eps ** 2) * math.log(4 * D / delta))


def drawWidth(m: int) -> int:
    """Bits read per draw among at most m outcomes."""
    return GUARD_BITS + math.ceil(math.log2(max(m, 1)))


def bitBudget(n: int, grid: EpsGrid, width: int, D: int, E: int) -> int:
    """b: bits for E profiles of n values and D rules of n(⌊H/ε⌋+1) values, `width` bits each."""
    return width * (E * n + D * n * (grid.top + 1))


def atomSampleSize(n: int, delta: float) -> int:
    """s_v = ⌈8 ln(n/δ)⌉, enough samples for the modal value to reveal every atom."""
    return math.ceil(8 * math.log(n / delta))


def atomThreshold(n: int, H: float, eps: float) -> float:
    """η = ε/((n+3)H), the mass an atom must carry for welfare extraction to pay off."""
    return eps / ((n + 3) * H)


def pairSampleSize(n: int, H: float, eps: float, delta: float, b: int) -> int:
    """s_b = s'·b with s' = ⌈(n+3)H·(ln 4b + ln 1/δ)/(2ε)⌉ pairs per needed bit."""
    perBit = math.ceil((n + 3) * H * (math.log(4 * b) + math.log(1 / delta)) / (2 * eps))
    return perBit * b


def requiredExtraSamples(n: int, H: float, eps: float, delta: float, t: int, b: int) -> int:
    """s = max(2·s_b, s_v, t)."""
    return max(2 * pairSampleSize(n, H, eps, delta, b), atomSampleSize(n, delta), t)


@dataclass
class BitBudget:
    """
    Counts the random bits a rounding run reads.

    Attributes:
        b (int): Bits available.
        consumed (int): Bits read so far; never exceeds b.
    """

    b: int
    consumed: int = 0

    def spend(self, count: int) -> None:
        if self.consumed + count > self.b:
            raise BudgetError(f'Error: Reading {count} more bits exceeds the budget of {self.b}.')
        self.consumed += count


class BitStream:
    """
    A sequential source of random bits, from a generator or from a fixed bit list.

    Attributes:
        budget (BitBudget): The bit count being tracked.
        width (int): Bits read per draw.
    """

    def __init__(self, budget: BitBudget, width: int, bits: Sequence[int] | None = None,
                 rng: np.random.Generator | None = None) -> None:
        if (bits is None) == (rng is None):
            raise DistributionError('Error: A bit stream needs exactly one of bits or rng.')
        if bits is not None and len(bits) < budget.b:
            raise BudgetError(f'Error: {len(bits)} bits given, the run reads {budget.b}.')

        self.budget = budget
        self.width = width
        self._bits = list(bits) if bits is not None else None
        self._rng = rng

    def take(self, count: int) -> int:
        """Reads `count` bits, most significant first, as an unsigned integer."""
        self.budget.spend(count)

        if self._bits is not None:
            start = self.budget.consumed - count
            chunk = self._bits[start:self.budget.consumed]
        else:
            chunk = self._rng.integers(0, 2, size=count).tolist()

        value = 0
        for bit in chunk:
            value = (value << 1) | int(bit)
        return value

    def choose(self, cumulative: np.ndarray) -> int:
        """Picks an index by inverse CDF at (u + ½)/2^W, u read from `width` bits."""
        u = self.take(self.width)
        x = (u + 0.5) / 2 ** self.width
        return min(int(np.searchsorted(cumulative, x, side='right')), len(cumulative) - 1)


def _drawProfiles(Fhat: ProductDistribution, count: int, stream: BitStream) -> Counter:
    profiles = Counter()

    for _ in range(count):
        profile = tuple(F.support[stream.choose(F.cumulative)] for F in Fhat.factors)
        profiles[profile] += 1

    return profiles


def _drawRounding(A: SPAuction, Fhat: ProductDistribution, grid: EpsGrid, stream: BitStream) -> SPAuction:
    phis = list(A.phis)

    for i, F in enumerate(Fhat.factors):
        for j in grid.indices:
            conditional = conditionalOnInterval(F, j, grid)
            if conditional is None:
                value = grid.lower(j)
            else:
                value = conditional.support[stream.choose(conditional.cumulative)]
            phis[i] = flattenInterval(phis[i], j, phis[i](value), grid)

    return SPAuction(phis, A.env, A.approx)


def _estimate(A: SPAuction, profiles: Counter, total: int) -> float:
    return math.fsum(count * A.run(profile).revenue for profile, count in profiles.items()) / total


@dataclass(frozen=True)
class RoundingPlan:
    """
    The draw counts and bit budget of one randomized rounding run.

    Attributes:
        D (int): Rounding rules drawn.
        E (int): Profiles drawn.
        width (int): Bits per draw.
        b (int): Bits needed in total.
        caveats (tuple[str, ...]): Caps that bound below the formula values.
    """

    D: int
    E: int
    width: int
    b: int
    caveats: tuple = field(default=())


def planRounding(Fhat: ProductDistribution, eps: float, delta: float, ruleCap: int | None = None,
                 profileCap: int | None = None, t: int | None = None) -> RoundingPlan:
    """
    Evaluates D, E and b for a run, applying optional caps.

    Args:
        Fhat (ProductDistribution): The empirical distribution.
        eps (float): The grid step.
        delta (float): Failure probability of the run.
        ruleCap (int | None): Upper bound on D.
        profileCap (int | None): Upper bound on E.
        t (int | None): Sample count behind F̂; defaults to its largest support.

    Returns:
        RoundingPlan: The counts to use and the caveats for each binding cap.
    """
    grid = EpsGrid(eps, Fhat.H)
    D = ruleDraws(Fhat.H, eps, delta)
    E = profileDraws(Fhat.H, eps, delta, D)
    caveats = []

    if ruleCap is not None and ruleCap < D:
        caveats.append(f'rule draws capped at {ruleCap} (formula {D})')
        D = ruleCap
    if profileCap is not None and profileCap < E:
        caveats.append(f'profile draws capped at {profileCap} (formula {E})')
        E = profileCap

    width = drawWidth(t if t is not None else max(len(F) for F in Fhat.factors))
    return RoundingPlan(D, E, width, bitBudget(Fhat.n, grid, width, D, E), tuple(caveats))


def _roundWithStream(A: SPAuction, Fhat: ProductDistribution, eps: float, plan: RoundingPlan,
                     stream: BitStream, trail: AuditTrail | None) -> SPAuction:
    if A.n != Fhat.n:
        raise DistributionError(f'Error: Auction has {A.n} bidders but the product has {Fhat.n} factors.')

    grid = EpsGrid(eps, Fhat.H)
    profiles = _drawProfiles(Fhat, plan.E, stream)

    best, bestEstimate = None, -math.inf
    for d in range(plan.D):
        candidate = _drawRounding(A, Fhat, grid, stream)
        estimate = _estimate(candidate, profiles, plan.E)
        logger.debug('Rounding %d: estimated revenue %.12g', d, estimate)

        if estimate > bestEstimate + REVENUE_TOL:
            best, bestEstimate = candidate, estimate

    logger.info('Randomized rounding kept an estimate of %.12g after %d rules, %d bits read',
                bestEstimate, plan.D, stream.budget.consumed)

    if trail is not None:
        trail.record('sp-rounding', D=plan.D, E=plan.E, bits=stream.budget.consumed, estimate=bestEstimate)

    return best


def randomizedRoundSp(A: SPAuction, Fhat: ProductDistribution, eps: float, delta: float, seed: int,
                      ruleCap: int | None = None, profileCap: int | None = None,
                      trail: AuditTrail | None = None) -> SPAuction:
    """
    Rounds an SP auction by scoring D randomized rules on E drawn profiles.

    Args:
        A (SPAuction): The auction to round, usually Myersonian for F̂.
        Fhat (ProductDistribution): The empirical distribution.
        eps (float): The grid step.
        delta (float): Failure probability.
        seed (int): Seed of the generator supplying the bits.
        ruleCap (int | None): Optional bound on D.
        profileCap (int | None): Optional bound on E.
        trail (AuditTrail | None): Receives the run's counts and estimate.

    Returns:
        SPAuction: The ε-coarse rounding with the highest estimate; with probability
            at least 1−δ its revenue from F̂ exceeds Rev(A, F̂) − (W_X+1)ε.
    """
    plan = planRounding(Fhat, eps, delta, ruleCap, profileCap)
    stream = BitStream(BitBudget(plan.b), plan.width, rng=np.random.default_rng(seed))

    if trail is not None:
        for caveat in plan.caveats:
            trail.caveat(caveat)

    return _roundWithStream(A, Fhat, eps, plan, stream, trail)


def roundWithBits(A: SPAuction, Fhat: ProductDistribution, eps: float, delta: float, bits: Sequence[int],
                  ruleCap: int | None = None, profileCap: int | None = None, t: int | None = None,
                  trail: AuditTrail | None = None) -> SPAuction:
    """The randomized rounding run on a fixed bit sequence instead of a generator."""
    plan = planRounding(Fhat, eps, delta, ruleCap, profileCap, t)
    stream = BitStream(BitBudget(plan.b), plan.width, bits=bits)

    return _roundWithStream(A, Fhat, eps, plan, stream, trail)


def extractBits(pairs: Sequence[tuple[Sequence[float], Sequence[float]]]) -> list[int]:
    """
    Turns ordered pairs of profiles into unbiased bits.

    Identical pairs give no bit. Otherwise the bit is 1 exactly when the first
    profile is smaller at the first coordinate where the two differ.

    Args:
        pairs (Sequence[tuple]): Pairs of equally long profiles.

    Returns:
        list[int]: One bit per nonidentical pair, in order.
    """
    bits = []

    for first, second in pairs:
        for a, b in zip(first, second):
            if a != b:
                bits.append(1 if a < b else 0)
                break

    return bits


def welfareExtractor(atoms: Sequence[float], A: SPAuction) -> SPAuction:
    """The auction with φ'_i = v_i from v_i on: it charges the full welfare at the atoms."""
    phis = [SteppedVirtualValuation([v], [v], A.H) for v in atoms]
    return SPAuction(phis, A.env, A.approx)


def _modalValue(column: Sequence[float]) -> float:
    counts = Counter(float(v) for v in column)
    top = max(counts.values())
    return min(v for v, c in counts.items() if c == top)


@dataclass(frozen=True)
class DerandomizationOutcome:
    """
    The result of the derandomized rounding.

    Attributes:
        e (int): 1 when the rounding ran on extracted bits, 0 on the welfare-extractor path.
        phis (tuple[SteppedVirtualValuation, ...]): The output virtual valuations.
        auction (SPAuction): The output auction over the input's environment.
        required (int): Extra samples the guarantee asks for.
    """

    e: int
    phis: tuple
    auction: SPAuction
    required: int


def derandomizedRoundSp(A: SPAuction, Fhat: ProductDistribution, samples: Sequence[Sequence[float]], eps: float,
                        delta: float, t: int | None = None, ruleCap: int | None = None, profileCap: int | None = None,
                        sampleCap: int | None = None, trail: AuditTrail | None = None) -> DerandomizationOutcome:
    """
    Rounds an SP auction deterministically, drawing its randomness from extra samples.

    The s samples are split into ⌊s/2⌋ ordered pairs. With fewer than b nonidentical
    pairs, every bidder gets the welfare-extracting φ'_i at their most common sampled
    value (e = 0). Otherwise the first b extracted bits drive the randomized rounding
    (e = 1).

    Args:
        A (SPAuction): The auction to round.
        Fhat (ProductDistribution): The empirical distribution A was built from.
        samples (Sequence[Sequence[float]]): s profiles from the true distribution.
        eps (float): The grid step.
        delta (float): Failure probability.
        t (int | None): Sample count behind F̂.
        ruleCap (int | None): Optional bound on D.
        profileCap (int | None): Optional bound on E.
        sampleCap (int | None): Optional bound on the required s.
        trail (AuditTrail | None): Receives counts, the bit e and caveats.

    Returns:
        DerandomizationOutcome: The bit e and the rounded auction.

    Raises:
        InsufficientSamplesError: If fewer than the required s samples are given.
    """
    n, H = Fhat.n, Fhat.H
    # the rounding itself must succeed with probability 1 − δ/2
    plan = planRounding(Fhat, eps, delta / 2, ruleCap, profileCap, t)
    t = t if t is not None else max(len(F) for F in Fhat.factors)

    required = requiredExtraSamples(n, H, eps, delta, t, plan.b)
    caveats = list(plan.caveats)
    if sampleCap is not None and sampleCap < required:
        caveats.append(f'extra samples capped at {sampleCap} (formula {required})')
        required = sampleCap

    samples = [tuple(float(v) for v in profile) for profile in samples]
    if len(samples) < required:
        raise InsufficientSamplesError(required, len(samples), 'extra sample profiles')
    if any(len(profile) != n for profile in samples):
        raise DistributionError(f'Error: Every extra sample must hold {n} values.')

    pairs = [(samples[2 * k], samples[2 * k + 1]) for k in range(len(samples) // 2)]
    bits = extractBits(pairs)

    if trail is not None:
        trail.record('derandomization', samples=len(samples), required=required, b=plan.b, differing=len(bits))
        for caveat in caveats:
            trail.caveat(caveat)

    if len(bits) < plan.b:
        atoms = [_modalValue(column) for column in zip(*samples)]
        logger.info('Only %d of %d needed pairs differ; extracting welfare at %s', len(bits), plan.b, atoms)
        auction = welfareExtractor(atoms, A)
        return DerandomizationOutcome(0, auction.phis, auction, required)

    auction = roundWithBits(A, Fhat, eps, delta / 2, bits[:plan.b], ruleCap, profileCap, t, trail)
    return DerandomizationOutcome(1, auction.phis, auction, required)
