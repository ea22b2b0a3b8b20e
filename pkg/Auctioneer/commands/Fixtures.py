"""
This module contains the regression fixtures run by the `repro` command.

- **triangle** → two bidders, U[0, 2] against a rising triangle of width ε below ⌊1⌋_ε:
  the coarse round-down auction loses more than 1/13 on a witness profile.
- **tight** → one bidder on {0, v} with v < ε: the optimum earns η, every coarse
  rounding earns 0.
- **round-down-loss** → the same pair of distributions: rounding every bid down loses
  more than 1/8 in expected revenue (Monte Carlo).
- **iid-perprofile** → rounding the parameters of a reserve-and-ironed auction down
  loses less than ε on every profile.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from ..modules.Distribution import GRID_TOL, DiscreteDistribution, EpsGrid, TriangleSource, UniformSource
from ..modules.Iid import ReserveIronedAuction, roundDownAuction
from ..modules.Myerson import elkindAuction
from ..modules.Revenue import ProductDistribution, exactRevenueSingleItem
from ..modules.Rounding import (RoundingAction, RoundingRule, applyRule, greedyRound, isCoarse,
                                roundDownBaseline)
from ..utils.errors import ConfigError
from . import properties

logger = logging.getLogger(__name__)


@dataclass
class FixtureResult:
    """
    The outcome of one fixture.

    Attributes:
        name (str): The fixture.
        passed (bool): Whether every checked inequality held.
        measured (dict): The quantities the verdict rests on.
    """

    name: str
    passed: bool
    measured: dict = field(default_factory=dict)

    def toDict(self) -> dict:
        return {'fixture': self.name, 'result': 'PASS' if self.passed else 'FAIL', **self.measured}


class TriangleCurves:
    """
    Closed-form virtual valuations of the triangle pair.

    Bidder 1 is U[0, 2] with φ₁(v) = 2v − 2. Bidder 2 has density 2(x − a)/ε² on
    [a, a + ε] with a = ⌊1⌋_ε − ε; with u = (x − a)/ε its virtual valuation is
    φ₂(x) = a + ε(3u² − 1)/(2u), which is −∞ at x = a and ⌊1⌋_ε at the top.
    All methods accept numpy arrays.
    """

    H = 2.0

    def __init__(self, eps: float) -> None:
        self.eps = eps
        self.grid = EpsGrid(eps, self.H)
        self.a = TriangleSource(eps, self.H).a

    @staticmethod
    def phi1(v):
        return 2 * np.asarray(v, dtype=float) - 2

    @staticmethod
    def phi1Inverse(y):
        return (np.asarray(y, dtype=float) + 2) / 2

    def phi2(self, x):
        u = (np.asarray(x, dtype=float) - self.a) / self.eps
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(u > 0, self.a + self.eps * (3 * u ** 2 - 1) / (2 * u), -np.inf)

    def phi2Inverse(self, y):
        """The x with φ₂(x) = y, for y ≤ ⌊1⌋_ε."""
        c = (np.asarray(y, dtype=float) - self.a) / self.eps
        return self.a + self.eps * (c + np.sqrt(c ** 2 + 3)) / 3

    def floor(self, v):
        return self.eps * np.floor(np.asarray(v, dtype=float) / self.eps + GRID_TOL)

    def ceil(self, v):
        return self.eps * np.ceil(np.asarray(v, dtype=float) / self.eps - GRID_TOL)

    def optimalRevenue(self, v1, v2):
        """Revenue of the optimal auction on each profile; bidder 1 wins ties."""
        l1, l2 = self.phi1(v1), self.phi2(v2)
        first = (l1 >= l2) & (l1 >= 0)
        second = (l2 > l1) & (l2 >= 0)

        pay1 = self.phi1Inverse(np.maximum(l2, 0))
        pay2 = self.phi2Inverse(np.maximum(l1, 0))

        return np.where(first, pay1, np.where(second, pay2, 0.0))

    def roundDownRevenue(self, v1, v2):
        """
        Revenue of the auction allocating as the optimum would on ⌊v1⌋_ε, ⌊v2⌋_ε.

        Bidder 1 pays the smallest grid point whose level reaches bidder 2's rounded
        level. Bidder 2 reaches a nonnegative level only at the grid point ⌊1⌋_ε, which
        is then their payment.
        """
        f1, f2 = self.floor(v1), self.floor(v2)
        l1, l2 = self.phi1(f1), self.phi2(f2)
        first = (l1 >= l2) & (l1 >= 0)
        second = (l2 > l1) & (l2 >= 0)

        pay1 = self.ceil(self.phi1Inverse(np.maximum(l2, 0)))

        return np.where(first, pay1, np.where(second, f2, 0.0))


def triangleFixture(eps: float = properties.FIXTURE_EPS) -> FixtureResult:
    """Checks the witness profiles (5/4, φ₂⁻¹(1/3)) and (3/2, φ₂⁻¹(2/3))."""
    if not 0 < eps < 1 / 3:
        raise ConfigError(f'Error: The triangle fixture needs ε < 1/3, got {eps}.')

    curves = TriangleCurves(eps)
    v1 = np.array([5 / 4, 3 / 2])
    v2 = curves.phi2Inverse(np.array([1 / 3, 2 / 3]))

    optimum = curves.optimalRevenue(v1, v2)
    roundDown = curves.roundDownRevenue(v1, v2)
    losses = optimum - roundDown

    inside = bool(np.all((curves.a <= v2) & (v2 < curves.a + eps)))
    exact = bool(np.allclose(optimum, [7 / 6, 4 / 3], rtol=0, atol=properties.TOLERANCE))
    passed = inside and exact and float(losses.max()) > 1 / 13

    return FixtureResult('triangle', passed, {
        'eps': eps,
        'witnesses': [[float(x), float(y)] for x, y in zip(v1, v2)],
        'optimumRevenue': optimum.tolist(),
        'roundDownRevenue': roundDown.tolist(),
        'loss': losses.tolist(),
        'bound': 1 / 13,
    })


def tightFixture(eps: float = properties.FIXTURE_EPS, eta: float = properties.TIGHT_ETA,
                 H: float = 1.0) -> FixtureResult:
    """
    One bidder valuing v = (ε + η)/2 with probability η/v and 0 otherwise.

    The optimum sells at v and earns η. Both values share ε-interval 0, so every
    coarse rounding either always sells at price 0 or never sells.
    """
    if not 0 < eta < eps <= H:
        raise ConfigError(f'Error: The tight fixture needs 0 < η < ε ≤ H, got η={eta}, ε={eps}.')

    v = (eps + eta) / 2
    p = eta / v
    Fhat = ProductDistribution([DiscreteDistribution([0.0, v], [1 - p, p], H)])
    grid = EpsGrid(eps, H)
    optimal = elkindAuction(Fhat.factors)

    roundings = {'greedy': greedyRound(optimal, Fhat, grid), 'round-down': roundDownBaseline(optimal, grid)}
    for value in Fhat.factors[0].support:
        actions = [RoundingAction(0, j, value if j == 0 else grid.lower(j)) for j in grid.indices]
        roundings[f'rule-{value:g}'] = applyRule(optimal, RoundingRule(actions, grid, 1))

    optimum = exactRevenueSingleItem(optimal, Fhat)
    revenues = {name: exactRevenueSingleItem(A, Fhat) for name, A in roundings.items()}

    passed = abs(optimum - eta) <= properties.TOLERANCE and \
        all(abs(revenue) <= properties.TOLERANCE for revenue in revenues.values()) and \
        all(isCoarse(A, grid) for A in roundings.values())

    return FixtureResult('tight', passed, {
        'eps': eps,
        'eta': eta,
        'value': v,
        'probability': p,
        'optimumRevenue': optimum,
        'coarseRevenue': revenues,
    })


def roundDownLossFixture(seed: int, eps: float = properties.FIXTURE_EPS,
                         trials: int = properties.ROUND_DOWN_SAMPLES) -> FixtureResult:
    """
    Estimates Rev(optimum) − Rev(round-down) on the triangle pair by Monte Carlo.

    Passes when the gap exceeds 1/8 by more than three standard errors.
    """
    if not 0 < eps < 1 / 4:
        raise ConfigError(f'Error: The round-down-loss fixture needs ε < 1/4, got {eps}.')
    if trials < 2:
        raise ConfigError(f'Error: The round-down-loss fixture needs at least 2 trials, got {trials}.')

    curves = TriangleCurves(eps)
    sources = [UniformSource(0.0, 2.0, curves.H), TriangleSource(eps, curves.H)]
    generators = [np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(len(sources))]
    v1, v2 = (source.sample(trials, rng) for source, rng in zip(sources, generators))

    optimum = curves.optimalRevenue(v1, v2)
    roundDown = curves.roundDownRevenue(v1, v2)
    gaps = optimum - roundDown
    gap = float(gaps.mean())
    stderr = float(gaps.std(ddof=1) / math.sqrt(trials))

    logger.info('Round-down gap %.6g ± %.3g over %d profiles', gap, stderr, trials)

    return FixtureResult('round-down-loss', gap - 3 * stderr > 1 / 8, {
        'eps': eps,
        'seed': seed,
        'trials': trials,
        'optimumRevenue': float(optimum.mean()),
        'roundDownRevenue': float(roundDown.mean()),
        'gap': gap,
        'stderr': stderr,
        'bound': 1 / 8,
    })


def _randomReserveIroned(rng: np.random.Generator, H: float) -> ReserveIronedAuction:
    p = float(rng.uniform(0, H))
    points = np.unique(rng.uniform(p, H, size=2 * int(rng.integers(0, 4))))
    intervals = [(float(points[k]), float(points[k + 1])) for k in range(0, len(points) - 1, 2)]

    closedTop = False
    if intervals and rng.random() < 0.25:
        intervals[-1] = (intervals[-1][0], H)
        closedTop = bool(rng.random() < 0.5)

    return ReserveIronedAuction(p, intervals, H, closedTop)


def _randomBid(rng: np.random.Generator, auction: ReserveIronedAuction, grid: EpsGrid) -> float:
    kind = rng.integers(0, 3)

    if kind == 0:
        return float(rng.uniform(0, auction.H))
    if kind == 1:
        return min(grid.lower(int(rng.integers(0, grid.top + 1))), auction.H)

    edges = auction.breakpoints
    return float(edges[int(rng.integers(0, len(edges)))])


def perProfileMargin(auction: ReserveIronedAuction, rounded: ReserveIronedAuction, eps: float,
                     bids: list[float]) -> float:
    """r(rounded; b) − (r(auction; b) − ε), which must stay strictly positive."""
    return rounded.run(bids).revenue - (auction.run(bids).revenue - eps)


def marginFails(margin: float) -> bool:
    """A margin within the grid tolerance of zero counts as a failure."""
    return margin <= properties.TOLERANCE


def iidPerProfileFixture(seed: int, checks: int = properties.PERPROFILE_CHECKS, H: float = 1.0) -> FixtureResult:
    """
    Checks r(⌊(p, I)⌋_ε; b) > r((p, I); b) − ε on random auctions, steps and profiles.

    Bids are drawn uniformly, on the grid or on the auction's own breakpoints, so that
    the edge cases of the rounding are hit often.
    """
    rng = np.random.default_rng(seed)
    failures = []
    worst = math.inf

    for _ in range(checks):
        auction = _randomReserveIroned(rng, H)
        eps = float(rng.uniform(0.02, 0.5))
        grid = EpsGrid(eps, H)
        rounded = roundDownAuction(auction, eps)
        bids = [_randomBid(rng, auction, grid) for _ in range(int(rng.integers(1, 5)))]

        margin = perProfileMargin(auction, rounded, eps, bids)
        worst = min(worst, margin)

        if marginFails(margin):
            failures.append({'auction': auction.toDict(), 'eps': eps, 'bids': bids, 'margin': margin})

    return FixtureResult('iid-perprofile', not failures, {
        'seed': seed,
        'checks': checks,
        'failures': len(failures),
        'worstMargin': worst,
        'witnesses': failures[:5],
    })
