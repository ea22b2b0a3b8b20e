"""
This module defines the `verify` command, which checks an auction file for
truthfulness, individual rationality and, given `--eps`, ε-coarseness, on the
profiles of a discrete distribution specification.
"""

import json
import logging

from ..modules.Distribution import EpsGrid
from ..modules.Iid import ReserveIronedAuction
from ..modules.Revenue import ProductDistribution
from ..modules.Rounding import coarsenessWitnesses
from ..modules.Simple import SimpleAuctionSequence
from ..utils.errors import BudgetError, DistributionError
from . import properties
from .Artifacts import TabulatedAuction, discreteProduct, readAuction, readSources
from .Command import Command
from .RunConfig import RunConfig
from .UseConfig import UseConfig

logger = logging.getLogger(__name__)


def _upperBound(auction) -> float:
    return auction.grid.H if isinstance(auction, SimpleAuctionSequence) else auction.H


def _deviations(auction, Fhat: ProductDistribution, i: int) -> list[float]:
    if isinstance(auction, TabulatedAuction):
        return auction.bidsOf(i)
    return sorted(set(Fhat.factors[i].support) | {0.0, _upperBound(auction)})


def _utility(outcome, i: int, value: float) -> float:
    return outcome.allocation[i] * value - outcome.payments[i]


def _coarsenessWitnesses(auction, grid: EpsGrid, outcomes: dict) -> list[dict]:
    """Off-grid breakpoints where the auction exposes them, else pairs of profiles in one ε-box with different outcomes."""
    if isinstance(auction, SimpleAuctionSequence):
        auction = auction.toAuction()

    if hasattr(auction, 'phis'):
        return coarsenessWitnesses(auction, grid)

    if isinstance(auction, ReserveIronedAuction):
        return [{'breakpoint': b, 'interval': grid.intervalIndex(b)} for b in auction.breakpoints if not grid.isGridPoint(b)]

    boxes = {}
    witnesses = []

    for profile, outcome in sorted(outcomes.items(), key=lambda item: item[0]):
        if outcome is None:
            continue
        box = tuple(grid.intervalIndex(b) for b in profile)
        first = boxes.setdefault(box, (profile, outcome))

        if not _sameOutcome(first[1], outcome):
            witnesses.append({'box': list(box), 'profiles': [list(first[0]), list(profile)]})

    return witnesses


def _sameOutcome(a, b) -> bool:
    pairs = zip(a.allocation + a.payments, b.allocation + b.payments)
    return all(abs(x - y) <= properties.TOLERANCE for x, y in pairs)


def verifyAuction(auction, Fhat: ProductDistribution, eps: float | None = None,
                  budget: int = properties.VERIFY_BUDGET) -> dict:
    """
    Checks truthfulness and individual rationality on every profile of `Fhat`.

    Each bidder's truthful utility is compared with their utility after deviating to
    every other support value, 0 and H. Tables only deviate to bids they list and skip
    profiles they do not list.

    Args:
        auction: Any auction read by `readAuction`.
        Fhat (ProductDistribution): The profiles to check.
        eps (float | None): Also check ε-coarseness on this step.
        budget (int): Largest admissible number of auction runs.

    Returns:
        dict: `clean`, the number of `checks`, and the witnesses of each violated property.

    Raises:
        BudgetError: If the checks exceed `budget`.
    """
    deviations = [_deviations(auction, Fhat, i) for i in range(Fhat.n)]
    checks = Fhat.profileCount() * (1 + sum(len(bids) for bids in deviations))

    if checks > budget:
        raise BudgetError(f'Error: Verification needs {checks} auction runs, over the budget of {budget}.')

    outcomes = {}

    def outcomeAt(profile: tuple):
        if profile not in outcomes:
            try:
                outcomes[profile] = auction.run(profile)
            except DistributionError:
                if not isinstance(auction, TabulatedAuction):
                    raise
                outcomes[profile] = None
        return outcomes[profile]

    truthfulness, rationality = [], []

    for profile, _ in Fhat.profiles(budget):
        outcome = outcomeAt(profile)
        if outcome is None:
            logger.debug('Profile %s is not tabulated; skipped', profile)
            continue

        for i, value in enumerate(profile):
            x, payment = outcome.allocation[i], outcome.payments[i]

            if payment < -properties.TOLERANCE or payment > x * value + properties.TOLERANCE or \
                    x == 0 and abs(payment) > properties.TOLERANCE:
                rationality.append({'profile': list(profile), 'bidder': i, 'allocation': x, 'payment': payment})

            truthful = _utility(outcome, i, value)
            for bid in deviations[i]:
                deviated = profile[:i] + (bid,) + profile[i + 1:]
                other = outcomeAt(deviated)

                if other is not None and _utility(other, i, value) > truthful + properties.TOLERANCE:
                    truthfulness.append({
                        'profile': list(profile),
                        'bidder': i,
                        'deviation': bid,
                        'truthfulUtility': truthful,
                        'deviatingUtility': _utility(other, i, value),
                    })

    report = {
        'checks': len(outcomes),
        'truthfulness': truthfulness,
        'individualRationality': rationality,
    }

    if eps is not None:
        report['coarseness'] = _coarsenessWitnesses(auction, EpsGrid(eps, _upperBound(auction)), outcomes)

    report['clean'] = not any(report[key] for key in ('truthfulness', 'individualRationality', 'coarseness')
                              if key in report)

    logger.info('Verified %d outcomes: %s', len(outcomes), 'clean' if report['clean'] else 'violations found')

    return report


@Command('verify', help='check an auction for truthfulness, IR and coarseness')
@UseConfig(RunConfig)
class VerifyCommand:
    """Prints CLEAN and exits 0, or prints the violations with their witnesses and exits 3."""

    @staticmethod
    def arguments(parser) -> None:
        parser.add_argument('--auction', help='auction JSON file')
        parser.add_argument('--dist', help='discrete distribution specification JSON file')
        parser.add_argument('--eps', type=float, help='also check ε-coarseness')

    def run(self) -> int:
        config = self.Config
        config.require('auction', 'dist')

        auction = readAuction(config.auction)
        sources, _ = readSources(config.dist)
        Fhat = discreteProduct(sources)

        if Fhat is None:
            raise DistributionError('Error: verify needs discrete distributions.')

        report = verifyAuction(auction, Fhat, config.eps)

        if report['clean']:
            print('CLEAN')
            return properties.EXIT_OK

        print(json.dumps(report, indent=2, sort_keys=True))
        return properties.EXIT_PROPERTY
