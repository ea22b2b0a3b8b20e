"""
This module defines the `eval` command: the expected revenue of an auction file under a
distribution specification.
"""

import json
import logging
import os

from ..modules.Iid import ReserveIronedAuction
from ..modules.Myerson import SingleItemAuction
from ..modules.Revenue import bruteForceRevenue, exactRevenueSingleItem, monteCarloRevenue
from ..modules.Simple import SimpleAuctionSequence
from ..utils.errors import BudgetError, ConfigError, DistributionError
from ..utils.files import JsonFile
from ..utils.version import VERSION
from . import properties
from .Artifacts import discreteProduct, readAuction, readSources
from .Command import Command
from .RunConfig import RunConfig
from .UseConfig import UseConfig

logger = logging.getLogger(__name__)


def _exactRevenue(auction, Fhat) -> float:
    if isinstance(auction, SingleItemAuction):
        return exactRevenueSingleItem(auction, Fhat)
    if isinstance(auction, SimpleAuctionSequence):
        return exactRevenueSingleItem(auction.toAuction(), Fhat)
    if isinstance(auction, ReserveIronedAuction) and len(set(Fhat.factors)) == 1:
        return auction.revenue(Fhat.factors[0], Fhat.n)
    return bruteForceRevenue(auction, Fhat)


def evaluateRevenue(auction, sources: list, mc: bool = False, trials: int = properties.MC_TRIALS,
                    seed: int | None = None) -> dict:
    """
    Computes or estimates Rev(auction) under independent bidder sources.

    Discrete sources are evaluated exactly. Continuous sources, and discrete ones too
    large to enumerate when `mc` is set, are estimated by Monte Carlo.

    Args:
        auction: Any auction read by `readAuction`.
        sources (list[SampleSource]): One source per bidder.
        mc (bool): Fall back to Monte Carlo when exact evaluation exceeds its budget.
        trials (int): Monte Carlo profiles.
        seed (int | None): Monte Carlo seed; required on that path.

    Returns:
        dict: `revenue` and `mode`, plus `stderr` and `trials` for Monte Carlo.

    Raises:
        BudgetError: If exact evaluation is too large and `mc` is not set.
    """
    n = getattr(auction, 'n', len(sources))
    if n != len(sources):
        raise DistributionError(f'Error: The auction has {n} bidders but the specification lists {len(sources)}.')

    Fhat = discreteProduct(sources)

    if Fhat is not None:
        try:
            return {'revenue': _exactRevenue(auction, Fhat), 'mode': 'exact'}
        except BudgetError:
            if not mc:
                raise
            logger.info('Exact evaluation exceeds its budget; using Monte Carlo')

    if seed is None:
        raise ConfigError('Error: Monte Carlo evaluation needs --seed.')

    estimate, stderr = monteCarloRevenue(auction, sources, trials, seed)
    return {'revenue': estimate, 'mode': 'monte-carlo', 'stderr': stderr, 'trials': trials}


@Command('eval', help='compute the expected revenue of an auction')
@UseConfig(RunConfig)
class EvalCommand:

    @staticmethod
    def arguments(parser) -> None:
        parser.add_argument('--auction', help='auction JSON file')
        parser.add_argument('--dist', help='distribution specification JSON file')
        parser.add_argument('--mc', action='store_true', default=None, help='allow Monte Carlo for large instances')
        parser.add_argument('--trials', type=int)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--out', help='also write the result into this directory')

    def run(self) -> int:
        config = self.Config
        config.require('auction', 'dist')

        auction = readAuction(config.auction)
        sources, _ = readSources(config.dist)
        result = evaluateRevenue(auction, sources, bool(config.mc), config.trials or properties.MC_TRIALS, config.seed)
        result.update(version=VERSION, auction=config.auction, dist=config.dist, seed=config.seed)

        print(json.dumps(result, indent=2, sort_keys=True))

        if config.out != '.':
            os.makedirs(config.out, exist_ok=True)
            JsonFile(os.path.join(config.out, 'revenue.json')).writeJson(result)

        return properties.EXIT_OK
