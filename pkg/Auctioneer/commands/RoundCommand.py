"""
This module defines the `round` command: ε-round a serialized single-item auction against
an empirical sample file.
"""

import logging

from ..modules.Distribution import EpsGrid
from ..modules.Learn import empiricalProduct
from ..modules.Myerson import SingleItemAuction
from ..modules.Revenue import exactRevenueSingleItem
from ..modules.Rounding import applyRule, drawRandomizedRule, greedyRound, isCoarse, roundDownBaseline
from ..modules.Simple import encodeSimple
from ..utils.errors import ConfigError, FileFormatError
from ..utils.files import CsvFile
from . import properties
from .Artifacts import readAuction, writeAuction, writeReport
from .Command import Command
from .RunConfig import RunConfig
from .UseConfig import UseConfig

logger = logging.getLogger(__name__)


def roundAuction(auction: SingleItemAuction, Fhat, grid: EpsGrid, method: str, seed: int | None = None):
    """
    Rounds `auction` with one of `properties.ROUND_METHODS`.

    Returns:
        SingleItemAuction: The rounded auction.
    """
    if method == 'greedy':
        return greedyRound(auction, Fhat, grid)

    if method == 'randomized':
        if seed is None:
            raise ConfigError('Error: Randomized rounding needs --seed.')
        return applyRule(auction, drawRandomizedRule(Fhat, grid, seed))

    if method == 'round-down':
        return roundDownBaseline(auction, grid)

    raise ConfigError(f"Error: Unknown rounding method {method!r}; expected one of {', '.join(properties.ROUND_METHODS)}.")


@Command('round', help='round a single-item auction onto an ε-grid')
@UseConfig(RunConfig)
class RoundCommand:

    @staticmethod
    def arguments(parser) -> None:
        parser.add_argument('--auction', help='single-item auction JSON file')
        parser.add_argument('--samples', help='CSV of samples defining the empirical distribution')
        parser.add_argument('--eps', type=float)
        parser.add_argument('--method', choices=properties.ROUND_METHODS)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--out', help='output directory')

    def run(self) -> int:
        config = self.Config
        config.require('auction', 'samples', 'eps')

        auction = readAuction(config.auction)
        if not isinstance(auction, SingleItemAuction):
            raise FileFormatError(f"Error: '{config.auction}' is not a single-item auction.")

        grid = EpsGrid(config.eps, auction.H)
        Fhat = empiricalProduct(CsvFile(config.samples).readSamples(), auction.H)

        if Fhat.n != auction.n:
            raise FileFormatError(f'Error: The samples have {Fhat.n} bidders but the auction has {auction.n}.')

        rounded = roundAuction(auction, Fhat, grid, config.method, config.seed)
        before = exactRevenueSingleItem(auction, Fhat)
        after = exactRevenueSingleItem(rounded, Fhat)

        if self.trail is not None:
            self.trail.record('rounding', method=config.method, revenueBefore=before, revenueAfter=after)

        writeAuction(rounded, config.out)
        report = {
            'method': config.method,
            'parameters': {'eps': config.eps, 'H': auction.H, 'n': auction.n, 'seed': config.seed},
            'revenueBefore': before,
            'revenueAfter': after,
            'coarse': isCoarse(rounded, grid),
        }

        if report['coarse']:
            sequence = encodeSimple(rounded, grid)
            report['simple'] = sequence.toDict()
            report['simpleText'] = sequence.toText()

        writeReport(report, config.out)
        print(f'{config.method}: revenue {before:.6g} -> {after:.6g} on the empirical distribution')

        return properties.EXIT_OK
