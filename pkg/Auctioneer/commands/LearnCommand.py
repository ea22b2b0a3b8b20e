"""
This module defines the `learn` command: samples in, auction and report out.
"""

import logging

from ..modules.Environment import Knapsack
from ..modules.Iid import learnIid
from ..modules.Learn import learnApproxSingleParameter, learnSingleItem, learnSingleParameter
from ..utils.errors import ConfigError
from ..utils.files import CsvFile
from . import properties
from .Artifacts import readEnvironment, writeAuction, writeReport
from .Command import Command
from .RunConfig import RunConfig
from .UseConfig import UseConfig

logger = logging.getLogger(__name__)


@Command('learn', help='learn an auction from a sample table')
@UseConfig(RunConfig)
class LearnCommand:
    """
    Runs one of the learning pipelines and writes the auction and its report into `--out`.

    `--env single-item` runs the simple-auction pipeline, `--env iid` pools every column
    as samples of a common distribution for `--n` bidders, and any other value is read
    as an environment file for the single-parameter pipeline.
    """

    @staticmethod
    def arguments(parser) -> None:
        parser.add_argument('--env', help="'single-item', 'iid' or an environment JSON file")
        parser.add_argument('--eps', type=float)
        parser.add_argument('--delta', type=float)
        parser.add_argument('--samples', help='CSV with header bidder_1..bidder_n')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--H', type=float)
        parser.add_argument('--n', type=int, help='bidders of the iid pipeline')
        parser.add_argument('--out', help='output directory')
        parser.add_argument('--approx', action='store_true', default=None, help='use the approximate maximizer')
        parser.add_argument('--t', type=int, help='prefix length of the single-parameter pipeline')
        parser.add_argument('--sample-cap', dest='sampleCap', type=int)
        parser.add_argument('--extra-sample-cap', dest='extraSampleCap', type=int)
        parser.add_argument('--rule-cap', dest='ruleCap', type=int)
        parser.add_argument('--profile-cap', dest='profileCap', type=int)

    def run(self) -> int:
        config = self.Config
        config.require('env', 'eps', 'delta', 'samples', 'seed')
        columns = CsvFile(config.samples).readSamples()

        if config.env == 'single-item':
            auction, report = learnSingleItem(columns, config.H, config.eps, config.delta,
                                              sampleCap=config.sampleCap, trail=self.trail)
        elif config.env == 'iid':
            config.require('n')
            pooled = [value for column in columns for value in column]
            auction, report = learnIid(pooled, config.n, config.H, config.eps, config.delta,
                                       sampleCap=config.sampleCap, trail=self.trail)
        else:
            env = readEnvironment(config.env)
            options = dict(t=config.t, sampleCap=config.sampleCap, extraSampleCap=config.extraSampleCap,
                           ruleCap=config.ruleCap, profileCap=config.profileCap, seed=config.seed, trail=self.trail)

            if config.approx:
                if not isinstance(env, Knapsack):
                    raise ConfigError(f'Error: --approx needs a knapsack environment, got {env.kind}.')
                auction, report = learnApproxSingleParameter(columns, env, config.H, config.eps, config.delta,
                                                             **options)
            else:
                auction, report = learnSingleParameter(columns, env, config.H, config.eps, config.delta, **options)

        document = report.toDict()
        document['seed'] = config.seed
        writeAuction(auction, config.out)
        writeReport(document, config.out)

        print(f"{report.kind}: revenue {report.empiricalRevenue:.6g} on the empirical distribution "
              f"(optimum {report.optimumRevenue:.6g})")
        for caveat in report.caveats:
            print(f'caveat: {caveat}')

        return properties.EXIT_OK
