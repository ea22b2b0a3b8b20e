"""
This module defines the `repro` command, which runs one regression fixture and prints PASS or FAIL.
"""

import json
import logging

from ..utils.errors import ConfigError
from . import properties
from .Command import Command
from .Fixtures import FixtureResult, iidPerProfileFixture, roundDownLossFixture, tightFixture, triangleFixture
from .RunConfig import RunConfig
from .UseConfig import UseConfig

logger = logging.getLogger(__name__)


def runFixture(name: str, eps: float | None = None, seed: int | None = None,
               trials: int | None = None) -> FixtureResult:
    """
    Runs the fixture called `name`.

    Args:
        name (str): One of `properties.FIXTURES`.
        eps (float | None): The step; fixtures default to `properties.FIXTURE_EPS`.
        seed (int | None): Required by `properties.SEEDED_FIXTURES`.
        trials (int | None): Profiles or checks of the seeded fixtures.

    Raises:
        ConfigError: On an unknown fixture or a missing seed.
    """
    if name not in properties.FIXTURES:
        raise ConfigError(f"Error: Unknown fixture {name!r}; expected one of {', '.join(properties.FIXTURES)}.")
    if name in properties.SEEDED_FIXTURES and seed is None:
        raise ConfigError(f'Error: The {name} fixture needs --seed.')

    eps = properties.FIXTURE_EPS if eps is None else eps

    if name == 'triangle':
        return triangleFixture(eps)
    if name == 'tight':
        return tightFixture(eps)
    if name == 'round-down-loss':
        return roundDownLossFixture(seed, eps, trials or properties.ROUND_DOWN_SAMPLES)
    return iidPerProfileFixture(seed, trials or properties.PERPROFILE_CHECKS)


@Command('repro', help='run a regression fixture')
@UseConfig(RunConfig)
class ReproCommand:

    @staticmethod
    def arguments(parser) -> None:
        parser.add_argument('fixture', nargs='?', choices=properties.FIXTURES)
        parser.add_argument('--eps', type=float)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--trials', type=int, help='profiles or checks of the seeded fixtures')

    def run(self) -> int:
        config = self.Config
        config.require('fixture')

        result = runFixture(config.fixture, config.eps, config.seed, config.trials)

        if self.trail is not None:
            self.trail.record('fixture', name=result.name, passed=result.passed)

        document = result.toDict()
        print(json.dumps(document, indent=2, sort_keys=True))
        print(document['result'])

        return properties.EXIT_OK if result.passed else properties.EXIT_PROPERTY
