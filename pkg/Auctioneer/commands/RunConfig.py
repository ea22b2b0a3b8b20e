"""
This module defines the configuration of one command-line run.

Flags and an optional JSON configuration file both fill a `RunConfig`; explicit flags
override the file. File keys mirror the flags, written either as on the command line
(`sample-cap`) or as the attribute (`sampleCap`).
"""

import argparse
import logging
import re
from dataclasses import dataclass, fields

from ..utils.errors import ConfigError
from ..utils.files import JsonFile

logger = logging.getLogger(__name__)


@dataclass
class RunConfig:
    """
    The parameters of a command.

    Attributes:
        command (str | None): The subcommand.
        H (float): Upper bound of all values.
        n (int | None): Number of bidders, where it is not implied by the input.
        eps (float | None): Accuracy ε.
        delta (float | None): Failure probability δ.
        env (str | None): A named pipeline or the path of an environment file.
        samples (str | None): Path of the sample table.
        seed (int | None): Seed of every random draw.
        out (str): Output directory.
        auction (str | None): Path of an auction file.
        dist (str | None): Path of a distribution specification.
        method (str): Rounding method of `round`.
        fixture (str | None): Fixture of `repro`.
        approx (bool): Use the environment's approximate maximizer.
        mc (bool): Allow Monte Carlo when exact evaluation is too large.
        trials (int | None): Monte Carlo profiles or fixture checks.
        t (int | None): Prefix length overriding the formula.
        sampleCap (int | None): Bound on the required samples per bidder.
        extraSampleCap (int | None): Bound on the required extra sample profiles.
        ruleCap (int | None): Bound on the number of drawn rounding rules.
        profileCap (int | None): Bound on the number of drawn profiles.
        config (str | None): Path of the JSON configuration file.
        verbose (bool): Log at DEBUG.
    """

    command: str | None = None
    H: float = 1.0
    n: int | None = None
    eps: float | None = None
    delta: float | None = None
    env: str | None = None
    samples: str | None = None
    seed: int | None = None
    out: str = '.'
    auction: str | None = None
    dist: str | None = None
    method: str = 'greedy'
    fixture: str | None = None
    approx: bool = False
    mc: bool = False
    trials: int | None = None
    t: int | None = None
    sampleCap: int | None = None
    extraSampleCap: int | None = None
    ruleCap: int | None = None
    profileCap: int | None = None
    config: str | None = None
    verbose: bool = False

    def __post_init__(self) -> None:
        for name in ('eps', 'delta'):
            value = getattr(self, name)
            if value is not None and not 0 < value <= 1:
                raise ConfigError(f'Error: --{name} must lie in (0, 1], got {value}.')

        if not self.H > 0:
            raise ConfigError(f'Error: --H must be positive, got {self.H}.')

        for name in ('n', 'trials', 't', 'sampleCap', 'extraSampleCap', 'ruleCap', 'profileCap'):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise ConfigError(f'Error: --{_flagName(name)} must be at least 1, got {value}.')

    def require(self, *names: str) -> None:
        """
        Checks that the command got every parameter it needs.

        Raises:
            ConfigError: Naming the first missing flag.
        """
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f'Error: {self.command} needs --{_flagName(name)}.')

    @classmethod
    def fromNamespace(cls, namespace: argparse.Namespace) -> 'RunConfig':
        """
        Builds the configuration from parsed flags, reading `--config` first when given.

        Args:
            namespace (argparse.Namespace): Parsed flags; unset flags are None.

        Returns:
            RunConfig: The merged configuration.
        """
        known = {field.name for field in fields(cls)}
        values = {}

        path = getattr(namespace, 'config', None)
        if path is not None:
            for key, value in JsonFile(path).readJson().items():
                name = _attributeName(key)
                if name not in known:
                    raise ConfigError(f"Error: Unknown key '{key}' in '{path}'.")
                values[name] = value
            logger.debug('Read %d keys from %s', len(values), path)

        for name, value in vars(namespace).items():
            if name in known and value is not None:
                values[name] = value

        return cls(**values)


def _attributeName(key: str) -> str:
    """`sample-cap` → `sampleCap`."""
    return re.sub(r'-(\w)', lambda match: match.group(1).upper(), key)


def _flagName(name: str) -> str:
    """`sampleCap` → `sample-cap`."""
    return re.sub(r'(?<=[a-z])([A-Z])', lambda match: '-' + match.group(1).lower(), name)
