"""
This module assembles the `auctioneer` command line from the registered commands.
"""

from .Cli import CommandLine
from .EvalCommand import EvalCommand
from .LearnCommand import LearnCommand
from .ReproCommand import ReproCommand
from .RoundCommand import RoundCommand
from .VerifyCommand import VerifyCommand


@CommandLine('auctioneer', 'Learn approximately revenue-maximizing auctions from samples.')
class AuctioneerCli:
    pass


for command in (LearnCommand, EvalCommand, RoundCommand, VerifyCommand, ReproCommand):
    AuctioneerCli.addCommand(command)


def main(argv: list[str] | None = None) -> int:
    """Runs one command and returns its exit status."""
    return AuctioneerCli().runCommand(argv)
