"""
This module defines a decorator that turns a class into a command-line front end with
support for multiple subcommands.

The CommandLine decorator sets the program name and description. It keeps a registry of
command classes, builds an argparse parser with one subparser per command, configures
logging, runs the selected command and maps package errors to exit statuses.
"""

import argparse
import logging

from ..stores.AuditTrail import AuditTrail, logEntry
from ..utils.errors import (AuctioneerError, BudgetError, ConfigError, InsufficientSamplesError,
                            MonotonicityError)
from ..utils.version import VERSION
from . import properties

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


class ArgumentParser(argparse.ArgumentParser):
    """An argparse parser that raises `ConfigError` instead of exiting on bad flags."""

    def error(self, message: str):
        raise ConfigError(f'Error: {message}.')


def exitStatus(error: Exception) -> int:
    """The exit status for a package error."""
    if isinstance(error, (BudgetError, InsufficientSamplesError)):
        return properties.EXIT_PRECONDITION
    if isinstance(error, MonotonicityError):
        return properties.EXIT_PROPERTY
    return properties.EXIT_INPUT


def CommandLine(prog: str, description: str):
    """
    A decorator that adds command registration and dispatch to a class.

    Args:
        prog (str): The program name shown in usage lines.
        description (str): The description shown by `--help`.

    Returns:
        decorator: A class decorator that adds `addCommand`, `setCommand` and `runCommand`.
    """

    def decorator(cls):
        frontEndInit = cls.__init__

        def registryInit(self, *args, **kwargs):
            """Builds the parser for every registered command."""
            frontEndInit(self, *args, **kwargs)

            self.parser = ArgumentParser(prog=prog, description=description)
            self.parser.add_argument('--version', action='version', version=f'%(prog)s {VERSION}')
            self.subparsers = self.parser.add_subparsers(dest='command', required=True)
            self.trail = AuditTrail()
            self.trail.subscribe(logEntry)

            for command in cls.commands.values():
                self._addSubparser(command)

        cls.__init__ = registryInit

        def _addSubparser(self, command) -> None:
            subparser = self.subparsers.add_parser(command.commandName, help=command.commandHelp)
            subparser.add_argument('--config', help='JSON file supplying any flag; explicit flags win')
            subparser.add_argument('--verbose', action='store_true', default=None, help='log at DEBUG')
            command.arguments(subparser)

        @staticmethod
        def addCommand(command: type) -> type:
            """
            Registers a command class.

            Args:
                command (type): A class decorated with `Command`.

            Returns:
                type: The same class, so this can be used as a decorator.

            Raises:
                TypeError: If the class lacks the `commandName` attribute.
            """
            if not hasattr(command, 'commandName'):
                raise TypeError(f'{command} does not have name <commandName>.')

            cls.commands[command.commandName] = command
            return command

        def setCommand(self, name: str) -> type:
            """
            Selects the command class registered under `name`.

            Raises:
                ConfigError: If no such command exists.
            """
            if name not in self.commands:
                raise ConfigError(f'Error: The command does not exist {name}.')

            self.current = self.commands[name]
            return self.current

        def runCommand(self, argv: list[str] | None = None) -> int:
            """
            Parses `argv`, runs the selected command and returns its exit status.

            Args:
                argv (list[str] | None): The arguments; None reads the process arguments.

            Returns:
                int: 0 on success, 1 on malformed input, 2 on a failed precondition,
                    3 on a failed property.
            """
            try:
                namespace = self.parser.parse_args(argv)
                logging.basicConfig(level=logging.DEBUG if namespace.verbose else logging.INFO,
                                    format=LOG_FORMAT, force=True)

                command = self.setCommand(namespace.command)(namespace)
                command.trail = self.trail
                return command.run()
            except AuctioneerError as e:
                logger.error('%s', e)
                return exitStatus(e)

        cls.prog = prog
        cls.description = description
        cls._addSubparser = _addSubparser
        cls.addCommand = addCommand
        cls.setCommand = setCommand
        cls.runCommand = runCommand
        cls.commands = {}

        return cls

    return decorator
