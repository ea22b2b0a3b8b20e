"""
This module defines a decorator for injecting the run configuration into a command.

The `UseConfig` decorator gives a command class a `Config` attribute built from the
parsed flags, so `run()` reads `self.Config.eps` instead of the raw namespace.
"""

import argparse


def UseConfig(configClass: type):
    """
    Makes a command receive its configuration as `self.Config`.

    The decorated command is constructed with the parsed argparse namespace as its first
    argument; `configClass.fromNamespace` resolves it, configuration file included,
    before the command's own initializer runs.

    Args:
        configClass (type): The configuration type, providing `fromNamespace`.

    Returns:
        decorator: A class decorator setting `Config` and `ConfigClass`.
    """

    def decorator(cls):
        commandInit = cls.__init__

        def configuredInit(self, namespace: argparse.Namespace, *args, **kwargs):
            self.Config = configClass.fromNamespace(namespace)
            commandInit(self, *args, **kwargs)

        cls.__init__ = configuredInit
        cls.ConfigClass = configClass

        return cls

    return decorator
