"""
This module defines a decorator used to turn a class into a command-line subcommand.

The `Command` decorator assigns the subcommand name and help text to a class. The name
can be accessed through the `name` attribute of an instance and the `commandName`
class-level attribute, which the `CommandLine` registry uses as its key.
"""


def Command(name: str, help: str = ''):
    """
    A decorator that adds a `name` attribute and a subcommand contract to a class.

    The decorated class must provide `arguments(parser)`, a static method adding its
    flags to an argparse parser, and `run()`, returning the exit status.

    Args:
        name (str): The subcommand name.
        help (str): One line shown by `--help`.

    Returns:
        decorator: A class decorator that adds the following to the decorated class:
            - `name` attribute: The subcommand name as an instance attribute
            - `commandName` attribute: The subcommand name as a class attribute
            - `commandHelp` attribute: The help line
            - `trail` attribute: The audit trail the command records into, set by the registry
    """

    def decorator(cls):
        """
        Decorates a class to add the subcommand name.

        Args:
            cls: The class to decorate.

        Returns:
            cls: The decorated class.
        """
        for method in ('arguments', 'run'):
            if not callable(getattr(cls, method, None)):
                raise TypeError(f'The class {cls.__name__} must have a {method}() method')

        originalInit = cls.__init__

        def newInit(self, *args, **kwargs):
            self.name = name
            originalInit(self, *args, **kwargs)

        cls.__init__ = newInit
        cls.commandName = name
        cls.commandHelp = help
        cls.trail = None

        return cls

    return decorator
