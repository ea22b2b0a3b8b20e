"""
This module defines the exceptions raised across the Auctioneer package.

Every error derives from `AuctioneerError`, so callers (the CLI in particular) can
catch the whole family at once and map each subclass to an exit status.
"""


class AuctioneerError(Exception):
    """Base class of every error raised by the package."""


class DistributionError(AuctioneerError, ValueError):
    """Raised for invalid supports, probabilities or sample values."""


class GridError(AuctioneerError, ValueError):
    """Raised when a value or interval index falls outside an ε-grid."""


class CoarsenessError(AuctioneerError, ValueError):
    """Raised when an operation requires an ε-coarse auction and gets another."""


class MonotonicityError(AuctioneerError):
    """Raised when an allocation rule is not monotone in a bidder's own bid."""


class BudgetError(AuctioneerError):
    """Raised when an exhaustive computation exceeds its size budget."""


class InsufficientSamplesError(AuctioneerError):
    """
    Raised when a pipeline receives fewer samples than its guarantee requires.

    Attributes:
        required (int): The number of samples the guarantee needs.
        given (int): The number of samples that were supplied.
    """

    def __init__(self, required: int, given: int, what: str = 'samples per bidder') -> None:
        self.required = required
        self.given = given
        super().__init__(f'Error: {given} {what} given, {required} required.')


class FileFormatError(AuctioneerError, ValueError):
    """Raised for unreadable or malformed input files."""


class ConfigError(AuctioneerError, ValueError):
    """Raised for invalid command-line flags or configuration files."""
