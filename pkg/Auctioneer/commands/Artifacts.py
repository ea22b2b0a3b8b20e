"""
This module reads and writes the files the commands exchange: auctions, distribution
specifications, environments and reports.
"""

import logging
import os

from ..modules.Distribution import DiscreteSource, SampleSource, sourceFromDict
from ..modules.Environment import Environment, SPAuction, environmentFromDict
from ..modules.Iid import ReserveIronedAuction
from ..modules.Myerson import Outcome, SingleItemAuction, checkBids
from ..modules.Revenue import PROFILE_BUDGET, ProductDistribution
from ..modules.Simple import SimpleAuctionSequence
from ..utils.errors import AuctioneerError, DistributionError, FileFormatError
from ..utils.files import GenericFile, JsonFile
from . import properties

logger = logging.getLogger(__name__)


class TabulatedAuction:
    """
    An auction given by its outcome on each profile of a finite table.

    Tables make any mechanism checkable, including hand-edited ones whose payments
    no allocation rule produces.

    Attributes:
        H (float): Upper bound of the bids.
        n (int): Number of bidders.
        rows (dict[tuple, Outcome]): The outcome of each tabulated profile.
    """

    def __init__(self, H: float, n: int, rows: dict) -> None:
        self.H = float(H)
        self.n = int(n)
        self.rows = {tuple(float(b) for b in bids): outcome for bids, outcome in rows.items()}

    def bidsOf(self, i: int) -> list[float]:
        """The bids of bidder i appearing in the table."""
        return sorted({bids[i] for bids in self.rows})

    def run(self, bids) -> Outcome:
        bids = checkBids(bids, self.n, self.H)

        if bids not in self.rows:
            raise DistributionError(f'Error: Profile {bids} is not in the table.')

        return self.rows[bids]

    @classmethod
    def tabulate(cls, auction, Fhat: ProductDistribution, budget: int = PROFILE_BUDGET) -> 'TabulatedAuction':
        """Records the outcome of `auction` on every profile of `Fhat`."""
        rows = {profile: auction.run(profile) for profile, _ in Fhat.profiles(budget)}
        return cls(Fhat.H, Fhat.n, rows)

    def toDict(self) -> dict:
        return {
            'type': 'table',
            'H': self.H,
            'n': self.n,
            'rows': [
                {'bids': list(bids), 'allocation': list(outcome.allocation), 'payments': list(outcome.payments)}
                for bids, outcome in sorted(self.rows.items())
            ],
        }

    @classmethod
    def fromDict(cls, data: dict) -> 'TabulatedAuction':
        rows = {
            tuple(row['bids']): Outcome(tuple(map(float, row['allocation'])), tuple(map(float, row['payments'])))
            for row in data['rows']
        }
        return cls(data['H'], data['n'], rows)


AUCTION_TYPES = {
    'table': TabulatedAuction,
    'single-item': SingleItemAuction,
    'simple': SimpleAuctionSequence,
    'single-parameter': SPAuction,
    'reserve-ironed': ReserveIronedAuction,
}
"""Serialized auction types and the classes that read them."""


def _decode(what: str, path: str, build, data):
    try:
        return build(data)
    except AuctioneerError:
        raise
    except (KeyError, TypeError, ValueError) as e:
        raise FileFormatError(f"Error: '{path}' is not a valid {what} ({type(e).__name__}: {e}).") from e


def auctionFromDict(data: dict, path: str = '<dict>'):
    """
    Builds an auction from its serialized form.

    Args:
        data (dict): A document with a `type` key naming one of `AUCTION_TYPES`.
        path (str): Where the document came from, for messages.

    Returns:
        An auction exposing `run(bids)`.
    """
    kind = data.get('type') if isinstance(data, dict) else None

    if kind not in AUCTION_TYPES:
        raise FileFormatError(f"Error: '{path}' has unknown auction type {kind!r}.")

    return _decode(f'{kind} auction', path, AUCTION_TYPES[kind].fromDict, data)


def auctionFromText(text: str, path: str = '<text>'):
    """
    Parses the text form of a simple auction or a reserve-ironed auction.

    A header of three numbers `n H eps` marks a simple auction; a header `p H`, optionally
    followed by `closed`, marks a reserve-ironed one.
    """
    header = next((line.split() for line in text.splitlines() if line.strip()), [])

    if len(header) == 3 and header[2] != 'closed':
        return SimpleAuctionSequence.fromText(text)
    if len(header) in (2, 3):
        return ReserveIronedAuction.fromText(text)

    raise FileFormatError(f"Error: '{path}' has no recognizable auction header.")


def readAuction(path: str):
    """Reads an auction from JSON, or from its text form when the file is not `.json`."""
    if path.endswith('.json'):
        return auctionFromDict(JsonFile(path).readJson(), path)

    return auctionFromText(GenericFile(path).readFile(), path)


def readSources(path: str) -> tuple[list[SampleSource], float]:
    """
    Reads a distribution specification: `{"H": ..., "bidders": [{"kind": ...}, ...]}`.

    Returns:
        tuple[list[SampleSource], float]: One source per bidder and H.
    """
    data = JsonFile(path).readJson()

    def build(data: dict) -> tuple[list[SampleSource], float]:
        H = float(data['H'])
        return [sourceFromDict(entry, H) for entry in data['bidders']], H

    return _decode('distribution specification', path, build, data)


def discreteProduct(sources: list[SampleSource]) -> ProductDistribution | None:
    """The product of the sources when all are discrete, else None."""
    if not all(isinstance(source, DiscreteSource) for source in sources):
        return None
    return ProductDistribution([source.distribution for source in sources])


def readEnvironment(path: str) -> Environment:
    return _decode('environment', path, environmentFromDict, JsonFile(path).readJson())


def writeAuction(auction, out: str) -> list[str]:
    """
    Writes an auction into directory `out`, plus its text form when it has one.

    Returns:
        list[str]: The written paths.
    """
    os.makedirs(out, exist_ok=True)
    written = [os.path.join(out, properties.AUCTION_FILE)]
    JsonFile(written[0]).writeJson(auction.toDict())

    if hasattr(auction, 'toText'):
        written.append(os.path.join(out, properties.AUCTION_TEXT_FILE))
        GenericFile(written[1]).writeFile(auction.toText())

    logger.info('Wrote %s', ', '.join(written))
    return written


def writeReport(report: dict, out: str) -> str:
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, properties.REPORT_FILE)
    JsonFile(path).writeJson(report)
    return path
