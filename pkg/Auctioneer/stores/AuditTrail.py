"""
AuditTrail module provides a subscribeable record of the intermediate results of a pipeline.
Pipelines append entries (revenues, sample counts, caveats) as they go, and any number of
subscribers are notified of each new entry; the CLI subscribes a logging callback.
"""

import logging
from typing import Any, Callable, List

logger = logging.getLogger(__name__)


class AuditTrail:
    """
    An append-only list of stage entries that notifies subscribers on every append.

    Attributes:
        _entries (List[dict]): The recorded entries, oldest first.
        _callbacks (List[Callable]): Functions called with each new entry.
    """

    def __init__(self) -> None:
        self._entries: List[dict] = []
        self._callbacks: List[Callable[[dict], None]] = []

    def subscribe(self, callback: Callable[[dict], None]) -> None:
        """
        Subscribe a callback function to be called with every new entry.

        Args:
            callback (Callable[[dict], None]): The function to call; it receives the entry.
        """
        if callback not in self._callbacks:
            self._callbacks.append(callback)

    def unsubscribe(self, callback: Callable[[dict], None]) -> None:
        if callback in self._callbacks:
            self._callbacks.remove(callback)

    def record(self, stage: str, **values: Any) -> dict:
        """
        Append an entry and notify the subscribers.

        Args:
            stage (str): Name of the pipeline stage.
            **values: The quantities measured at that stage.

        Returns:
            dict: The recorded entry.
        """
        entry = {'stage': stage, **values}
        self._entries.append(entry)
        self._notifySubscribers(entry)
        return entry

    def caveat(self, message: str) -> dict:
        """Records a condition under which the stated guarantee does not fully apply."""
        return self.record('caveat', message=message)

    @property
    def value(self) -> dict | None:
        """The latest entry, if any."""
        return self._entries[-1] if self._entries else None

    @property
    def entries(self) -> List[dict]:
        return [dict(entry) for entry in self._entries]

    @property
    def caveats(self) -> List[str]:
        return [entry['message'] for entry in self._entries if entry['stage'] == 'caveat']

    def find(self, stage: str) -> dict | None:
        """The latest entry of a stage."""
        for entry in reversed(self._entries):
            if entry['stage'] == stage:
                return dict(entry)
        return None

    def _notifySubscribers(self, entry: dict) -> None:
        for callback in self._callbacks:
            try:
                callback(entry)
            except Exception:
                logger.exception('Error in audit trail subscriber callback')


def logEntry(entry: dict) -> None:
    """Subscriber that logs each entry at INFO."""
    details = ', '.join(f'{key}={value}' for key, value in entry.items() if key != 'stage')
    logger.info('[%s] %s', entry['stage'], details)
