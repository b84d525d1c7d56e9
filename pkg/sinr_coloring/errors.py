"""
Exception hierarchy shared by all modules.

LP statuses, instance-filter outcomes and schedule violations are returned as
data; exceptions are reserved for misuse and for exhausted resources.
"""

import time
from typing import Optional


class SinrColoringError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(SinrColoringError, ValueError):
    """An argument is malformed or refers to something that does not exist."""


class PreconditionError(SinrColoringError):
    """An operation was called outside its documented domain."""


class CapacityError(SinrColoringError):
    """The input exceeds a hard representational limit (e.g. > 128 links)."""


class EnumerationOverflow(SinrColoringError):
    """Feasible-matching enumeration produced more members than allowed."""

    def __init__(self, limit: int):
        super().__init__(f"more than {limit} feasible matchings")
        self.limit = limit


class BudgetExceeded(SinrColoringError):
    """A search or wall-clock budget ran out before an exact answer was found."""

    def __init__(self, what: str):
        super().__init__(f"budget exceeded: {what}")
        self.what = what


class FileFormatError(SinrColoringError):
    """A network, family, schedule or result file could not be parsed."""


class InvariantViolation(SinrColoringError):
    """An internal guarantee was broken; always a defect."""


class Deadline:
    """
    Wall-clock budget on the monotonic clock.

    ``Deadline(None)`` never expires, so callers can thread one through
    unconditionally.
    """

    __slots__ = ("seconds", "_expires_at")

    def __init__(self, seconds: Optional[float]):
        self.seconds = seconds
        self._expires_at = None if seconds is None else time.monotonic() + seconds

    def expired(self) -> bool:
        return self._expires_at is not None and time.monotonic() >= self._expires_at

    def check(self) -> None:
        if self.expired():
            raise BudgetExceeded(f"wall clock ({self.seconds:g} s)")


NO_DEADLINE = Deadline(None)
