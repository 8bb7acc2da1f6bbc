"""Injectable time source.

Every expiry decision and stored timestamp reads the clock through the
application config, so tests can drive time explicitly. Timestamps are
stored naive-UTC (SQLite has no zone) and serialized as ISO 8601 with an
explicit +00:00 offset.
"""

from __future__ import annotations

from datetime import datetime, timedelta, timezone
from typing import Callable

Clock = Callable[[], datetime]


def utc_now() -> datetime:
    """Default clock: current aware-UTC time."""
    return datetime.now(timezone.utc)


class ManualClock:
    """Clock that only moves when told to; for expiry tests and demos."""

    def __init__(self, start: datetime | None = None):
        self._now = start or datetime(2024, 1, 1, tzinfo=timezone.utc)

    def __call__(self) -> datetime:
        return self._now

    def advance(self, seconds: float) -> None:
        self._now += timedelta(seconds=seconds)

    def set(self, now: datetime) -> None:
        if now.tzinfo is None:
            raise ValueError("ManualClock requires an aware datetime")
        self._now = now


def to_storage(dt: datetime) -> datetime:
    """Aware datetime -> naive UTC for database columns."""
    if dt.tzinfo is None:
        return dt
    return dt.astimezone(timezone.utc).replace(tzinfo=None)


def to_iso(dt: datetime) -> str:
    """Naive-UTC (or aware) datetime -> ISO 8601 string with offset."""
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.astimezone(timezone.utc).isoformat()
