"""Injectable clock so TTL and rate-limit behavior is deterministic in tests."""

from __future__ import annotations

import time
from datetime import datetime, timedelta, timezone
from typing import Protocol


class Clock(Protocol):
    def now(self) -> datetime: ...
    def sleep_ms(self, milliseconds: float) -> None: ...


class SystemClock:
    def now(self) -> datetime:
        return datetime.now(timezone.utc)

    def sleep_ms(self, milliseconds: float) -> None:
        if milliseconds > 0:
            time.sleep(milliseconds / 1000.0)


class FakeClock:
    """Manual clock: sleeping advances simulated time instantly."""

    def __init__(self, start: datetime | None = None):
        self.current = start or datetime(2020, 1, 1, tzinfo=timezone.utc)

    def now(self) -> datetime:
        return self.current

    def sleep_ms(self, milliseconds: float) -> None:
        self.advance_ms(milliseconds)

    def advance_ms(self, milliseconds: float) -> None:
        if milliseconds > 0:
            self.current += timedelta(milliseconds=milliseconds)

    def advance(self, **kwargs) -> None:
        self.current += timedelta(**kwargs)
