"""Fetch policy: per-host spacing, concurrency caps, robots compliance.

Every outbound request goes through :func:`policy_gate` first.  The gate
answers Allow(delay) or Deny(reason); Deny is an ordinary value, not an
error.  The per-host ledger is the single synchronized mutable state.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from urllib.parse import urlsplit

from .robots import RobotsRuleset, robots_allows

DEFAULT_USER_AGENT = "portal-harvester/0.1 (+contact: set-me@example.org)"


@dataclass(frozen=True)
class FetchPolicy:
    min_interval_ms: int = 1000
    max_concurrent_per_host: int = 1
    user_agent: str = DEFAULT_USER_AGENT
    respect_robots: bool = True
    allowed_hosts: tuple[str, ...] | None = None
    timeout_ms: int = 10000

    @classmethod
    def from_dict(cls, config: dict) -> "FetchPolicy":
        allowed = config.get("allowed_hosts")
        return cls(
            min_interval_ms=int(config.get("min_interval_ms", 1000)),
            max_concurrent_per_host=int(config.get("max_concurrent_per_host", 1)),
            user_agent=config.get("user_agent", DEFAULT_USER_AGENT),
            respect_robots=bool(config.get("respect_robots", True)),
            allowed_hosts=tuple(allowed) if allowed is not None else None,
            timeout_ms=int(config.get("timeout_ms", 10000)),
        )


@dataclass(frozen=True)
class Allow:
    delay_ms: float = 0.0


@dataclass(frozen=True)
class Deny:
    reason: str


@dataclass
class _HostState:
    next_slot_ms: float | None = None   # earliest time the next emit may happen + interval bookkeeping
    in_flight: int = 0
    robots: RobotsRuleset | None = None


class HostLedger:
    """Linearizable per-host state behind the gate."""

    def __init__(self):
        self._lock = threading.Lock()
        self._hosts: dict[str, _HostState] = {}

    def _state(self, host: str) -> _HostState:
        return self._hosts.setdefault(host, _HostState())

    def set_robots(self, host: str, ruleset: RobotsRuleset | None) -> None:
        with self._lock:
            self._state(host.lower()).robots = ruleset

    def robots_for(self, host: str) -> RobotsRuleset | None:
        with self._lock:
            return self._state(host.lower()).robots

    def has_robots(self, host: str) -> bool:
        with self._lock:
            return self._hosts.get(host.lower(), _HostState()).robots is not None

    def gate(self, policy: FetchPolicy, url: str, now: datetime) -> Allow | Deny:
        parts = urlsplit(url)
        host = parts.netloc.lower()
        bare_host = host.split(":")[0]
        if policy.allowed_hosts is not None:
            allowed = {h.lower() for h in policy.allowed_hosts}
            if host not in allowed and bare_host not in allowed:
                return Deny("host-not-allowed")
        with self._lock:
            state = self._state(host)
            if policy.respect_robots and state.robots is not None:
                path = parts.path or "/"
                if parts.query:
                    path += "?" + parts.query
                if not robots_allows(state.robots, policy.user_agent, path):
                    return Deny("robots-disallowed")
            if state.in_flight >= policy.max_concurrent_per_host:
                return Deny("concurrency-limit")
            now_ms = now.timestamp() * 1000.0
            if state.next_slot_ms is None:
                delay = 0.0
            else:
                delay = max(0.0, state.next_slot_ms - now_ms)
            # reserve the emission slot: the request goes out at now + delay
            state.next_slot_ms = now_ms + delay + policy.min_interval_ms
            state.in_flight += 1
            return Allow(delay_ms=delay)

    def release(self, url: str) -> None:
        host = urlsplit(url).netloc.lower()
        with self._lock:
            state = self._state(host)
            if state.in_flight > 0:
                state.in_flight -= 1


def policy_gate(policy: FetchPolicy, ledger: HostLedger, url: str,
                now: datetime) -> Allow | Deny:
    return ledger.gate(policy, url, now)


def utc_now() -> datetime:
    return datetime.now(timezone.utc)
