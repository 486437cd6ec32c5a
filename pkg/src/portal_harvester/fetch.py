"""Fetcher capability: one interface, three implementations.

The harvester only ever sees ``execute(FetchRequest) -> FetchResponse``.
Live HTTP, fixture replay, and an always-failing stub plug in behind it,
which is what makes the whole pipeline verifiable offline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol
from urllib.parse import urlsplit

import requests

MAX_REDIRECTS = 5


class TransportError(Exception):
    """Network-level failure: DNS, refused connection, timeout, bad redirect."""


@dataclass(frozen=True)
class FetchRequest:
    url: str
    method: str = "get"
    form_params: tuple[tuple[str, str], ...] = ()
    headers: tuple[tuple[str, str], ...] = ()

    @property
    def host(self) -> str:
        return urlsplit(self.url).netloc.lower()


@dataclass(frozen=True)
class FetchResponse:
    status: int
    content_type: str
    body: bytes
    final_url: str

    @property
    def charset(self) -> str | None:
        for part in self.content_type.split(";")[1:]:
            key, _, value = part.strip().partition("=")
            if key.lower() == "charset" and value:
                return value.strip('"')
        return None


class Fetcher(Protocol):
    def execute(self, request: FetchRequest) -> FetchResponse: ...


def same_site(host_a: str, host_b: str) -> bool:
    """Equal hosts, or one a subdomain of the other."""
    a, b = host_a.lower().split(":")[0], host_b.lower().split(":")[0]
    return a == b or a.endswith("." + b) or b.endswith("." + a)


class HttpFetcher:
    """Live client.  Redirects are followed manually, capped, and must
    stay on the origin host or one of its subdomains."""

    def __init__(self, user_agent: str, timeout_ms: int = 10000):
        self.user_agent = user_agent
        self.timeout = timeout_ms / 1000.0
        self.session = requests.Session()

    def execute(self, request: FetchRequest) -> FetchResponse:
        url = request.url
        origin_host = request.host
        headers = dict(request.headers)
        headers.setdefault("User-Agent", self.user_agent)
        try:
            for _ in range(MAX_REDIRECTS + 1):
                if request.method == "post" and url == request.url:
                    response = self.session.post(
                        url, data=list(request.form_params), headers=headers,
                        timeout=self.timeout, allow_redirects=False)
                else:
                    response = self.session.get(
                        url, headers=headers, timeout=self.timeout,
                        allow_redirects=False)
                if response.status_code in (301, 302, 303, 307, 308):
                    location = response.headers.get("Location")
                    if not location:
                        raise TransportError(f"redirect without Location from {url}")
                    next_url = requests.compat.urljoin(url, location)
                    if not same_site(urlsplit(next_url).netloc, origin_host):
                        raise TransportError(
                            f"redirect leaves site: {url} -> {next_url}")
                    url = next_url
                    continue
                return FetchResponse(
                    status=response.status_code,
                    content_type=response.headers.get("Content-Type", ""),
                    body=response.content,
                    final_url=url,
                )
            raise TransportError(f"too many redirects starting at {request.url}")
        except requests.RequestException as exc:
            raise TransportError(str(exc)) from exc


_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".txt": "text/plain; charset=utf-8",
}


class FixtureFetcher:
    """Replays responses from the fixture corpus; never touches the network.

    ``mapping.json`` beside the corpus maps request URL -> fixture path
    (relative to the corpus root).  Unknown URLs are a transport error
    (strict mode), so any unexpected request surfaces immediately.
    """

    def __init__(self, corpus_dir: str | Path,
                 mapping: dict[str, str] | None = None):
        self.corpus_dir = Path(corpus_dir)
        if mapping is None:
            mapping_path = self.corpus_dir / "mapping.json"
            mapping = json.loads(mapping_path.read_text(encoding="utf-8")) \
                if mapping_path.exists() else {}
        self.mapping = dict(mapping)

    def execute(self, request: FetchRequest) -> FetchResponse:
        relative = self.mapping.get(request.url)
        if relative is None:
            raise TransportError(f"no fixture for {request.url}")
        fixture_path = self.corpus_dir / relative
        try:
            body = fixture_path.read_bytes()
        except OSError as exc:
            raise TransportError(f"fixture unreadable: {fixture_path}") from exc
        content_type = _CONTENT_TYPES.get(fixture_path.suffix, "application/octet-stream")
        return FetchResponse(status=200, content_type=content_type,
                             body=body, final_url=request.url)


class FailingFetcher:
    """Refuses everything; proves a code path performs no fetches."""

    def __init__(self, message: str = "network disabled"):
        self.message = message
        self.attempts = 0

    def execute(self, request: FetchRequest) -> FetchResponse:
        self.attempts += 1
        raise TransportError(self.message)


@dataclass
class CountingFetcher:
    """Wraps another fetcher and counts invocations (cache-hit assertions)."""

    inner: Fetcher
    calls: int = 0
    requests_seen: list[FetchRequest] = field(default_factory=list)

    def execute(self, request: FetchRequest) -> FetchResponse:
        self.calls += 1
        self.requests_seen.append(request)
        return self.inner.execute(request)
