"""Search orchestration: cache lookup, scrape on miss, store on success.

The flow has exactly three exits: a fresh-enough cache entry answers
without any fetch; a miss triggers a scrape and, given at least one
record, a persisted result; anything else is not-found.  Fetch failure
on every page is distinguished internally (so operators can tell portal
drift from an empty corpus) but surfaces as not-found with diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import timedelta

from .clock import Clock
from .extraction import (ArticleRecord, InvalidLinkError, MissingTitleError,
                         UnparseableDocument, extract_records, normalize_record)
from .fetch import Fetcher, FetchRequest, TransportError
from .navigation import FetchedPage, build_search_request, next_page_request
from .politeness import Allow, FetchPolicy, HostLedger
from .portals import PortalDescriptor, PortalRegistry, SearchQuery
from .robots import EMPTY_RULESET, parse_robots
from .store import DEFAULT_TTL, Store, normalize_keyword
from .templates import compile_template
from . import htmldoc

NOT_FOUND_MESSAGE = "data tidak ditemukan (no matching articles)"


@dataclass
class HarvestDiagnostics:
    pages_fetched: int = 0
    records_extracted: int = 0
    records_skipped: int = 0
    fetch_failures: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "pages_fetched": self.pages_fetched,
            "records_extracted": self.records_extracted,
            "records_skipped": self.records_skipped,
            "fetch_failures": [list(f) for f in self.fetch_failures],
        }


@dataclass(frozen=True)
class CacheHit:
    entry: object
    records: list[ArticleRecord]
    kind: str = "cache_hit"


@dataclass(frozen=True)
class Scraped:
    entry: object
    records: list[ArticleRecord]
    diagnostics: HarvestDiagnostics | None = None
    kind: str = "scraped"


@dataclass(frozen=True)
class NotFound:
    message: str
    diagnostics: HarvestDiagnostics | None = None
    kind: str = "not_found"


SearchOutcome = CacheHit | Scraped | NotFound


class AllFetchesFailedError(Exception):
    def __init__(self, diagnostics: HarvestDiagnostics):
        self.diagnostics = diagnostics
        super().__init__("every page fetch failed")


def dedupe_records(records: list[ArticleRecord]) -> list[ArticleRecord]:
    """Stable dedup on (portal_id, link); first occurrence wins."""
    seen: set[tuple[str, str]] = set()
    out = []
    for record in records:
        key = (record.portal_id, record.link)
        if key not in seen:
            seen.add(key)
            out.append(record)
    return out


def scrape_portal(portal: PortalDescriptor, query: SearchQuery,
                  fetcher: Fetcher, policy: FetchPolicy, clock: Clock,
                  ledger: HostLedger | None = None
                  ) -> tuple[list[ArticleRecord], HarvestDiagnostics]:
    ledger = ledger if ledger is not None else HostLedger()
    compiled = compile_template(portal.template)
    diagnostics = HarvestDiagnostics()
    records: list[ArticleRecord] = []

    if policy.respect_robots:
        _ensure_robots(portal, fetcher, policy, ledger, clock)

    rule = portal.pagination
    page_number = rule.start if rule.kind == "page-param" else 1
    request: FetchRequest | None = build_search_request(portal, query, page_number)
    pages_walked = 0

    while request is not None and pages_walked < query.max_pages \
            and pages_walked < rule.hard_cap:
        response = _gated_fetch(request, fetcher, policy, ledger, clock,
                                diagnostics)
        if response is None:
            break
        diagnostics.pages_fetched += 1
        pages_walked += 1
        try:
            extraction = extract_records(response.body, compiled,
                                         response.final_url,
                                         charset=response.charset)
        except UnparseableDocument as exc:
            diagnostics.fetch_failures.append((request.url, f"unparseable: {exc}"))
            break
        diagnostics.records_skipped += extraction.skipped
        page_records = []
        for raw in extraction.records:
            try:
                page_records.append(
                    normalize_record(raw, compiled, response.final_url,
                                     clock.now()))
            except (InvalidLinkError, MissingTitleError):
                diagnostics.records_skipped += 1
        diagnostics.records_extracted += len(page_records)
        records.extend(page_records)
        if not page_records:
            break
        if rule.kind == "page-param":
            request = next_page_request(
                portal,
                FetchedPage(root=htmldoc.Element("#document"),
                            base_url=response.final_url),
                page_number, query=query)
            page_number += rule.step
        elif rule.kind == "next-link":
            page = FetchedPage(root=htmldoc.parse_html(response.body,
                                                       response.charset),
                               base_url=response.final_url)
            request = next_page_request(portal, page, pages_walked)
        else:
            request = None

    if diagnostics.pages_fetched == 0 and diagnostics.fetch_failures:
        raise AllFetchesFailedError(diagnostics)
    return dedupe_records(records), diagnostics


def run_search(query: SearchQuery, registry: PortalRegistry, store: Store,
               fetcher: Fetcher, policy: FetchPolicy, clock: Clock,
               ledger: HostLedger | None = None,
               ttl: timedelta = DEFAULT_TTL) -> SearchOutcome:
    query.validate()
    portal = registry.get(query.portal_id)
    keyword = normalize_keyword(query.keyword)

    cached = store.lookup(portal.base_url, keyword, query.category,
                          now=clock.now(), ttl=ttl)
    if cached is not None:
        entry, records = cached
        return CacheHit(entry=entry, records=records)

    try:
        records, diagnostics = scrape_portal(portal, query, fetcher, policy,
                                             clock, ledger=ledger)
    except AllFetchesFailedError as exc:
        return NotFound(message=NOT_FOUND_MESSAGE, diagnostics=exc.diagnostics)

    if not records:
        return NotFound(message=NOT_FOUND_MESSAGE, diagnostics=diagnostics)

    entry = store.save(portal.base_url, keyword, query.category, records,
                       now=clock.now())
    return Scraped(entry=entry, records=records, diagnostics=diagnostics)


def _ensure_robots(portal, fetcher, policy, ledger, clock) -> None:
    from urllib.parse import urlsplit, urljoin
    host = urlsplit(portal.base_url).netloc.lower()
    if ledger.has_robots(host):
        return
    if policy.allowed_hosts is not None:
        allowed = {h.lower() for h in policy.allowed_hosts}
        if host not in allowed and host.split(":")[0] not in allowed:
            # never contact a host outside the allowlist, not even for robots
            ledger.set_robots(host, EMPTY_RULESET)
            return
    robots_url = urljoin(portal.base_url + "/", "/robots.txt")
    try:
        response = fetcher.execute(FetchRequest(url=robots_url))
        if response.status == 200:
            text = response.body.decode("utf-8", errors="replace")
            ledger.set_robots(host, parse_robots(text))
            return
    except TransportError:
        pass
    ledger.set_robots(host, EMPTY_RULESET)


def _gated_fetch(request, fetcher, policy, ledger, clock, diagnostics):
    decision = ledger.gate(policy, request.url, clock.now())
    if not isinstance(decision, Allow):
        diagnostics.fetch_failures.append((request.url, f"denied: {decision.reason}"))
        return None
    clock.sleep_ms(decision.delay_ms)
    try:
        response = fetcher.execute(request)
    except TransportError as exc:
        diagnostics.fetch_failures.append((request.url, str(exc)))
        return None
    finally:
        ledger.release(request.url)
    if response.status != 200:
        diagnostics.fetch_failures.append(
            (request.url, f"http status {response.status}"))
        return None
    return response
