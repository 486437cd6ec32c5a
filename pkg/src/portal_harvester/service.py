"""HTTP facade: search, portal discovery, authenticated admin listing.

All three search outcomes are HTTP 200 (not-found is a domain result,
not a transport error).  Every non-200 response has the uniform error
shape {status, code, message}; machine codes are a stable contract.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import timedelta

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from . import __version__
from .clock import Clock, SystemClock
from .fetch import Fetcher
from .harvest import CacheHit, NotFound, Scraped, run_search
from .politeness import FetchPolicy, HostLedger
from .portals import (InvalidQueryError, PortalRegistry, PortalUnknownError,
                      SEARCH_CATEGORIES, SearchQuery)
from .store import DEFAULT_TTL, EntryFilter, Store, StorageUnavailableError


@dataclass
class ApiError(Exception):
    status: int
    code: str
    message: str

    def body(self) -> dict:
        return {"status": self.status, "code": self.code, "message": self.message}


def create_app(registry: PortalRegistry, store: Store, fetcher: Fetcher,
               policy: FetchPolicy, clock: Clock | None = None,
               ledger: HostLedger | None = None,
               ttl: timedelta = DEFAULT_TTL,
               static_dir: str | None = None) -> FastAPI:
    clock = clock or SystemClock()
    ledger = ledger or HostLedger()
    app = FastAPI(title="portal-harvester", version=__version__)

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status, content=exc.body())

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={
            "status": 400, "code": "bad_request", "message": str(exc)})

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/api/portals")
    def portals():
        return [
            {"portal_id": p.portal_id, "display_name": p.display_name,
             "categories": p.categories}
            for p in registry
        ]

    @app.get("/api/search")
    def search(portal: str = "", q: str = "", category: str = "keyword",
               max_pages: int = 1):
        if not q.strip():
            raise ApiError(400, "empty_query", "query parameter q is empty")
        if category not in SEARCH_CATEGORIES:
            raise ApiError(400, "unknown_category",
                           f"unknown category {category!r}")
        query = SearchQuery(keyword=q.strip(), portal_id=portal,
                            category=category, max_pages=max_pages)
        try:
            outcome = run_search(query, registry, store, fetcher, policy,
                                 clock, ledger=ledger, ttl=ttl)
        except PortalUnknownError:
            raise ApiError(404, "unknown_portal", f"unknown portal {portal!r}")
        except InvalidQueryError as exc:
            raise ApiError(400, "bad_query", str(exc))
        except StorageUnavailableError as exc:
            raise ApiError(503, "store_unavailable", str(exc))
        return _outcome_payload(outcome)

    @app.post("/api/admin/login")
    async def admin_login(request: Request):
        try:
            body = await request.json()
            username = body["username"]
            password = body["password"]
            if not isinstance(username, str) or not isinstance(password, str):
                raise TypeError
        except Exception:
            raise ApiError(400, "bad_request",
                           "body must be JSON with string username and password")
        try:
            result = store.authenticate_admin(username, password, clock.now())
        except StorageUnavailableError as exc:
            raise ApiError(503, "store_unavailable", str(exc))
        if result is None:
            raise ApiError(401, "unauthorized", "invalid credentials")
        token, expires = result
        return {"token": token, "expires_at": expires.strftime("%Y-%m-%dT%H:%M:%SZ")}

    @app.get("/api/admin/scrapes")
    def admin_scrapes(request: Request, website: str | None = None,
                      keyword: str | None = None, page: int = 1,
                      page_size: int = 50):
        _require_token(request)
        try:
            entry_filter = EntryFilter(website_contains=website,
                                       keyword_contains=keyword,
                                       page=page, page_size=page_size)
            result = store.list_entries(entry_filter)
        except ValueError as exc:
            raise ApiError(400, "bad_filter", str(exc))
        except StorageUnavailableError as exc:
            raise ApiError(503, "store_unavailable", str(exc))
        return {
            "total": result.total,
            "page": result.page,
            "page_size": result.page_size,
            "entries": [_entry_payload(e) for e in result.entries],
        }

    def _require_token(request: Request) -> None:
        header = request.headers.get("Authorization", "")
        if not header.startswith("Bearer "):
            raise ApiError(401, "unauthorized", "missing bearer token")
        token = header[len("Bearer "):].strip()
        if not store.validate_token(token, clock.now()):
            raise ApiError(401, "unauthorized", "invalid or expired token")

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def _entry_payload(entry) -> dict:
    data = entry.to_dict()
    data["record_count"] = len(entry.records())
    del data["hasil"]
    return data


def _outcome_payload(outcome) -> dict:
    if isinstance(outcome, CacheHit):
        return {"kind": "cache_hit",
                "records": [r.to_dict() for r in outcome.records],
                "entry": _entry_payload(outcome.entry),
                "diagnostics": None}
    if isinstance(outcome, Scraped):
        return {"kind": "scraped",
                "records": [r.to_dict() for r in outcome.records],
                "entry": _entry_payload(outcome.entry),
                "diagnostics": outcome.diagnostics.to_dict()
                if outcome.diagnostics else None}
    assert isinstance(outcome, NotFound)
    return {"kind": "not_found", "records": [], "entry": None,
            "message": outcome.message,
            "diagnostics": outcome.diagnostics.to_dict()
            if outcome.diagnostics else None}
