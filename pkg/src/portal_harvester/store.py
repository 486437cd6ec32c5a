"""Persistent scrape store: one row per (website, keyword, category).

SQLite-backed.  A row carries the searched site, the normalized keyword,
the serialized record list, the first open-access download link (if
any), and the update timestamp.  Refreshing a search upserts the row in
place rather than appending history.  Admin credentials live beside the
entries; plaintext passwords are never written anywhere.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import re
import secrets
import sqlite3
import threading
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .extraction import ArticleRecord, format_timestamp, parse_timestamp

WEBSITE_MAX = 200
KEYWORD_MAX = 400
FILE_DOWNLOAD_MAX = 400
DEFAULT_TTL = timedelta(days=7)
DEFAULT_SESSION_TTL = timedelta(hours=1)

_WS_RE = re.compile(r"\s+")


class StorageUnavailableError(Exception):
    pass


class LengthViolationError(ValueError):
    def __init__(self, field_name: str, limit: int, actual: int):
        self.field = field_name
        super().__init__(f"{field_name}: {actual} chars exceeds limit {limit}")


class DeserializeError(ValueError):
    pass


def normalize_keyword(keyword: str) -> str:
    """Cache-key form: trimmed, inner whitespace collapsed, case-folded."""
    return _WS_RE.sub(" ", keyword.strip()).casefold()


def display_id(entry_id: int) -> str:
    """Zero-padded to 4 digits; wider ids keep their full decimal form."""
    return f"{entry_id:04d}"


@dataclass(frozen=True)
class ScrapeCacheEntry:
    id: int
    website: str
    keyword: str
    category: str
    hasil: str
    file_download: str | None
    tgl_jam_update: datetime

    @property
    def display_id(self) -> str:
        return display_id(self.id)

    def records(self) -> list[ArticleRecord]:
        return deserialize_records(self.hasil)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "display_id": self.display_id,
            "website": self.website,
            "keyword": self.keyword,
            "category": self.category,
            "hasil": self.hasil,
            "file_download": self.file_download,
            "tgl_jam_update": format_timestamp(self.tgl_jam_update),
        }


@dataclass(frozen=True)
class EntryFilter:
    website_contains: str | None = None
    keyword_contains: str | None = None
    since: datetime | None = None
    until: datetime | None = None
    page: int = 1
    page_size: int = 50

    def validate(self) -> None:
        if self.page < 1:
            raise ValueError("page must be >= 1")
        if not 1 <= self.page_size <= 200:
            raise ValueError("page_size must be in 1..200")


@dataclass(frozen=True)
class EntryPage:
    entries: list[ScrapeCacheEntry]
    total: int
    page: int
    page_size: int


def serialize_records(records: list[ArticleRecord]) -> str:
    """Interchange form: JSON array, pinned field order, compact separators."""
    return json.dumps([r.to_dict() for r in records],
                      ensure_ascii=False, separators=(",", ":"))


def deserialize_records(text: str) -> list[ArticleRecord]:
    try:
        data = json.loads(text)
        if not isinstance(data, list):
            raise DeserializeError("expected a JSON array of records")
        return [ArticleRecord.from_dict(item) for item in data]
    except DeserializeError:
        raise
    except (ValueError, KeyError, TypeError) as exc:
        raise DeserializeError(f"malformed record text: {exc}") from exc


_SCHEMA = """
CREATE TABLE IF NOT EXISTS data_scrape (
    id INTEGER PRIMARY KEY AUTOINCREMENT,
    website TEXT NOT NULL,
    keyword TEXT NOT NULL,
    category TEXT NOT NULL DEFAULT 'keyword',
    hasil TEXT NOT NULL,
    file_download TEXT,
    tgl_jam_update TEXT NOT NULL,
    UNIQUE (website, keyword, category)
);
CREATE TABLE IF NOT EXISTS admins (
    username TEXT PRIMARY KEY,
    salt BLOB NOT NULL,
    password_hash BLOB NOT NULL,
    created_at TEXT NOT NULL
);
"""


class Store:
    """Single-writer, linearizable store over one SQLite file."""

    def __init__(self, path: str | Path,
                 session_ttl: timedelta = DEFAULT_SESSION_TTL):
        self.path = str(path)
        self.session_ttl = session_ttl
        self._lock = threading.Lock()
        self._sessions: dict[str, datetime] = {}
        try:
            self._conn = sqlite3.connect(self.path, check_same_thread=False)
            self._conn.execute("PRAGMA journal_mode=WAL")
        except sqlite3.Error as exc:
            raise StorageUnavailableError(f"cannot open {self.path}: {exc}") from exc

    # -- schema -----------------------------------------------------------

    def init_schema(self) -> "Store":
        with self._lock:
            try:
                self._conn.executescript(_SCHEMA)
                self._conn.commit()
            except sqlite3.Error as exc:
                raise StorageUnavailableError(str(exc)) from exc
        return self

    def close(self) -> None:
        self._conn.close()

    # -- entries ----------------------------------------------------------

    def save(self, website: str, keyword: str, category: str,
             records: list[ArticleRecord], now: datetime) -> ScrapeCacheEntry:
        if not records:
            raise ValueError("save requires at least one record")
        _check_length("website", website, WEBSITE_MAX)
        _check_length("keyword", keyword, KEYWORD_MAX)
        file_download = next(
            (r.download_url for r in records if r.download_kind != "none"), None)
        if file_download is not None:
            _check_length("file_download", file_download, FILE_DOWNLOAD_MAX)
        hasil = serialize_records(records)
        stamp = format_timestamp(now)
        with self._lock:
            try:
                cursor = self._conn.execute(
                    "SELECT id FROM data_scrape WHERE website=? AND keyword=? "
                    "AND category=?", (website, keyword, category))
                row = cursor.fetchone()
                if row is None:
                    cursor = self._conn.execute(
                        "INSERT INTO data_scrape (website, keyword, category, "
                        "hasil, file_download, tgl_jam_update) VALUES (?,?,?,?,?,?)",
                        (website, keyword, category, hasil, file_download, stamp))
                    entry_id = cursor.lastrowid
                else:
                    entry_id = row[0]
                    self._conn.execute(
                        "UPDATE data_scrape SET hasil=?, file_download=?, "
                        "tgl_jam_update=? WHERE id=?",
                        (hasil, file_download, stamp, entry_id))
                self._conn.commit()
            except sqlite3.Error as exc:
                raise StorageUnavailableError(str(exc)) from exc
        return ScrapeCacheEntry(id=entry_id, website=website, keyword=keyword,
                                category=category, hasil=hasil,
                                file_download=file_download,
                                tgl_jam_update=parse_timestamp(stamp))

    def lookup(self, website: str, keyword: str, category: str, now: datetime,
               ttl: timedelta = DEFAULT_TTL
               ) -> tuple[ScrapeCacheEntry, list[ArticleRecord]] | None:
        with self._lock:
            try:
                cursor = self._conn.execute(
                    "SELECT id, website, keyword, category, hasil, "
                    "file_download, tgl_jam_update FROM data_scrape "
                    "WHERE website=? AND keyword=? AND category=?",
                    (website, keyword, category))
                row = cursor.fetchone()
            except sqlite3.Error as exc:
                raise StorageUnavailableError(str(exc)) from exc
        if row is None:
            return None
        entry = _entry_from_row(row)
        if now - entry.tgl_jam_update > ttl:
            return None
        return entry, entry.records()

    def list_entries(self, entry_filter: EntryFilter) -> EntryPage:
        entry_filter.validate()
        clauses, params = [], []
        if entry_filter.website_contains:
            clauses.append("website LIKE ?")
            params.append(f"%{entry_filter.website_contains}%")
        if entry_filter.keyword_contains:
            clauses.append("keyword LIKE ?")
            params.append(f"%{entry_filter.keyword_contains}%")
        if entry_filter.since:
            clauses.append("tgl_jam_update >= ?")
            params.append(format_timestamp(entry_filter.since))
        if entry_filter.until:
            clauses.append("tgl_jam_update <= ?")
            params.append(format_timestamp(entry_filter.until))
        where = (" WHERE " + " AND ".join(clauses)) if clauses else ""
        offset = (entry_filter.page - 1) * entry_filter.page_size
        with self._lock:
            try:
                total = self._conn.execute(
                    f"SELECT COUNT(*) FROM data_scrape{where}", params).fetchone()[0]
                rows = self._conn.execute(
                    f"SELECT id, website, keyword, category, hasil, file_download, "
                    f"tgl_jam_update FROM data_scrape{where} "
                    f"ORDER BY tgl_jam_update DESC, id DESC LIMIT ? OFFSET ?",
                    params + [entry_filter.page_size, offset]).fetchall()
            except sqlite3.Error as exc:
                raise StorageUnavailableError(str(exc)) from exc
        return EntryPage(entries=[_entry_from_row(r) for r in rows], total=total,
                         page=entry_filter.page, page_size=entry_filter.page_size)

    def entry_count(self) -> int:
        with self._lock:
            try:
                return self._conn.execute(
                    "SELECT COUNT(*) FROM data_scrape").fetchone()[0]
            except sqlite3.Error as exc:
                raise StorageUnavailableError(str(exc)) from exc

    # -- admin auth ---------------------------------------------------------

    def create_admin(self, username: str, password: str, now: datetime) -> None:
        salt = secrets.token_bytes(16)
        digest = _hash_password(password, salt)
        with self._lock:
            try:
                self._conn.execute(
                    "INSERT OR REPLACE INTO admins (username, salt, "
                    "password_hash, created_at) VALUES (?,?,?,?)",
                    (username, salt, digest, format_timestamp(now)))
                self._conn.commit()
            except sqlite3.Error as exc:
                raise StorageUnavailableError(str(exc)) from exc

    def authenticate_admin(self, username: str, password: str,
                           now: datetime) -> tuple[str, datetime] | None:
        """Token and expiry on success; None on any failure (uniform shape)."""
        with self._lock:
            try:
                row = self._conn.execute(
                    "SELECT salt, password_hash FROM admins WHERE username=?",
                    (username,)).fetchone()
            except sqlite3.Error as exc:
                raise StorageUnavailableError(str(exc)) from exc
        if row is None:
            # burn the same hashing cost so unknown users are indistinguishable
            _hash_password(password, b"\x00" * 16)
            return None
        salt, stored = row
        if not hmac.compare_digest(_hash_password(password, salt), stored):
            return None
        token = secrets.token_urlsafe(32)
        expires = now + self.session_ttl
        with self._lock:
            self._sessions[token] = expires
        return token, expires

    def validate_token(self, token: str, now: datetime) -> bool:
        with self._lock:
            expires = self._sessions.get(token)
            if expires is None:
                return False
            if now > expires:
                del self._sessions[token]
                return False
            return True

    def admin_count(self) -> int:
        with self._lock:
            try:
                return self._conn.execute(
                    "SELECT COUNT(*) FROM admins").fetchone()[0]
            except sqlite3.Error as exc:
                raise StorageUnavailableError(str(exc)) from exc


def open_store(path: str | Path, **kwargs) -> Store:
    return Store(path, **kwargs).init_schema()


def _hash_password(password: str, salt: bytes) -> bytes:
    return hashlib.scrypt(password.encode("utf-8"), salt=salt,
                          n=2 ** 14, r=8, p=1, dklen=32)


def _check_length(field_name: str, value: str, limit: int) -> None:
    if len(value) > limit:
        raise LengthViolationError(field_name, limit, len(value))


def _entry_from_row(row) -> ScrapeCacheEntry:
    return ScrapeCacheEntry(
        id=row[0], website=row[1], keyword=row[2], category=row[3],
        hasil=row[4], file_download=row[5],
        tgl_jam_update=parse_timestamp(row[6]))
