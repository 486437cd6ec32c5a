"""Record extraction and normalization.

Pure functions from fetched documents to bibliographic records: no
network, no store access.  A malformed result block is skipped and
counted, never fatal.
"""

from __future__ import annotations

import html as html_lib
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from urllib.parse import urljoin, urlsplit

from . import htmldoc
from .htmldoc import UnparseableDocument  # re-exported surface  # noqa: F401
from .templates import CompiledTemplate, FieldRule, transform_name

DOWNLOAD_KINDS = ("pdf", "word", "powerpoint", "postscript", "other", "none")

_EXTENSION_KINDS = {
    "pdf": "pdf",
    "doc": "word",
    "docx": "word",
    "ppt": "powerpoint",
    "pptx": "powerpoint",
    "ps": "postscript",
}

_WS_RUN_RE = re.compile(r"\s+")


class MissingTitleError(ValueError):
    """Raw record produced an empty title after normalization."""


class InvalidLinkError(ValueError):
    """The link field did not resolve to an absolute http(s) URL."""

    def __init__(self, value: str):
        self.value = value
        super().__init__(f"not an absolute http(s) URL: {value!r}")


@dataclass(frozen=True)
class RawRecord:
    fields: dict[str, str]
    ordinal: int


@dataclass(frozen=True)
class ArticleRecord:
    portal_id: str
    title: str
    authors: tuple[str, ...]
    link: str
    source_site: str
    location: str
    download_url: str | None
    download_kind: str
    scraped_at: datetime

    def to_dict(self) -> dict:
        return {
            "portal_id": self.portal_id,
            "title": self.title,
            "authors": list(self.authors),
            "link": self.link,
            "source_site": self.source_site,
            "location": self.location,
            "download_url": self.download_url,
            "download_kind": self.download_kind,
            "scraped_at": format_timestamp(self.scraped_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ArticleRecord":
        return cls(
            portal_id=data["portal_id"],
            title=data["title"],
            authors=tuple(data["authors"]),
            link=data["link"],
            source_site=data["source_site"],
            location=data["location"],
            download_url=data["download_url"],
            download_kind=data["download_kind"],
            scraped_at=parse_timestamp(data["scraped_at"]),
        )


@dataclass
class ExtractionResult:
    records: list[RawRecord] = field(default_factory=list)
    skipped: int = 0
    notes: list[str] = field(default_factory=list)


def format_timestamp(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def parse_timestamp(text: str) -> datetime:
    return datetime.strptime(text, "%Y-%m-%dT%H:%M:%SZ").replace(tzinfo=timezone.utc)


def collapse_whitespace(text: str) -> str:
    return _WS_RUN_RE.sub(" ", text).strip()


def extract_records(document: bytes | str, template: CompiledTemplate,
                    base_url: str, charset: str | None = None) -> ExtractionResult:
    """One RawRecord per result block, in document order.

    Blocks missing a required field are skipped and counted.  ``base_url``
    is unused here (resolution happens in normalize_record) but kept in
    the signature so callers pass page identity alongside the bytes.
    """
    if template.payload_kind == "structured-text":
        return _extract_structured(document, template, charset)
    return _extract_html(document, template, charset)


def _extract_html(document, template, charset) -> ExtractionResult:
    root = htmldoc.parse_html(document, charset)
    result = ExtractionResult()
    required = set(template.required_fields())
    blocks = htmldoc.select(root, template.record_program)
    for ordinal, block in enumerate(blocks):
        fields_out: dict[str, str] = {}
        for name, rule in template.source.field_rules.items():
            value = _capture_html(block, template.field_programs[name], rule)
            if value is not None:
                fields_out[name] = value
        missing = required - fields_out.keys()
        if missing:
            result.skipped += 1
            result.notes.append(
                f"block {ordinal}: missing required field(s) {sorted(missing)}")
            continue
        result.records.append(RawRecord(fields=fields_out, ordinal=ordinal))
    return result


def _capture_html(block, program, rule: FieldRule) -> str | None:
    element = htmldoc.select_first(block, program)
    if element is None:
        return None
    if rule.capture == "text":
        return element.text()
    attr = rule.capture.split(":", 1)[1]
    return element.get(attr)


def _extract_structured(document, template, charset) -> ExtractionResult:
    text = htmldoc.decode_document(document, charset)
    result = ExtractionResult()
    if not text.strip():
        return result
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UnparseableDocument(f"structured payload: {exc}") from exc
    rows = _dig(payload, template.source.record_selector)
    if not isinstance(rows, list):
        return result
    required = set(template.required_fields())
    for ordinal, row in enumerate(rows):
        fields_out: dict[str, str] = {}
        for name, rule in template.source.field_rules.items():
            value = _dig(row, rule.selector)
            if value is None:
                continue
            if isinstance(value, list):
                value = ",".join(str(v) for v in value)
            fields_out[name] = str(value)
        missing = required - fields_out.keys()
        if missing:
            result.skipped += 1
            result.notes.append(
                f"row {ordinal}: missing required field(s) {sorted(missing)}")
            continue
        result.records.append(RawRecord(fields=fields_out, ordinal=ordinal))
    return result


def _dig(node, dotted: str):
    for key in dotted.strip().split("."):
        if not isinstance(node, dict) or key not in node:
            return None
        node = node[key]
    return node


def normalize_record(raw: RawRecord, template: CompiledTemplate,
                     base_url: str, now: datetime) -> ArticleRecord:
    """Apply each field rule's transforms in order and build the record.

    Relative URLs resolve against ``base_url``; a link that is not an
    absolute http(s) URL rejects the record rather than repairing it.
    """
    values: dict[str, str | list[str]] = {}
    for name, value in raw.fields.items():
        rule = template.source.field_rules[name]
        values[name] = _apply_transforms(value, rule.transforms, base_url)

    title = collapse_whitespace(_as_text(values.get("title", "")))
    if not title:
        raise MissingTitleError("title empty after normalization")

    link = urljoin(base_url, _as_text(values.get("link", "")).strip())
    if not _is_absolute_http(link):
        raise InvalidLinkError(_as_text(values.get("link", "")))

    authors_value = values.get("authors", [])
    if isinstance(authors_value, list):
        authors = tuple(a for a in (s.strip() for s in authors_value) if a)
    else:
        author = collapse_whitespace(authors_value)
        authors = (author,) if author else ()

    download_url: str | None = None
    if "download_url" in values:
        candidate = urljoin(base_url, _as_text(values["download_url"]).strip())
        if _is_absolute_http(candidate):
            download_url = candidate

    return ArticleRecord(
        portal_id=template.portal_id,
        title=title,
        authors=authors,
        link=link,
        source_site=collapse_whitespace(_as_text(values.get("source_site", ""))),
        location=collapse_whitespace(_as_text(values.get("location", ""))),
        download_url=download_url,
        download_kind=classify_download_link(download_url),
        scraped_at=now.astimezone(timezone.utc).replace(microsecond=0),
    )


def classify_download_link(url: str | None) -> str:
    """Extension of the final path segment, case-insensitive; total."""
    if url is None:
        return "none"
    path = urlsplit(url).path
    segment = path.rsplit("/", 1)[-1]
    if "." not in segment:
        return "other"
    extension = segment.rsplit(".", 1)[-1].lower()
    return _EXTENSION_KINDS.get(extension, "other")


def _apply_transforms(value: str, transforms: tuple[str, ...], base_url: str):
    current: str | list[str] = value
    for transform in transforms:
        name = transform_name(transform)
        if name == "split-list":
            delimiter = transform.split(":", 1)[1] if ":" in transform else ","
            text = _as_text(current)
            current = [p.strip() for p in text.split(delimiter) if p.strip()]
        elif name == "resolve-url":
            current = _map_text(current, lambda v: urljoin(base_url, v.strip()))
        elif name == "trim":
            current = _map_text(current, str.strip)
        elif name == "collapse-whitespace":
            current = _map_text(current, collapse_whitespace)
        elif name == "entity-decode":
            current = _map_text(current, html_lib.unescape)
    return current


def _map_text(value, fn):
    if isinstance(value, list):
        return [fn(v) for v in value]
    return fn(value)


def _as_text(value) -> str:
    if isinstance(value, list):
        return ", ".join(value)
    return value


def _is_absolute_http(url: str) -> bool:
    parts = urlsplit(url)
    return parts.scheme in ("http", "https") and bool(parts.netloc)
