"""Portal registry: static descriptions of the searchable portals.

A registry file is a JSON document listing portal descriptors; each
descriptor binds a scrape template (loaded relative to the registry
file) and a pagination rule.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .templates import ScrapeTemplate, TemplateError, template_from_dict, load_template

SEARCH_CATEGORIES = ("title", "author", "keyword")
MAX_KEYWORD_LENGTH = 400
DEFAULT_HARD_PAGE_CAP = 5


class RegistryError(ValueError):
    """Registry file is malformed or violates descriptor invariants."""


class PortalUnknownError(KeyError):
    def __init__(self, portal_id: str):
        self.portal_id = portal_id
        super().__init__(f"unknown portal {portal_id!r}")


class InvalidQueryError(ValueError):
    pass


@dataclass(frozen=True)
class PaginationRule:
    kind: str = "none"             # none | page-param | next-link
    param: str | None = None
    start: int = 1
    step: int = 1
    next_selector: str | None = None
    hard_cap: int = DEFAULT_HARD_PAGE_CAP

    def validate(self) -> None:
        if self.kind not in ("none", "page-param", "next-link"):
            raise RegistryError(f"unknown pagination kind {self.kind!r}")
        if self.hard_cap < 1:
            raise RegistryError("pagination hard_cap must be >= 1")
        if self.kind == "page-param" and not self.param:
            raise RegistryError("page-param pagination needs a param name")
        if self.kind == "next-link" and not self.next_selector:
            raise RegistryError("next-link pagination needs a selector")


@dataclass(frozen=True)
class PortalDescriptor:
    portal_id: str
    display_name: str
    base_url: str
    search_path_template: str
    method: str
    category_param_map: dict[str, str]
    pagination: PaginationRule
    template: ScrapeTemplate

    @property
    def categories(self) -> list[str]:
        return [c for c in SEARCH_CATEGORIES if c in self.category_param_map]

    def validate(self) -> None:
        if self.method not in ("get", "post"):
            raise RegistryError(f"{self.portal_id}: method must be get or post")
        if not self.base_url.startswith(("http://", "https://")):
            raise RegistryError(f"{self.portal_id}: base_url must be absolute http(s)")
        if not self.category_param_map:
            raise RegistryError(f"{self.portal_id}: declares no search categories")
        for category in self.category_param_map:
            if category not in SEARCH_CATEGORIES:
                raise RegistryError(f"{self.portal_id}: unknown category {category!r}")
        self.pagination.validate()
        if self.template.portal_id != self.portal_id:
            raise RegistryError(
                f"{self.portal_id}: bound template belongs to "
                f"{self.template.portal_id!r}")


@dataclass(frozen=True)
class SearchQuery:
    keyword: str
    portal_id: str
    category: str = "keyword"
    max_pages: int = 1

    def validate(self) -> None:
        if not self.keyword.strip():
            raise InvalidQueryError("keyword is empty")
        if len(self.keyword) > MAX_KEYWORD_LENGTH:
            raise InvalidQueryError(
                f"keyword longer than {MAX_KEYWORD_LENGTH} characters")
        if self.category not in SEARCH_CATEGORIES:
            raise InvalidQueryError(f"unknown category {self.category!r}")
        if self.max_pages < 1:
            raise InvalidQueryError("max_pages must be >= 1")


@dataclass
class PortalRegistry:
    portals: dict[str, PortalDescriptor] = field(default_factory=dict)

    def get(self, portal_id: str) -> PortalDescriptor:
        try:
            return self.portals[portal_id]
        except KeyError:
            raise PortalUnknownError(portal_id) from None

    def __iter__(self):
        return iter(self.portals.values())

    def __len__(self):
        return len(self.portals)


def load_registry(path: str | Path) -> PortalRegistry:
    path = Path(path)
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise RegistryError(f"cannot read registry {path}: {exc}") from exc
    registry = PortalRegistry()
    for entry in data.get("portals", []):
        descriptor = _descriptor_from_dict(entry, base_dir=path.parent)
        if descriptor.portal_id in registry.portals:
            raise RegistryError(f"duplicate portal_id {descriptor.portal_id!r}")
        registry.portals[descriptor.portal_id] = descriptor
    return registry


def _descriptor_from_dict(entry: dict, base_dir: Path) -> PortalDescriptor:
    try:
        pagination_data = entry.get("pagination", {})
        pagination = PaginationRule(
            kind=pagination_data.get("kind", "none"),
            param=pagination_data.get("param"),
            start=int(pagination_data.get("start", 1)),
            step=int(pagination_data.get("step", 1)),
            next_selector=pagination_data.get("next_selector"),
            hard_cap=int(pagination_data.get("hard_cap", DEFAULT_HARD_PAGE_CAP)),
        )
        if "template" in entry:
            template = load_template(base_dir / entry["template"])
        else:
            template = template_from_dict(entry["template_inline"])
        descriptor = PortalDescriptor(
            portal_id=entry["portal_id"],
            display_name=entry.get("display_name", entry["portal_id"]),
            base_url=entry["base_url"].rstrip("/"),
            search_path_template=entry["search_path_template"],
            method=entry.get("method", "get"),
            category_param_map=dict(entry.get("categories", {"keyword": ""})),
            pagination=pagination,
            template=template,
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, (RegistryError, TemplateError)):
            raise
        raise RegistryError(f"malformed portal entry: {exc}") from exc
    descriptor.validate()
    return descriptor
