"""Search-request construction and pagination walking.

Mimics a portal's own search form: substitute the keyword/category/page
placeholders in the portal's path template, percent-encoded (space as
%20), and either step a page parameter or follow the page's next link
until the hard cap.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from urllib.parse import parse_qsl, quote, urljoin, urlsplit

from . import htmldoc
from .fetch import FetchRequest, same_site
from .htmldoc import Element
from .portals import PortalDescriptor, SearchQuery
from .selectors import parse_selector

_PLACEHOLDER_RE = re.compile(r"\{(\w+)\}")


class UnknownCategoryError(ValueError):
    def __init__(self, portal_id: str, category: str):
        self.portal_id = portal_id
        self.category = category
        super().__init__(
            f"portal {portal_id!r} does not declare category {category!r}")


class TemplateMismatchError(ValueError):
    """The path template names a placeholder nothing can fill."""


@dataclass(frozen=True)
class FetchedPage:
    """A parsed result page plus the URL it was fetched from."""
    root: Element
    base_url: str


def encode_component(value: str) -> str:
    return quote(value, safe="")


def build_search_request(portal: PortalDescriptor, query: SearchQuery,
                         page: int) -> FetchRequest:
    if query.portal_id != portal.portal_id:
        raise ValueError(
            f"query targets {query.portal_id!r}, portal is {portal.portal_id!r}")
    if query.category not in portal.category_param_map:
        raise UnknownCategoryError(portal.portal_id, query.category)
    substitutions = {
        "keyword": encode_component(query.keyword),
        "category": encode_component(portal.category_param_map[query.category]),
        "page": str(page),
    }

    def _substitute(match: re.Match) -> str:
        name = match.group(1)
        if name not in substitutions:
            raise TemplateMismatchError(
                f"{portal.portal_id}: no value for placeholder {{{name}}}")
        return substitutions[name]

    path = _PLACEHOLDER_RE.sub(_substitute, portal.search_path_template)
    url = urljoin(portal.base_url + "/", path.lstrip("/"))
    if not same_site(urlsplit(url).netloc, urlsplit(portal.base_url).netloc):
        raise TemplateMismatchError(
            f"{portal.portal_id}: request leaves portal host: {url}")
    if portal.method == "post":
        base, _, query_string = url.partition("?")
        params = tuple(parse_qsl(query_string, keep_blank_values=True))
        return FetchRequest(url=base, method="post", form_params=params)
    return FetchRequest(url=url, method="get")


def next_page_request(portal: PortalDescriptor, current_doc: FetchedPage,
                      current_page: int,
                      query: SearchQuery | None = None) -> FetchRequest | None:
    """The request for the page after ``current_page``, or None at the end.

    ``query`` is required for page-param pagination (the page number is a
    template placeholder); next-link pagination reads the anchor from the
    document instead.
    """
    rule = portal.pagination
    pages_walked = current_page - rule.start + 1 if rule.kind == "page-param" \
        else current_page
    if rule.kind == "none":
        return None
    if rule.kind == "page-param":
        if query is None:
            raise ValueError("page-param pagination needs the originating query")
        if (current_page - rule.start) // rule.step + 1 >= rule.hard_cap:
            return None
        return build_search_request(portal, query, current_page + rule.step)
    # next-link
    if pages_walked >= rule.hard_cap:
        return None
    anchor = htmldoc.select_first(current_doc.root,
                                  parse_selector(rule.next_selector))
    if anchor is None:
        return None
    href = anchor.get("href")
    if not href:
        return None
    url = urljoin(current_doc.base_url, href)
    if not same_site(urlsplit(url).netloc, urlsplit(portal.base_url).netloc):
        return None
    return FetchRequest(url=url, method="get")
