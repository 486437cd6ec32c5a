"""Tiny CSS-style selector engine used by scrape templates.

Grammar (the whole language, nothing more):

    selector := simple (WS simple)*          # whitespace = descendant
    simple   := tag? ('#' id)? ('.' class)*

Anything outside this grammar is a syntax error; templates that need more
than tag/id/class descendant chains should restructure their fixtures
instead.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

_SIMPLE_RE = re.compile(
    r"^(?P<tag>[a-zA-Z][a-zA-Z0-9-]*)?"
    r"(?:#(?P<id>[\w-]+))?"
    r"(?P<classes>(?:\.[\w-]+)*)$"
)


class SelectorSyntaxError(ValueError):
    """A selector string does not conform to the pinned grammar."""

    def __init__(self, selector: str, message: str):
        self.selector = selector
        self.message = message
        super().__init__(f"bad selector {selector!r}: {message}")


@dataclass(frozen=True)
class SimpleSelector:
    tag: str | None
    id: str | None
    classes: frozenset[str]

    def matches(self, element) -> bool:
        if self.tag is not None and element.tag != self.tag:
            return False
        if self.id is not None and element.get("id") != self.id:
            return False
        return self.classes <= element.classes


@dataclass(frozen=True)
class Selector:
    source: str
    parts: tuple[SimpleSelector, ...]

    def matches(self, element) -> bool:
        """Descendant-combinator match against an element and its ancestors."""
        return self.matches_within(element, None)

    def matches_within(self, element, scope) -> bool:
        """Like matches(), but ancestors above ``scope`` are out of bounds."""
        if not self.parts[-1].matches(element):
            return False
        idx = len(self.parts) - 2
        node = element
        while idx >= 0:
            if node is scope:
                return False
            node = node.parent
            if node is None:
                return False
            if self.parts[idx].matches(node):
                idx -= 1
        return True


def parse_selector(text: str) -> Selector:
    stripped = text.strip()
    if not stripped:
        raise SelectorSyntaxError(text, "empty selector")
    parts = []
    for token in stripped.split():
        m = _SIMPLE_RE.match(token)
        if m is None:
            raise SelectorSyntaxError(text, f"bad simple selector {token!r}")
        tag = m.group("tag")
        ident = m.group("id")
        classes = frozenset(c for c in m.group("classes").split(".") if c)
        if tag is None and ident is None and not classes:
            raise SelectorSyntaxError(text, f"empty simple selector {token!r}")
        parts.append(SimpleSelector(tag=tag.lower() if tag else None,
                                    id=ident, classes=classes))
    return Selector(source=stripped, parts=tuple(parts))
