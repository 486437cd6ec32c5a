"""Error-tolerant HTML document model.

Real portal result pages are routinely malformed (unclosed tags, stray
end tags, broken entities), so parsing must recover instead of reject.
This builds a plain element tree on top of the stdlib tokenizer:
mismatched end tags pop back to the nearest matching open tag or are
dropped, and the usual implied-close elements (li, p, tr, td, ...) close
their open siblings.
"""

from __future__ import annotations

from html.parser import HTMLParser

from .selectors import Selector

VOID_ELEMENTS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input",
    "link", "meta", "param", "source", "track", "wbr",
})

# Opening one of these closes any open element from its value set first.
_IMPLIED_CLOSE = {
    "li": {"li"},
    "p": {"p"},
    "option": {"option"},
    "tr": {"tr", "td", "th"},
    "td": {"td", "th"},
    "th": {"td", "th"},
    "dt": {"dt", "dd"},
    "dd": {"dt", "dd"},
}


class UnparseableDocument(ValueError):
    """The byte stream could not be tokenized as HTML at all."""


class Element:
    __slots__ = ("tag", "attrs", "parent", "children")

    def __init__(self, tag: str, attrs: dict[str, str] | None = None,
                 parent: "Element | None" = None):
        self.tag = tag
        self.attrs = attrs or {}
        self.parent = parent
        self.children: list[Element | str] = []

    def get(self, name: str) -> str | None:
        return self.attrs.get(name)

    @property
    def classes(self) -> frozenset[str]:
        return frozenset((self.attrs.get("class") or "").split())

    def text(self) -> str:
        out: list[str] = []
        self._collect_text(out)
        return "".join(out)

    def _collect_text(self, out: list[str]) -> None:
        for child in self.children:
            if isinstance(child, str):
                out.append(child)
            else:
                child._collect_text(out)

    def iter_elements(self):
        """Depth-first, document order, self excluded."""
        for child in self.children:
            if isinstance(child, Element):
                yield child
                yield from child.iter_elements()

    def __repr__(self):
        return f"<Element {self.tag} {self.attrs!r}>"


class _TreeBuilder(HTMLParser):
    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.root = Element("#document")
        self.stack = [self.root]

    def handle_starttag(self, tag, attrs):
        implied = _IMPLIED_CLOSE.get(tag)
        if implied:
            while self.stack[-1].tag in implied:
                self.stack.pop()
        element = Element(tag, dict(attrs), parent=self.stack[-1])
        self.stack[-1].children.append(element)
        if tag not in VOID_ELEMENTS:
            self.stack.append(element)

    def handle_startendtag(self, tag, attrs):
        element = Element(tag, dict(attrs), parent=self.stack[-1])
        self.stack[-1].children.append(element)

    def handle_endtag(self, tag):
        for i in range(len(self.stack) - 1, 0, -1):
            if self.stack[i].tag == tag:
                del self.stack[i:]
                return
        # stray end tag: drop it

    def handle_data(self, data):
        if data:
            self.stack[-1].children.append(data)


def decode_document(document: bytes | str, charset: str | None = None) -> str:
    if isinstance(document, str):
        return document
    encoding = charset or "utf-8"
    try:
        return document.decode(encoding, errors="replace")
    except LookupError:
        return document.decode("utf-8", errors="replace")


def parse_html(document: bytes | str, charset: str | None = None) -> Element:
    text = decode_document(document, charset)
    builder = _TreeBuilder()
    try:
        builder.feed(text)
        builder.close()
    except Exception as exc:
        raise UnparseableDocument(str(exc)) from exc
    return builder.root


def select(scope: Element, selector: Selector) -> list[Element]:
    """All descendants of ``scope`` matching ``selector``, document order.

    Ancestor parts of the selector may not match above ``scope``.
    """
    return [el for el in scope.iter_elements()
            if selector.matches_within(el, scope)]


def select_first(scope: Element, selector: Selector) -> Element | None:
    for el in scope.iter_elements():
        if selector.matches_within(el, scope):
            return el
    return None
