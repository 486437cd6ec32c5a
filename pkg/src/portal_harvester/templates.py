"""Declarative scrape templates and their compiled form.

A template maps page structure to named bibliographic fields.  Two
payload kinds exist: ``html`` templates use the selector grammar from
:mod:`.selectors`; ``structured-text`` templates use dotted paths into a
JSON payload (some portals answer search posts with encoded rows rather
than markup).  Both produce the same raw-record shape downstream.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .selectors import Selector, SelectorSyntaxError, parse_selector

FIELD_NAMES = ("title", "authors", "link", "source_site", "location", "download_url")
URL_FIELDS = frozenset({"link", "download_url"})
PAYLOAD_KINDS = ("html", "structured-text")
TRANSFORM_NAMES = ("trim", "collapse-whitespace", "entity-decode",
                   "resolve-url", "split-list")

_DOTTED_PATH_RE = re.compile(r"^[\w-]+(\.[\w-]+)*$")


class TemplateError(ValueError):
    """Base for template validation/compilation failures."""


class MissingRequiredFieldError(TemplateError):
    pass


class TemplateSelectorError(TemplateError):
    """A selector in the template failed to compile."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        self.message = message
        super().__init__(f"{field_name}: {message}")


def transform_name(transform: str) -> str:
    """'split-list:;' -> 'split-list'; plain names pass through."""
    return transform.split(":", 1)[0]


@dataclass(frozen=True)
class FieldRule:
    selector: str
    capture: str = "text"          # "text" | "attr:<name>"
    required: bool = False
    transforms: tuple[str, ...] = ()

    def validate(self, field_name: str) -> None:
        if not self.selector.strip():
            raise TemplateSelectorError(field_name, "empty selector")
        if self.capture != "text" and not self.capture.startswith("attr:"):
            raise TemplateError(
                f"{field_name}: capture must be 'text' or 'attr:<name>', "
                f"got {self.capture!r}")
        names = [transform_name(t) for t in self.transforms]
        for name in names:
            if name not in TRANSFORM_NAMES:
                raise TemplateError(f"{field_name}: unknown transform {name!r}")
        if len(names) != len(set(names)):
            raise TemplateError(f"{field_name}: duplicate transforms")
        if "resolve-url" in names and field_name not in URL_FIELDS:
            raise TemplateError(
                f"{field_name}: resolve-url only applies to URL fields")


@dataclass(frozen=True)
class ScrapeTemplate:
    portal_id: str
    record_selector: str
    field_rules: dict[str, FieldRule]
    payload_kind: str = "html"
    version: int = 1

    def validate(self) -> None:
        if not self.portal_id:
            raise TemplateError("portal_id is empty")
        if self.payload_kind not in PAYLOAD_KINDS:
            raise TemplateError(f"unknown payload_kind {self.payload_kind!r}")
        if self.version < 1:
            raise TemplateError("version must be >= 1")
        if not self.record_selector.strip():
            raise MissingRequiredFieldError("record_selector is empty")
        for name in ("title", "link"):
            rule = self.field_rules.get(name)
            if rule is None:
                raise MissingRequiredFieldError(f"missing required field rule {name!r}")
            if not rule.required:
                raise TemplateError(f"field rule {name!r} must be marked required")
        for name, rule in self.field_rules.items():
            if name not in FIELD_NAMES:
                raise TemplateError(f"unknown field name {name!r}")
            rule.validate(name)


@dataclass(frozen=True)
class CompiledTemplate:
    """A validated template plus its parsed selector programs.

    Exists only when compilation produced zero diagnostics; a bad
    template raises instead of yielding a half-compiled object.
    """

    source: ScrapeTemplate
    record_program: Selector | None          # html payloads
    field_programs: dict[str, Selector]      # html payloads
    diagnostics: tuple[str, ...] = ()

    @property
    def portal_id(self) -> str:
        return self.source.portal_id

    @property
    def payload_kind(self) -> str:
        return self.source.payload_kind

    def required_fields(self) -> list[str]:
        return [n for n, r in self.source.field_rules.items() if r.required]


def compile_template(template: ScrapeTemplate) -> CompiledTemplate:
    template.validate()
    if template.payload_kind == "structured-text":
        _validate_dotted(template.record_selector, "record_selector")
        for name, rule in template.field_rules.items():
            _validate_dotted(rule.selector, name)
            if rule.capture != "text":
                raise TemplateError(
                    f"{name}: structured-text templates only capture text")
        return CompiledTemplate(source=template, record_program=None,
                                field_programs={})
    try:
        record_program = parse_selector(template.record_selector)
    except SelectorSyntaxError as exc:
        raise TemplateSelectorError("record_selector", exc.message) from exc
    field_programs = {}
    for name, rule in template.field_rules.items():
        try:
            field_programs[name] = parse_selector(rule.selector)
        except SelectorSyntaxError as exc:
            raise TemplateSelectorError(name, exc.message) from exc
    return CompiledTemplate(source=template, record_program=record_program,
                            field_programs=field_programs)


def template_from_dict(data: dict) -> ScrapeTemplate:
    try:
        fields = {
            name: FieldRule(
                selector=spec["selector"],
                capture=spec.get("capture", "text"),
                required=bool(spec.get("required", False)),
                transforms=tuple(spec.get("transforms", ())),
            )
            for name, spec in data["fields"].items()
        }
        return ScrapeTemplate(
            portal_id=data["portal_id"],
            payload_kind=data.get("payload_kind", "html"),
            record_selector=data["record_selector"],
            field_rules=fields,
            version=int(data.get("version", 1)),
        )
    except (KeyError, TypeError) as exc:
        raise TemplateError(f"malformed template document: {exc}") from exc


def template_to_dict(template: ScrapeTemplate) -> dict:
    return {
        "portal_id": template.portal_id,
        "payload_kind": template.payload_kind,
        "record_selector": template.record_selector,
        "fields": {
            name: {
                "selector": rule.selector,
                "capture": rule.capture,
                "required": rule.required,
                "transforms": list(rule.transforms),
            }
            for name, rule in template.field_rules.items()
        },
        "version": template.version,
    }


def load_template(path: str | Path) -> ScrapeTemplate:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TemplateError(f"{path}: not valid JSON: {exc}") from exc
    return template_from_dict(data)


def _validate_dotted(path: str, field_name: str) -> None:
    if not _DOTTED_PATH_RE.match(path.strip()):
        raise TemplateSelectorError(field_name, f"bad dotted path {path!r}")
