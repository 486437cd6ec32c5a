"""Fixture-vs-expected verification over the bundled corpus.

Each ``fixtures/<portal_id>/<case>.expected`` file pins the exact record
list (interchange form) its sibling ``.html``/``.json`` page must
extract.  Used both by ``harvester fixture-test`` and by the test suite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .extraction import (InvalidLinkError, MissingTitleError, extract_records,
                         normalize_record, parse_timestamp)
from .portals import PortalRegistry
from .templates import compile_template

_PAYLOAD_SUFFIXES = (".html", ".json")


@dataclass
class CaseResult:
    case: str
    passed: bool
    problems: list[str] = field(default_factory=list)


def iter_cases(corpus_dir: Path):
    for expected_path in sorted(corpus_dir.glob("*/*.expected")):
        yield expected_path


def check_case(expected_path: Path, registry: PortalRegistry) -> CaseResult:
    portal_id = expected_path.parent.name
    case = f"{portal_id}/{expected_path.stem}"
    result = CaseResult(case=case, passed=False)

    payload_path = None
    for suffix in _PAYLOAD_SUFFIXES:
        candidate = expected_path.with_suffix(suffix)
        if candidate.exists():
            payload_path = candidate
            break
    if payload_path is None:
        result.problems.append("no payload file beside .expected")
        return result

    try:
        expected = json.loads(expected_path.read_text(encoding="utf-8"))
        portal = registry.get(portal_id)
        compiled = compile_template(portal.template)
        now = parse_timestamp(expected["scraped_at"])
        extraction = extract_records(payload_path.read_bytes(), compiled,
                                     expected["base_url"])
        records = []
        skipped = extraction.skipped
        for raw in extraction.records:
            try:
                records.append(normalize_record(raw, compiled,
                                                expected["base_url"], now))
            except (InvalidLinkError, MissingTitleError):
                skipped += 1
    except Exception as exc:
        result.problems.append(f"error: {exc!r}")
        return result

    actual = [r.to_dict() for r in records]
    if actual != expected["records"]:
        result.problems.append(
            f"records differ: got {len(actual)}, expected "
            f"{len(expected['records'])}")
        for i, (got, want) in enumerate(zip(actual, expected["records"])):
            if got != want:
                result.problems.append(f"first differing record at index {i}")
                break
    if skipped != expected.get("skipped", 0):
        result.problems.append(
            f"skipped count {skipped} != expected {expected.get('skipped', 0)}")
    result.passed = not result.problems
    return result


def run_fixture_suite(registry: PortalRegistry,
                      corpus_dir: str | Path) -> list[CaseResult]:
    return [check_case(path, registry) for path in iter_cases(Path(corpus_dir))]
