from __future__ import annotations

from datetime import datetime, timezone

import pytest

from portal_harvester import DEFAULT_CORPUS_DIR, DEFAULT_REGISTRY_PATH
from portal_harvester.clock import FakeClock
from portal_harvester.fetch import CountingFetcher, FixtureFetcher
from portal_harvester.politeness import FetchPolicy
from portal_harvester.portals import load_registry
from portal_harvester.store import open_store

EPOCH = datetime(2020, 1, 1, tzinfo=timezone.utc)


@pytest.fixture(scope="session")
def registry():
    return load_registry(DEFAULT_REGISTRY_PATH)


@pytest.fixture(scope="session")
def corpus_dir():
    return DEFAULT_CORPUS_DIR


@pytest.fixture
def fixture_fetcher(corpus_dir):
    return FixtureFetcher(corpus_dir)


@pytest.fixture
def counting_fetcher(fixture_fetcher):
    return CountingFetcher(inner=fixture_fetcher)


@pytest.fixture
def clock():
    return FakeClock(EPOCH)


@pytest.fixture
def store(tmp_path):
    s = open_store(tmp_path / "test.db")
    yield s
    s.close()


@pytest.fixture
def policy():
    # zero interval keeps orchestration tests fast; pacing has its own tests
    return FetchPolicy(min_interval_ms=0)
