from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings, strategies as st

from portal_harvester.extraction import ArticleRecord
from portal_harvester.store import (
    DeserializeError, EntryFilter, LengthViolationError, Store,
    StorageUnavailableError, deserialize_records, display_id,
    normalize_keyword, open_store, serialize_records)

NOW = datetime(2020, 1, 1, tzinfo=timezone.utc)


def record(link="http://x.example.org/a/1", title="T", kind="none",
           download=None):
    return ArticleRecord(portal_id="garuda", title=title, authors=("A",),
                         link=link, source_site="S", location="L",
                         download_url=download, download_kind=kind,
                         scraped_at=NOW)


# -- serialization ---------------------------------------------------------

timestamps = st.datetimes(
    min_value=datetime(1990, 1, 1), max_value=datetime(2100, 1, 1)
).map(lambda d: d.replace(tzinfo=timezone.utc, microsecond=0))

sane_text = st.text(
    alphabet=st.characters(blacklist_categories=("Cs",)), max_size=40)

records = st.builds(
    ArticleRecord,
    portal_id=st.sampled_from(["garuda", "isjd", "scholar"]),
    title=sane_text.map(lambda s: s or "t"),
    authors=st.lists(sane_text, max_size=4).map(tuple),
    link=st.integers(1, 10 ** 6).map(lambda n: f"http://x.example.org/a/{n}"),
    source_site=sane_text,
    location=sane_text,
    download_url=st.none() | st.just("http://x.example.org/f.pdf"),
    download_kind=st.sampled_from(["pdf", "none", "word", "other"]),
    scraped_at=timestamps,
)


@settings(max_examples=100)
@given(st.lists(records, max_size=8))
def test_serialize_round_trip(record_list):
    assert deserialize_records(serialize_records(record_list)) == record_list


def test_serialize_empty_list():
    assert serialize_records([]) == "[]"
    assert deserialize_records("[]") == []


def test_deserialize_rejects_garbage():
    for bad in ("not json", '{"a": 1}', '[{"title": "only"}]'):
        with pytest.raises(DeserializeError):
            deserialize_records(bad)


# -- display id ------------------------------------------------------------

@pytest.mark.parametrize("n,expected", [(1, "0001"), (42, "0042"),
                                        (9999, "9999"), (12345, "12345")])
def test_display_id(n, expected):
    assert display_id(n) == expected


def test_display_id_law():
    for n in (1, 7, 99, 1000, 9999):
        rendered = display_id(n)
        assert len(rendered) == 4
        assert int(rendered) == n


# -- keyword normalization -------------------------------------------------

def test_normalize_keyword():
    assert normalize_keyword("  Site   Mining ") == "site mining"
    assert normalize_keyword("SITE MINING") == normalize_keyword("site mining")


# -- schema / persistence --------------------------------------------------

def test_fresh_store_empty(store):
    assert store.entry_count() == 0


def test_init_schema_idempotent(tmp_path):
    path = tmp_path / "s.db"
    first = open_store(path)
    first.save("http://w", "k", "keyword", [record()], NOW)
    first.close()
    again = open_store(path)
    assert again.entry_count() == 1
    again.close()


def test_unwritable_path_raises(tmp_path):
    # a regular file cannot act as the parent directory of the db
    blocker = tmp_path / "blocker"
    blocker.write_text("x")
    with pytest.raises(StorageUnavailableError):
        Store(blocker / "s.db").init_schema()


def test_first_entry_displays_0001(store):
    entry = store.save("http://w", "k", "keyword", [record()], NOW)
    assert entry.display_id == "0001"


def test_save_exposes_table_fields(store):
    entry = store.save("http://garuda.dikti.go.id", "site mining", "keyword",
                       [record(download="http://x/f.pdf", kind="pdf")], NOW)
    assert entry.website == "http://garuda.dikti.go.id"
    assert entry.keyword == "site mining"
    assert entry.file_download == "http://x/f.pdf"
    assert entry.tgl_jam_update == NOW
    assert len(deserialize_records(entry.hasil)) == 1


def test_file_download_is_first_openaccess_link(store):
    entries = [record(link="http://x/1"),
               record(link="http://x/2", download="http://x/2.doc", kind="word"),
               record(link="http://x/3", download="http://x/3.pdf", kind="pdf")]
    entry = store.save("http://w", "k", "keyword", entries, NOW)
    assert entry.file_download == "http://x/2.doc"


@pytest.mark.parametrize("field,value", [
    ("website", "w" * 201),
    ("keyword", "k" * 401),
])
def test_length_violations(store, field, value):
    kwargs = {"website": "http://w", "keyword": "k"}
    kwargs[field] = value
    with pytest.raises(LengthViolationError):
        store.save(kwargs["website"], kwargs["keyword"], "keyword",
                   [record()], NOW)


def test_length_boundaries_accepted(store):
    store.save("w" * 200, "k" * 400, "keyword", [record()], NOW)


def test_save_requires_records(store):
    with pytest.raises(ValueError):
        store.save("http://w", "k", "keyword", [], NOW)


def test_lookup_miss_on_empty(store):
    assert store.lookup("http://w", "k", "keyword", NOW) is None


def test_lookup_round_trip_within_ttl(store):
    saved = [record(link="http://x/1"), record(link="http://x/2")]
    store.save("http://w", "k", "keyword", saved, NOW)
    found = store.lookup("http://w", "k", "keyword",
                         NOW + timedelta(days=1), ttl=timedelta(days=7))
    assert found is not None
    entry, recs = found
    assert recs == saved


def test_lookup_expired_entry_is_a_miss(store):
    store.save("http://w", "k", "keyword", [record()], NOW)
    late = NOW + timedelta(days=8)
    assert store.lookup("http://w", "k", "keyword", late,
                        ttl=timedelta(days=7)) is None


def test_category_distinguishes_entries(store):
    store.save("http://w", "k", "title", [record(link="http://x/1")], NOW)
    store.save("http://w", "k", "author", [record(link="http://x/2")], NOW)
    assert store.entry_count() == 2
    assert store.lookup("http://w", "k", "keyword", NOW) is None


def test_upsert_replaces_and_keeps_single_row(store):
    first = store.save("http://w", "k", "keyword", [record(title="old")], NOW)
    later = NOW + timedelta(hours=2)
    second = store.save("http://w", "k", "keyword", [record(title="new")], later)
    assert store.entry_count() == 1
    assert second.id == first.id
    assert second.tgl_jam_update >= first.tgl_jam_update
    _, recs = store.lookup("http://w", "k", "keyword", later)
    assert recs[0].title == "new"


def test_list_entries_pagination_and_order(store):
    for i in range(3):
        store.save(f"http://w{i}", "k", "keyword",
                   [record(link=f"http://x/{i}")],
                   NOW + timedelta(minutes=i))
    page1 = store.list_entries(EntryFilter(page=1, page_size=2))
    page2 = store.list_entries(EntryFilter(page=2, page_size=2))
    assert page1.total == 3
    assert [e.website for e in page1.entries] == ["http://w2", "http://w1"]
    assert [e.website for e in page2.entries] == ["http://w0"]


def test_list_entries_website_filter(store):
    store.save("http://garuda.dikti.go.id", "a", "keyword", [record()], NOW)
    store.save("http://isjd.pdii.lipi.go.id", "b", "keyword",
               [record(link="http://x/2")], NOW)
    page = store.list_entries(EntryFilter(website_contains="garuda"))
    # oracle: linear scan
    everything = store.list_entries(EntryFilter())
    expected = [e for e in everything.entries if "garuda" in e.website]
    assert page.entries == expected
    assert page.total == 1


def test_bad_filter_rejected(store):
    with pytest.raises(ValueError):
        store.list_entries(EntryFilter(page_size=0))
    with pytest.raises(ValueError):
        store.list_entries(EntryFilter(page_size=201))


# -- admin auth ------------------------------------------------------------

def test_authenticate_issues_token(store):
    store.create_admin("root", "sup3r secret", NOW)
    result = store.authenticate_admin("root", "sup3r secret", NOW)
    assert result is not None
    token, expires = result
    assert len(token) >= 32
    assert expires > NOW
    assert store.validate_token(token, NOW)


def test_rejections_uniform(store):
    store.create_admin("root", "pw", NOW)
    wrong_password = store.authenticate_admin("root", "nope", NOW)
    unknown_user = store.authenticate_admin("ghost", "nope", NOW)
    assert wrong_password is None
    assert unknown_user is None


def test_token_expiry(store):
    store.create_admin("root", "pw", NOW)
    token, expires = store.authenticate_admin("root", "pw", NOW)
    assert store.validate_token(token, expires)
    assert not store.validate_token(token, expires + timedelta(seconds=1))


def test_no_plaintext_password_on_disk(tmp_path):
    path = tmp_path / "s.db"
    s = open_store(path)
    s.create_admin("root", "hunter2-very-secret", NOW)
    s.close()
    raw = path.read_bytes()
    assert b"hunter2-very-secret" not in raw
