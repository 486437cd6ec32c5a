"""Operator command line.

Exit codes: 0 success, 1 domain failure (fixture mismatch, strict
not-found), 2 usage error.  ``--offline`` answers from the fixture
corpus and never opens a connection; it is the default for fixture-test
and opt-in for search.
"""

from __future__ import annotations

import json
import os
import sys

import click

from . import DEFAULT_CORPUS_DIR, DEFAULT_REGISTRY_PATH, __version__
from .clock import SystemClock
from .fetch import FixtureFetcher, HttpFetcher
from .fixturecheck import run_fixture_suite
from .harvest import CacheHit, NotFound, Scraped, run_search
from .politeness import FetchPolicy
from .portals import PortalUnknownError, InvalidQueryError, SearchQuery, load_registry
from .store import EntryFilter, open_store, serialize_records
from .templates import TemplateError, compile_template, load_template


@click.group()
@click.version_option(__version__)
@click.option("--portals", "portals_path", envvar="HARVESTER_PORTALS",
              default=str(DEFAULT_REGISTRY_PATH), show_default=True,
              help="Portal registry file.")
@click.option("--db", "db_path", envvar="HARVESTER_DB",
              default="harvester.db", show_default=True,
              help="Storage location.")
@click.pass_context
def main(ctx, portals_path, db_path):
    """Scholarly-article metadata harvester."""
    ctx.ensure_object(dict)
    ctx.obj["portals_path"] = portals_path
    ctx.obj["db_path"] = db_path


def _registry(ctx):
    try:
        return load_registry(ctx.obj["portals_path"])
    except Exception as exc:
        raise click.ClickException(f"cannot load portal registry: {exc}")


def _fetcher(offline: bool, policy: FetchPolicy, corpus: str):
    if offline:
        return FixtureFetcher(corpus)
    return HttpFetcher(user_agent=policy.user_agent, timeout_ms=policy.timeout_ms)


@main.command()
@click.option("--portal", required=True, help="Portal id to search.")
@click.option("--q", "keyword", required=True, help="Search keyword.")
@click.option("--category", default="keyword", show_default=True,
              type=click.Choice(["title", "author", "keyword"]))
@click.option("--max-pages", default=1, show_default=True, type=int)
@click.option("--offline", is_flag=True,
              help="Answer from the bundled fixture corpus; no live fetches.")
@click.option("--corpus", default=str(DEFAULT_CORPUS_DIR), show_default=True)
@click.option("--format", "output_format", default="table", show_default=True,
              type=click.Choice(["table", "records"]))
@click.option("--strict", is_flag=True, help="Exit 1 when nothing is found.")
@click.pass_context
def search(ctx, portal, keyword, category, max_pages, offline, corpus,
           output_format, strict):
    """Search one portal, cache-first."""
    registry = _registry(ctx)
    store = open_store(ctx.obj["db_path"])
    policy = FetchPolicy()
    fetcher = _fetcher(offline, policy, corpus)
    clock = SystemClock()
    query = SearchQuery(keyword=keyword, portal_id=portal, category=category,
                        max_pages=max_pages)
    try:
        outcome = run_search(query, registry, store, fetcher, policy, clock)
    except PortalUnknownError as exc:
        raise click.ClickException(str(exc))
    except InvalidQueryError as exc:
        raise click.UsageError(str(exc))

    if isinstance(outcome, NotFound):
        click.echo(f"not_found: {outcome.message}")
        if strict:
            sys.exit(1)
        return
    kind = "cache_hit" if isinstance(outcome, CacheHit) else "scraped"
    if output_format == "records":
        click.echo(serialize_records(outcome.records))
    else:
        click.echo(f"outcome: {kind} ({len(outcome.records)} records, "
                   f"entry {outcome.entry.display_id})")
        _print_table(outcome.records)


def _print_table(records):
    headers = ["Judul", "Pengarang", "Link", "Lokasi", "Download"]
    rows = [
        [r.title, ", ".join(r.authors), r.link, r.location,
         r.download_kind if r.download_kind != "none" else "-"]
        for r in records
    ]
    widths = [max(len(h), *(len(row[i]) for row in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    line = "  ".join(h.ljust(w) for h, w in zip(headers, widths))
    click.echo(line)
    click.echo("-" * len(line))
    for row in rows:
        click.echo("  ".join(cell.ljust(w) for cell, w in zip(row, widths)))


@main.command("template-check")
@click.option("--file", "template_path", required=True,
              type=click.Path(exists=True, dir_okay=False))
def template_check(template_path):
    """Compile a template file and report diagnostics."""
    try:
        template = load_template(template_path)
        compile_template(template)
    except TemplateError as exc:
        click.echo(f"FAIL: {exc}")
        sys.exit(1)
    click.echo("OK: template compiles with zero diagnostics")


@main.command("fixture-test")
@click.option("--corpus", default=str(DEFAULT_CORPUS_DIR), show_default=True,
              type=click.Path(exists=True, file_okay=False))
@click.pass_context
def fixture_test(ctx, corpus):
    """Check every fixture/expected pair in the corpus (always offline)."""
    registry = _registry(ctx)
    results = run_fixture_suite(registry, corpus)
    failed = 0
    for result in results:
        status = "PASS" if result.passed else "FAIL"
        click.echo(f"{status} {result.case}")
        for problem in result.problems:
            click.echo(f"    {problem}")
        if not result.passed:
            failed += 1
    click.echo(f"{len(results) - failed} passed, {failed} failed")
    if failed:
        sys.exit(1)


@main.command("db-init")
@click.pass_context
def db_init(ctx):
    """Create the storage schema (idempotent)."""
    store = open_store(ctx.obj["db_path"])
    click.echo(f"store ready at {ctx.obj['db_path']} "
               f"({store.entry_count()} entries)")


@main.command("admin-bootstrap")
@click.option("--user", "username", required=True)
@click.pass_context
def admin_bootstrap(ctx, username):
    """Create or replace an admin credential.

    The password comes from HARVESTER_ADMIN_PW or an interactive prompt,
    never from argv.
    """
    password = os.environ.get("HARVESTER_ADMIN_PW")
    if not password:
        password = click.prompt("Password", hide_input=True,
                                confirmation_prompt=True)
    store = open_store(ctx.obj["db_path"])
    store.create_admin(username, password, SystemClock().now())
    click.echo(f"admin {username!r} ready")


@main.command()
@click.option("--output", type=click.File("w"), default="-",
              help="Destination file; '-' for stdout.")
@click.pass_context
def export(ctx, output):
    """Emit all stored entries in the interchange form."""
    store = open_store(ctx.obj["db_path"])
    page = 1
    entries = []
    while True:
        result = store.list_entries(EntryFilter(page=page, page_size=200))
        entries.extend(result.entries)
        if page * 200 >= result.total:
            break
        page += 1
    payload = [e.to_dict() for e in entries]
    output.write(json.dumps(payload, ensure_ascii=False, separators=(",", ":")))
    output.write("\n")


@main.command()
@click.option("--listen", default="127.0.0.1:8080", show_default=True)
@click.option("--offline", is_flag=True,
              help="Serve against the fixture corpus instead of live portals.")
@click.option("--corpus", default=str(DEFAULT_CORPUS_DIR), show_default=True)
@click.option("--ui-dir", default=None,
              type=click.Path(exists=True, file_okay=False),
              help="Static assets for the web UI (mounted at /).")
@click.pass_context
def serve(ctx, listen, offline, corpus, ui_dir):
    """Run the HTTP service."""
    import uvicorn

    from .service import create_app

    registry = _registry(ctx)
    store = open_store(ctx.obj["db_path"])
    policy = FetchPolicy()
    fetcher = _fetcher(offline, policy, corpus)
    app = create_app(registry, store, fetcher, policy, static_dir=ui_dir)
    host, _, port = listen.partition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port or 8080))


if __name__ == "__main__":
    main()
