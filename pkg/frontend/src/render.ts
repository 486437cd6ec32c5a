/**
 * HTML rendering as pure string functions. Keeping these free of DOM
 * calls lets the test suite assert on output without a browser.
 */

import type { ArticleRecord, ScrapeEntry, SearchOutcome } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function recordRow(record: ArticleRecord): string {
  const download =
    record.download_url === null
      ? "-"
      : `<a href="${escapeHtml(record.download_url)}">${escapeHtml(record.download_kind)}</a>`;
  return `<tr>
    <td><a href="${escapeHtml(record.link)}">${escapeHtml(record.title)}</a></td>
    <td>${escapeHtml(record.authors.join(", "))}</td>
    <td>${escapeHtml(record.location)}</td>
    <td>${download}</td>
  </tr>`;
}

export function renderResults(outcome: SearchOutcome): string {
  if (outcome.kind === "not_found") {
    return `<div class="panel panel-empty">${escapeHtml(outcome.message ?? "")}</div>`;
  }
  const origin = outcome.kind === "cache_hit" ? "from cache" : "freshly scraped";
  const rows = outcome.records.map(recordRow).join("\n");
  return `<p class="result-origin">${outcome.records.length} records (${origin})</p>
<table class="results">
  <thead><tr><th>Judul</th><th>Pengarang</th><th>Lokasi</th><th>Download</th></tr></thead>
  <tbody>
${rows}
  </tbody>
</table>`;
}

export function renderError(message: string): string {
  return `<div class="panel panel-error">${escapeHtml(message)}</div>`;
}

export function renderLoginForm(): string {
  return `<form id="login-form" class="panel">
  <label>Username <input name="username" autocomplete="username"></label>
  <label>Password <input name="password" type="password" autocomplete="current-password"></label>
  <button type="submit">Log in</button>
</form>`;
}

export function renderAdminTable(entries: ScrapeEntry[], total: number): string {
  const rows = entries
    .map(
      (e) => `<tr>
    <td>${escapeHtml(e.display_id)}</td>
    <td>${escapeHtml(e.website)}</td>
    <td>${escapeHtml(e.keyword)}</td>
    <td>${escapeHtml(e.category)}</td>
    <td>${e.record_count}</td>
    <td>${escapeHtml(e.tgl_jam_update)}</td>
  </tr>`,
    )
    .join("\n");
  return `<p>${total} stored scrapes</p>
<table class="scrapes">
  <thead><tr><th>ID</th><th>Website</th><th>Keyword</th><th>Category</th><th>Records</th><th>Updated</th></tr></thead>
  <tbody>
${rows}
  </tbody>
</table>`;
}
