/**
 * Typed client for the harvester HTTP API.
 *
 * All business logic stays on the server; this module only shapes
 * requests and narrows responses. The fetch function is injectable so
 * tests can run without a browser or a live service.
 */

export interface PortalInfo {
  portal_id: string;
  display_name: string;
  categories: string[];
}

export interface ArticleRecord {
  portal_id: string;
  title: string;
  authors: string[];
  link: string;
  source_site: string;
  location: string;
  download_url: string | null;
  download_kind: string;
  scraped_at: string;
}

export interface ScrapeEntry {
  id: number;
  display_id: string;
  website: string;
  keyword: string;
  category: string;
  record_count: number;
  file_download: string | null;
  tgl_jam_update: string;
}

export interface SearchOutcome {
  kind: "cache_hit" | "scraped" | "not_found";
  records: ArticleRecord[];
  entry: ScrapeEntry | null;
  message?: string;
}

export interface ScrapeListing {
  total: number;
  page: number;
  page_size: number;
  entries: ScrapeEntry[];
}

export interface LoginResult {
  token: string;
  expires_at: string;
}

export class ApiFailure extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ status: number; json(): Promise<unknown> }>;

async function unwrap<T>(response: {
  status: number;
  json(): Promise<unknown>;
}): Promise<T> {
  const body = (await response.json()) as Record<string, unknown>;
  if (response.status >= 400) {
    throw new ApiFailure(
      response.status,
      String(body["code"] ?? "unknown"),
      String(body["message"] ?? "request failed"),
    );
  }
  return body as T;
}

export class ApiClient {
  constructor(
    private readonly fetchFn: FetchLike,
    private readonly base: string = "",
  ) {}

  async portals(): Promise<PortalInfo[]> {
    const response = await this.fetchFn(`${this.base}/api/portals`);
    const body = await response.json();
    if (response.status >= 400) {
      const err = body as { code?: string; message?: string };
      throw new ApiFailure(response.status, err.code ?? "unknown", err.message ?? "");
    }
    return body as PortalInfo[];
  }

  async search(
    portal: string,
    q: string,
    category = "keyword",
    maxPages = 1,
  ): Promise<SearchOutcome> {
    const params = new URLSearchParams({
      portal,
      q,
      category,
      max_pages: String(maxPages),
    });
    const response = await this.fetchFn(`${this.base}/api/search?${params}`);
    return unwrap<SearchOutcome>(response);
  }

  async login(username: string, password: string): Promise<LoginResult> {
    const response = await this.fetchFn(`${this.base}/api/admin/login`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ username, password }),
    });
    return unwrap<LoginResult>(response);
  }

  async scrapes(
    token: string,
    filter: { website?: string; keyword?: string; page?: number } = {},
  ): Promise<ScrapeListing> {
    const params = new URLSearchParams();
    if (filter.website) params.set("website", filter.website);
    if (filter.keyword) params.set("keyword", filter.keyword);
    if (filter.page) params.set("page", String(filter.page));
    const query = params.toString();
    const url = `${this.base}/api/admin/scrapes${query ? "?" + query : ""}`;
    const response = await this.fetchFn(url, {
      headers: { Authorization: `Bearer ${token}` },
    });
    return unwrap<ScrapeListing>(response);
  }
}
