/** DOM wiring. Everything testable lives in api/state/render. */

import { ApiClient, ApiFailure } from "./api.js";
import {
  renderAdminTable,
  renderError,
  renderLoginForm,
  renderResults,
} from "./render.js";
import { AppState, initialState, loggedIn, loggedOut, navigate } from "./state.js";

const api = new ApiClient((url, init) => fetch(url, init));
let state: AppState = initialState();

const content = document.getElementById("content")!;
const searchForm = document.getElementById("search-form") as HTMLFormElement;
const portalSelect = document.getElementById("portal") as HTMLSelectElement;
const navSearch = document.getElementById("nav-search")!;
const navAdmin = document.getElementById("nav-admin")!;

async function populatePortals(): Promise<void> {
  try {
    const portals = await api.portals();
    portalSelect.innerHTML = portals
      .map((p) => `<option value="${p.portal_id}">${p.display_name}</option>`)
      .join("");
  } catch (err) {
    content.innerHTML = renderError(describe(err));
  }
}

function describe(err: unknown): string {
  return err instanceof ApiFailure ? err.message : "service unreachable";
}

function show(view: AppState["view"]): void {
  state = navigate(state, view);
  searchForm.hidden = state.view !== "search";
  if (state.view === "login") {
    content.innerHTML = renderLoginForm();
    wireLogin();
  } else if (state.view === "admin") {
    void refreshAdmin();
  } else {
    content.innerHTML = "";
  }
}

async function refreshAdmin(): Promise<void> {
  if (state.token === null) return;
  try {
    const listing = await api.scrapes(state.token);
    content.innerHTML = renderAdminTable(listing.entries, listing.total);
  } catch (err) {
    if (err instanceof ApiFailure && err.status === 401) {
      state = loggedOut(state);
      show("login");
      return;
    }
    content.innerHTML = renderError(describe(err));
  }
}

function wireLogin(): void {
  const form = document.getElementById("login-form") as HTMLFormElement;
  form.addEventListener("submit", async (event) => {
    event.preventDefault();
    const data = new FormData(form);
    try {
      const result = await api.login(
        String(data.get("username") ?? ""),
        String(data.get("password") ?? ""),
      );
      state = loggedIn(state, result.token);
      show("admin");
    } catch (err) {
      content.innerHTML = renderLoginForm() + renderError(describe(err));
      wireLogin();
    }
  });
}

searchForm.addEventListener("submit", async (event) => {
  event.preventDefault();
  const data = new FormData(searchForm);
  try {
    const outcome = await api.search(
      String(data.get("portal") ?? ""),
      String(data.get("q") ?? ""),
      String(data.get("category") ?? "keyword"),
    );
    content.innerHTML = renderResults(outcome);
  } catch (err) {
    content.innerHTML = renderError(describe(err));
  }
});

navSearch.addEventListener("click", () => show("search"));
navAdmin.addEventListener("click", () => show("admin"));

void populatePortals();
show("search");
