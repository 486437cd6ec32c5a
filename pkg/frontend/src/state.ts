/**
 * View-level state. The admin token lives only in memory; a page
 * reload always sends the operator back through the login form.
 */

export type View = "search" | "login" | "admin";

export interface AppState {
  view: View;
  token: string | null;
}

export function initialState(): AppState {
  return { view: "search", token: null };
}

/** Navigating to the admin area requires a token; otherwise login. */
export function navigate(state: AppState, target: View): AppState {
  if (target === "admin" && state.token === null) {
    return { ...state, view: "login" };
  }
  return { ...state, view: target };
}

export function loggedIn(state: AppState, token: string): AppState {
  return { view: "admin", token };
}

export function loggedOut(state: AppState): AppState {
  return { view: "search", token: null };
}
