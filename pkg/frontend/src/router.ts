// URL-driven view state: the variable number lives in the path and the
// chart options in the query string, so every view is shareable and the
// browser's back/forward buttons restore it.

export interface ViewState {
  variable: number;
  kind: string | null;
  filter: Record<string, string>;
}

export function parseLocation(pathname: string, search: string): ViewState | null {
  const match = pathname.match(/^\/statistic\/(\d+)\/?$/);
  if (!match) return null;
  const params = new URLSearchParams(search);
  const filter: Record<string, string> = {};
  const filterExpr = params.get("filter");
  if (filterExpr) {
    for (const clause of filterExpr.split(",")) {
      const split = clause.indexOf(":");
      if (split > 0) {
        filter[clause.slice(0, split)] = clause.slice(split + 1);
      }
    }
  }
  return {
    variable: Number(match[1]),
    kind: params.get("kind"),
    filter,
  };
}

export function buildUrl(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.kind) params.set("kind", state.kind);
  const clauses = Object.entries(state.filter).map(([dim, cat]) => `${dim}:${cat}`);
  if (clauses.length) params.set("filter", clauses.join(","));
  const query = params.toString();
  return `/statistic/${state.variable}${query ? `?${query}` : ""}`;
}

export type NavigateHandler = (state: ViewState) => void;

export class Router {
  private handler: NavigateHandler;

  constructor(handler: NavigateHandler) {
    this.handler = handler;
    window.addEventListener("popstate", () => this.dispatch());
  }

  dispatch(): void {
    const state = parseLocation(window.location.pathname, window.location.search);
    if (state) this.handler(state);
  }

  navigate(state: ViewState): void {
    history.pushState(null, "", buildUrl(state));
    this.handler(state);
  }
}
