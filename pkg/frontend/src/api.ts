// API client. Responses are matched against a request sequence number so
// a slow earlier fetch can never overwrite a newer view.

import type { NavGroup, StatisticPayload, ChartSpec, TablePayload } from "./types.js";
import type { ViewState } from "./router.js";

let sequence = 0;

export function nextSequence(): number {
  return ++sequence;
}

export function currentSequence(): number {
  return sequence;
}

async function getJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    const detail = await response.text();
    throw new ApiError(response.status, detail);
  }
  return (await response.json()) as T;
}

export class ApiError extends Error {
  status: number;

  constructor(status: number, detail: string) {
    super(`API ${status}: ${detail}`);
    this.status = status;
  }
}

export function chartQuery(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.kind) params.set("kind", state.kind);
  const clauses = Object.entries(state.filter).map(([dim, cat]) => `${dim}:${cat}`);
  if (clauses.length) params.set("filter", clauses.join(","));
  const query = params.toString();
  return query ? `?${query}` : "";
}

export function fetchGroups(): Promise<{ groups: NavGroup[] }> {
  return getJson("/api/groups");
}

export function fetchStatistic(variable: number): Promise<StatisticPayload> {
  return getJson(`/api/statistic/${variable}`);
}

export function fetchChart(state: ViewState): Promise<ChartSpec> {
  return getJson(`/api/statistic/${state.variable}/chart${chartQuery(state)}`);
}

export function fetchTable(state: ViewState): Promise<TablePayload> {
  return getJson(`/api/statistic/${state.variable}/table${chartQuery(state)}`);
}

export function exportUrl(state: ViewState, format: "csv" | "svg"): string {
  const query = chartQuery(state);
  const separator = query ? "&" : "?";
  return `/api/statistic/${state.variable}/export${query}${separator}format=${format}`;
}
