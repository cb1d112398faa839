/**
 * UI state lives entirely in the URL query string so a review session is
 * shareable: pasting the link reproduces the same screen against the same
 * findings and labels.
 */

export type ViewName = "types" | "flows" | "heatmap" | "ropa" | "metrics";

export interface UiState {
  view: ViewName;
  groupBy: string;
  filters: string[]; // "key:value" entries
  selected: string | null;
  page: number;
}

export const DEFAULT_STATE: UiState = {
  view: "types",
  groupBy: "none",
  filters: [],
  selected: null,
  page: 1,
};

const VIEWS: ViewName[] = ["types", "flows", "heatmap", "ropa", "metrics"];

export function stateToQuery(state: UiState): string {
  const params = new URLSearchParams();
  if (state.view !== DEFAULT_STATE.view) params.set("view", state.view);
  if (state.groupBy !== DEFAULT_STATE.groupBy) params.set("group_by", state.groupBy);
  for (const filter of state.filters) params.append("filter", filter);
  if (state.selected) params.set("selected", state.selected);
  if (state.page !== 1) params.set("page", String(state.page));
  return params.toString();
}

export function stateFromQuery(query: string): UiState {
  const params = new URLSearchParams(query);
  const view = params.get("view") ?? DEFAULT_STATE.view;
  const page = Number(params.get("page") ?? "1");
  return {
    view: (VIEWS as string[]).includes(view) ? (view as ViewName) : DEFAULT_STATE.view,
    groupBy: params.get("group_by") ?? DEFAULT_STATE.groupBy,
    filters: params.getAll("filter"),
    selected: params.get("selected"),
    page: Number.isFinite(page) && page >= 1 ? Math.floor(page) : 1,
  };
}

export function readState(win: Window = window): UiState {
  return stateFromQuery(win.location.search.replace(/^\?/, ""));
}

export function writeState(state: UiState, win: Window = window): void {
  const query = stateToQuery(state);
  const url = query ? `?${query}` : win.location.pathname;
  win.history.pushState(null, "", url);
}
