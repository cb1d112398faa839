/**
 * Detailed Flow View: the groupable/filterable findings table, the snippet
 * drill-down panel, and the TP/FP triage controls.
 *
 * Columns are exactly Path, Source, Sink, Sink Type, Flow Pattern Instance.
 * Clicking a row (or pressing j/k) selects it and loads its code snippet;
 * t/f/u record a verdict and advance to the next unreviewed row.
 */

import { ApiClient, ApiError, FindingsPage, FlowRow, Snippet, Verdict } from "../api.js";
import { clear, el, option } from "../dom.js";
import { UiState } from "../state.js";

export const GROUP_KEYS = [
  "none",
  "source-stem",
  "source-category",
  "sink-category",
  "sink-name",
  "file",
  "pattern-shape",
];

export const LABELS_CHANGED_EVENT = "pdflow:labels-changed";

export interface FlowsContext {
  api: ApiClient;
  state: UiState;
  setState(patch: Partial<UiState>): void;
}

function offlineBanner(err: unknown): HTMLElement {
  const message = err instanceof ApiError && err.status === 0
    ? "Review server unreachable. Is `pdflow serve` running?"
    : `API request failed: ${String(err)}`;
  return el("div", { class: "banner banner-offline", role: "alert" }, message);
}

function flatRows(page: FindingsPage): FlowRow[] {
  return page.groups.flatMap((group) => group.rows);
}

export async function renderFlows(container: HTMLElement, ctx: FlowsContext): Promise<void> {
  clear(container);
  let page: FindingsPage;
  try {
    page = await ctx.api.findings({
      groupBy: ctx.state.groupBy,
      filters: ctx.state.filters,
      page: ctx.state.page,
      pageSize: 200,
    });
  } catch (err) {
    container.append(offlineBanner(err));
    return;
  }

  const rows = flatRows(page);
  const controls = buildControls(ctx, page);
  const layout = el("div", { class: "flows-layout" });
  const tablePane = el("div", { class: "flows-table-pane" });
  const sidePane = el("aside", { class: "snippet-pane", id: "snippet-pane" });
  layout.append(tablePane, sidePane);
  container.append(controls, layout);

  if (rows.length === 0) {
    tablePane.append(
      el("p", { class: "empty-state" }, "No flows match the current filters."),
    );
    return;
  }

  const table = el("table", { class: "flow-table", id: "flow-table" });
  const head = el(
    "tr",
    {},
    ...["Path", "Source", "Sink", "Sink Type", "Flow Pattern Instance"].map((h) =>
      el("th", {}, h),
    ),
  );
  table.append(el("thead", {}, head));

  for (const group of page.groups) {
    const body = el("tbody", {});
    if (group.key !== null) {
      const header = el("tr", { class: "group-row" });
      header.append(
        el("td", { colspan: "5" }, `${group.key} (${group.rows.length})`),
      );
      body.append(header);
    }
    for (const row of group.rows) {
      body.append(buildRow(row, ctx));
    }
    table.append(body);
  }
  tablePane.append(table);

  if (ctx.state.selected) {
    const selected = rows.find((r) => r.id === ctx.state.selected);
    if (selected) {
      highlightSelection(table, selected.id);
      void renderSnippet(sidePane, ctx, selected);
    }
  }

  installKeyboard(container, ctx, rows);
}

function buildControls(ctx: FlowsContext, page: FindingsPage): HTMLElement {
  const groupSelect = el("select", { id: "group-by", "aria-label": "Group by" });
  for (const key of GROUP_KEYS) {
    groupSelect.append(option(key, key === "none" ? "no grouping" : key, ctx.state.groupBy === key));
  }
  groupSelect.addEventListener("change", () =>
    ctx.setState({ groupBy: groupSelect.value, page: 1 }),
  );

  const filterInput = el("input", {
    id: "filter-input",
    placeholder: "filter key:value (e.g. stem:email)",
  }) as HTMLInputElement;
  const addFilter = el("button", { id: "add-filter" }, "add filter");
  addFilter.addEventListener("click", () => {
    const value = filterInput.value.trim();
    if (value.includes(":")) {
      ctx.setState({ filters: [...ctx.state.filters, value], page: 1, selected: null });
    }
  });
  filterInput.addEventListener("keydown", (event) => {
    if (event.key === "Enter") addFilter.click();
  });

  const chips = el("span", { class: "filter-chips" });
  ctx.state.filters.forEach((filter, index) => {
    const chip = el("button", { class: "chip", title: "remove filter" }, `${filter} ×`);
    chip.addEventListener("click", () => {
      const filters = ctx.state.filters.filter((_, i) => i !== index);
      ctx.setState({ filters, page: 1, selected: null });
    });
    chips.append(chip);
  });

  const prev = el("button", { id: "page-prev" }, "prev");
  const next = el("button", { id: "page-next" }, "next");
  (prev as HTMLButtonElement).disabled = page.page <= 1;
  (next as HTMLButtonElement).disabled = page.page * page.page_size >= page.total;
  prev.addEventListener("click", () => ctx.setState({ page: Math.max(1, ctx.state.page - 1) }));
  next.addEventListener("click", () => ctx.setState({ page: ctx.state.page + 1 }));

  const summary = el(
    "span",
    { class: "table-summary", id: "table-summary" },
    `${page.total} flow(s)`,
  );

  return el(
    "div",
    { class: "controls" },
    el("label", { for: "group-by" }, "group by "),
    groupSelect,
    filterInput,
    addFilter,
    chips,
    prev,
    next,
    summary,
  );
}

function buildRow(row: FlowRow, ctx: FlowsContext): HTMLElement {
  const tr = el(
    "tr",
    { class: "flow-row", "data-id": row.id, "data-verdict": row.verdict },
    el("td", { class: "cell-path" }, row.path),
    el("td", { class: "cell-source" }, row.source),
    el("td", { class: "cell-sink" }, row.sink),
    el("td", { class: "cell-sink-type" }, row.sink_type),
    el(
      "td",
      { class: "cell-instance" },
      el("code", {}, row.instance),
      row.verdict !== "Unreviewed"
        ? el("span", { class: `verdict verdict-${row.verdict.toLowerCase()}` }, ` ${row.verdict}`)
        : "",
    ),
  );
  tr.addEventListener("click", () => ctx.setState({ selected: row.id }));
  return tr;
}

function highlightSelection(table: HTMLElement, id: string): void {
  table.querySelectorAll("tr.selected").forEach((n) => n.classList.remove("selected"));
  const row = table.querySelector(`tr[data-id="${id}"]`);
  row?.classList.add("selected");
}

export async function renderSnippet(
  pane: HTMLElement,
  ctx: FlowsContext,
  row: FlowRow,
): Promise<void> {
  clear(pane);
  pane.append(el("h3", {}, "Flow detail"));
  const meta = el(
    "dl",
    { class: "snippet-meta" },
    el("dt", {}, "File"),
    el("dd", { id: "snippet-path" }, row.path),
    el("dt", {}, "Rule"),
    el("dd", { id: "snippet-rule" }, "…"),
    el("dt", {}, "Flow pattern"),
    el("dd", {}, el("code", { id: "snippet-instance" }, row.instance)),
    el("dt", {}, "Source"),
    el("dd", { id: "snippet-source" }, row.source),
    el("dt", {}, "Sink"),
    el("dd", { id: "snippet-sink" }, row.sink),
  );
  pane.append(meta);

  const codeBox = el("pre", { class: "snippet-code", id: "snippet-code" }, "loading…");
  pane.append(codeBox);
  pane.append(buildTriageControls(ctx, row));

  let snippet: Snippet;
  try {
    snippet = await ctx.api.snippet(row.id);
  } catch (err) {
    codeBox.textContent =
      err instanceof ApiError && err.status === 404
        ? "(source file not available under the scan root)"
        : `snippet unavailable: ${String(err)}`;
    return;
  }
  const rule = pane.querySelector("#snippet-rule");
  if (rule) rule.textContent = snippet.rule;
  codeBox.textContent = "";
  snippet.lines.forEach((line, index) => {
    const lineNo = snippet.first_line + index;
    const inSpan = lineNo >= snippet.span[0] && lineNo <= snippet.span[2];
    codeBox.append(
      el(
        "span",
        { class: inSpan ? "code-line code-line-hit" : "code-line" },
        `${String(lineNo).padStart(5)}  ${line}\n`,
      ),
    );
  });
}

function buildTriageControls(ctx: FlowsContext, row: FlowRow): HTMLElement {
  const note = el("input", {
    id: "triage-note",
    placeholder: "review note (optional)",
  }) as HTMLInputElement;
  const status = el("span", { class: "triage-status", id: "triage-status" });

  const verdictButton = (verdict: Verdict, label: string) => {
    const button = el("button", { class: `triage triage-${verdict.toLowerCase()}` }, label);
    button.addEventListener("click", async () => {
      try {
        await ctx.api.label(row.id, verdict, note.value || undefined);
      } catch (err) {
        status.textContent = `write failed: ${String(err)}`;
        status.classList.add("triage-error");
        return;
      }
      status.textContent = `${verdict} recorded`;
      status.classList.remove("triage-error");
      document.dispatchEvent(
        new CustomEvent(LABELS_CHANGED_EVENT, { detail: { id: row.id, verdict } }),
      );
      advanceToNextUnreviewed(ctx, row.id);
    });
    return button;
  };

  return el(
    "div",
    { class: "triage-controls" },
    verdictButton("TP", "TP (t)"),
    verdictButton("FP", "FP (f)"),
    verdictButton("Unreviewed", "clear (u)"),
    note,
    status,
  );
}

function advanceToNextUnreviewed(ctx: FlowsContext, currentId: string): void {
  const table = document.getElementById("flow-table");
  if (!table) return;
  const rows = Array.from(table.querySelectorAll<HTMLElement>("tr.flow-row"));
  const current = rows.findIndex((r) => r.dataset.id === currentId);
  const labelled = new Set([currentId]);
  for (let offset = 1; offset <= rows.length; offset += 1) {
    const candidate = rows[(current + offset) % rows.length];
    if (candidate.dataset.verdict === "Unreviewed" && !labelled.has(candidate.dataset.id ?? "")) {
      ctx.setState({ selected: candidate.dataset.id ?? null });
      return;
    }
  }
}

type KeyedElement = HTMLElement & { _flowsKeyHandler?: (event: KeyboardEvent) => void };

function installKeyboard(container: HTMLElement, ctx: FlowsContext, rows: FlowRow[]): void {
  container.tabIndex = 0;
  const keyed = container as KeyedElement;
  if (keyed._flowsKeyHandler) {
    container.removeEventListener("keydown", keyed._flowsKeyHandler);
  }
  const handler = (event: KeyboardEvent) => {
    const target = event.target as HTMLElement | null;
    if (target && target.tagName === "INPUT") return;
    const index = rows.findIndex((r) => r.id === ctx.state.selected);
    if (event.key === "j") {
      const next = rows[Math.min(rows.length - 1, index + 1)];
      if (next) ctx.setState({ selected: next.id });
    } else if (event.key === "k") {
      const prev = rows[Math.max(0, index <= 0 ? 0 : index - 1)];
      if (prev) ctx.setState({ selected: prev.id });
    } else if (event.key === "t" || event.key === "f" || event.key === "u") {
      const verdict: Verdict = event.key === "t" ? "TP" : event.key === "f" ? "FP" : "Unreviewed";
      const selector = `.triage-${verdict.toLowerCase()}`;
      (document.querySelector(selector) as HTMLButtonElement | null)?.click();
    } else if (event.key === "n") {
      const unreviewed = rows.find((r) => r.verdict === "Unreviewed");
      if (unreviewed) ctx.setState({ selected: unreviewed.id });
    }
  };
  keyed._flowsKeyHandler = handler;
  container.addEventListener("keydown", handler);
}
