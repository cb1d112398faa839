/**
 * Precision metrics: TP/(TP+FP) per (source category, sink category) cell,
 * "-" where fewer than the threshold have been reviewed. Re-fetches after
 * every recorded verdict while mounted, so cells flip live.
 */

import { ApiClient, ApiError } from "../api.js";
import { clear, el } from "../dom.js";
import { LABELS_CHANGED_EVENT } from "./flows.js";

export async function renderMetrics(container: HTMLElement, api: ApiClient): Promise<void> {
  clear(container);
  const body = el("div", { id: "metrics-body" });
  container.append(body);

  const refresh = async () => {
    let data;
    try {
      data = await api.metrics();
    } catch (err) {
      const message = err instanceof ApiError && err.status === 0
        ? "Review server unreachable. Is `pdflow serve` running?"
        : `API request failed: ${String(err)}`;
      clear(body);
      body.append(el("div", { class: "banner banner-offline", role: "alert" }, message));
      return;
    }
    clear(body);
    body.append(el("h2", {}, "Precision by source and sink category"));
    const table = el("table", { class: "metrics", id: "metrics-table" });
    const head = el("tr", {}, el("th", {}, ""));
    for (const sink of data.sinks) head.append(el("th", {}, sink));
    table.append(el("thead", {}, head));
    const rows = el("tbody", {});
    data.sources.forEach((source, r) => {
      const tr = el("tr", {}, el("th", {}, source));
      data.cells[r].forEach((cell, c) => {
        const td = el(
          "td",
          {
            class: cell.suppressed ? "metric-cell suppressed" : "metric-cell",
            "data-cell": `${source}/${data.sinks[c]}`,
            title: `TP ${cell.tp} / FP ${cell.fp}`,
          },
          cell.rendered,
        );
        tr.append(td);
      });
      rows.append(tr);
    });
    table.append(rows);
    body.append(table);
    body.append(
      el(
        "p",
        { class: "metrics-note", id: "metrics-note" },
        `reviewed ${data.reviewed}/${data.total} findings (coverage ${(data.coverage * 100).toFixed(0)}%); ` +
          `cells with fewer than ${data.threshold} reviewed results show "-"`,
      ),
    );
  };

  type KeyedDocument = Document & { _metricsListener?: () => void };
  const doc = document as KeyedDocument;
  if (doc._metricsListener) {
    document.removeEventListener(LABELS_CHANGED_EVENT, doc._metricsListener);
  }
  const listener = () => {
    if (document.getElementById("metrics-body")) {
      void refresh();
    } else {
      document.removeEventListener(LABELS_CHANGED_EVENT, listener);
      if (doc._metricsListener === listener) delete doc._metricsListener;
    }
  };
  doc._metricsListener = listener;
  document.addEventListener(LABELS_CHANGED_EVENT, listener);
  await refresh();
}
