/**
 * Source x sink heatmap: a color-scaled 10x6 grid, sources as rows.
 */

import { ApiClient, ApiError } from "../api.js";
import { clear, el } from "../dom.js";

export async function renderHeatmap(container: HTMLElement, api: ApiClient): Promise<void> {
  clear(container);
  let data;
  try {
    data = await api.heatmap();
  } catch (err) {
    const message = err instanceof ApiError && err.status === 0
      ? "Review server unreachable. Is `pdflow serve` running?"
      : `API request failed: ${String(err)}`;
    container.append(el("div", { class: "banner banner-offline", role: "alert" }, message));
    return;
  }

  container.append(el("h2", {}, `Flows by source and sink category (${data.total})`));
  const max = Math.max(1, ...data.matrix.flat());
  const table = el("table", { class: "heatmap", id: "heatmap" });
  const head = el("tr", {}, el("th", {}, ""));
  for (const sink of data.sinks) head.append(el("th", {}, sink));
  head.append(el("th", { class: "total" }, "total"));
  table.append(el("thead", {}, head));
  const body = el("tbody", {});
  data.sources.forEach((source, r) => {
    const tr = el("tr", {}, el("th", {}, source));
    data.matrix[r].forEach((value) => {
      const cell = el("td", { class: "heat-cell" }, value ? String(value) : "");
      const intensity = value / max;
      cell.style.background = `rgba(186, 32, 98, ${(0.85 * intensity).toFixed(3)})`;
      if (intensity > 0.55) cell.style.color = "#fff";
      tr.append(cell);
    });
    tr.append(el("td", { class: "total" }, String(data.row_totals[r])));
    body.append(tr);
  });
  const totals = el("tr", { class: "total" }, el("th", {}, "total"));
  for (const value of data.col_totals) totals.append(el("td", {}, String(value)));
  totals.append(el("td", {}, String(data.total)));
  body.append(totals);
  table.append(body);
  container.append(table);
}
