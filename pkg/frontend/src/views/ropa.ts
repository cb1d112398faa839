/**
 * ROPA summary: the four code-derivable sections, straight from the API.
 */

import { ApiClient, ApiError } from "../api.js";
import { clear, el } from "../dom.js";

function countList(counts: Record<string, number>): HTMLElement {
  const entries = Object.entries(counts);
  if (entries.length === 0) return el("p", { class: "empty-state" }, "none identified");
  const list = el("ul", {});
  for (const [abbr, count] of entries) {
    list.append(el("li", {}, `${abbr}: ${count} flow(s)`));
  }
  return list;
}

export async function renderRopa(container: HTMLElement, api: ApiClient): Promise<void> {
  clear(container);
  let data;
  try {
    data = await api.ropa();
  } catch (err) {
    const message = err instanceof ApiError && err.status === 0
      ? "Review server unreachable. Is `pdflow serve` running?"
      : `API request failed: ${String(err)}`;
    container.append(el("div", { class: "banner banner-offline", role: "alert" }, message));
    return;
  }

  container.append(el("h2", {}, "ROPA summary"));

  container.append(el("h3", {}, "Categories of personal data"));
  container.append(
    data.categories_of_personal_data.length
      ? el("p", { id: "ropa-categories" }, data.categories_of_personal_data.join(", "))
      : el("p", { class: "empty-state" }, "none identified"),
  );

  container.append(el("h3", {}, "Categories of processing"));
  const processing = Object.entries(data.categories_of_processing);
  if (processing.length) {
    const list = el("ul", {});
    for (const [sink, sources] of processing) {
      list.append(el("li", {}, `${sink}: ${sources.join(", ")}`));
    }
    container.append(list);
  } else {
    container.append(el("p", { class: "empty-state" }, "none identified"));
  }

  container.append(el("h3", {}, "Transfer to a database or third-party APIs"));
  container.append(countList(data.database_or_third_party_transfers));

  container.append(el("h3", {}, "Data encryption or anonymization"));
  container.append(countList(data.encryption_or_anonymization));

  container.append(el("h3", {}, "Personal data logging"));
  container.append(countList(data.logging));

  container.append(
    el(
      "p",
      { class: "ropa-note" },
      "Retention schedules, recipients, and third-country transfers require manual entry; see the markdown export.",
    ),
  );
}
