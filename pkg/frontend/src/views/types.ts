/**
 * Personal Data Type View: the category -> stem -> variant tree. Clicking a
 * stem is the reviewer's "next move": it jumps to the flows screen filtered
 * to that stem.
 */

import { ApiClient, ApiError } from "../api.js";
import { clear, el } from "../dom.js";
import { UiState } from "../state.js";

export interface TypesContext {
  api: ApiClient;
  state: UiState;
  setState(patch: Partial<UiState>): void;
}

export async function renderTypes(container: HTMLElement, ctx: TypesContext): Promise<void> {
  clear(container);
  let tree;
  try {
    tree = await ctx.api.types();
  } catch (err) {
    const message = err instanceof ApiError && err.status === 0
      ? "Review server unreachable. Is `pdflow serve` running?"
      : `API request failed: ${String(err)}`;
    container.append(el("div", { class: "banner banner-offline", role: "alert" }, message));
    return;
  }

  container.append(el("h2", {}, `Personal data (${tree.total})`));
  if (tree.categories.length === 0) {
    container.append(el("p", { class: "empty-state" }, "No personal data identified."));
    return;
  }

  const root = el("ul", { class: "type-tree", id: "type-tree" });
  for (const category of tree.categories) {
    const categoryDetails = el("details", { open: "" });
    categoryDetails.append(
      el("summary", { class: "tree-category" }, `${category.category} (${category.count})`),
    );
    const stems = el("ul", {});
    for (const stem of category.stems) {
      const stemDetails = el("details", {});
      const summary = el("summary", { class: "tree-stem" });
      const link = el(
        "button",
        { class: "stem-link", "data-stem": stem.name },
        `${stem.name} (${stem.count})`,
      );
      link.addEventListener("click", (event) => {
        event.preventDefault();
        ctx.setState({
          view: "flows",
          filters: [`stem:${stem.name}`],
          page: 1,
          selected: null,
        });
      });
      summary.append(link);
      stemDetails.append(summary);
      const variants = el("ul", {});
      for (const variant of stem.variants) {
        variants.append(
          el("li", { class: "tree-variant" }, `${variant.name} (${variant.count})`),
        );
      }
      stemDetails.append(variants);
      stems.append(el("li", {}, stemDetails));
    }
    categoryDetails.append(stems);
    root.append(el("li", {}, categoryDetails));
  }
  container.append(root);
}
