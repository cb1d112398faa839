/**
 * Application shell: tab navigation plus URL-backed state. Every screen is
 * re-rendered from API data on each state change; the URL query string is
 * the single source of UI state, so sessions are shareable and the back
 * button works.
 */

import { ApiClient } from "./api.js";
import { clear, el } from "./dom.js";
import { DEFAULT_STATE, readState, UiState, ViewName, writeState } from "./state.js";
import { renderFlows } from "./views/flows.js";
import { renderHeatmap } from "./views/heatmap.js";
import { renderMetrics } from "./views/metrics.js";
import { renderRopa } from "./views/ropa.js";
import { renderTypes } from "./views/types.js";

const TABS: { view: ViewName; label: string }[] = [
  { view: "types", label: "Types" },
  { view: "flows", label: "Flows" },
  { view: "heatmap", label: "Heatmap" },
  { view: "ropa", label: "ROPA" },
  { view: "metrics", label: "Metrics" },
];

export class App {
  state: UiState;
  private readonly content: HTMLElement;
  private readonly nav: HTMLElement;

  constructor(
    root: HTMLElement,
    private readonly api: ApiClient,
    private readonly win: Window = window,
  ) {
    this.state = { ...DEFAULT_STATE, ...readState(win) };
    this.nav = el("nav", { class: "tabs", id: "tabs" });
    this.content = el("main", { class: "content", id: "content" });
    clear(root);
    root.append(
      el("header", { class: "topbar" }, el("h1", {}, "pdflow review"), this.nav),
      this.content,
    );
    win.addEventListener("popstate", () => {
      this.state = readState(win);
      void this.render();
    });
  }

  setState = (patch: Partial<UiState>): void => {
    this.state = { ...this.state, ...patch };
    writeState(this.state, this.win);
    void this.render();
  };

  async render(): Promise<void> {
    clear(this.nav);
    for (const tab of TABS) {
      const button = el(
        "button",
        {
          class: this.state.view === tab.view ? "tab tab-active" : "tab",
          "data-view": tab.view,
        },
        tab.label,
      );
      button.addEventListener("click", () => this.setState({ view: tab.view, selected: null }));
      this.nav.append(button);
    }
    const ctx = { api: this.api, state: this.state, setState: this.setState };
    switch (this.state.view) {
      case "flows":
        await renderFlows(this.content, ctx);
        break;
      case "heatmap":
        await renderHeatmap(this.content, this.api);
        break;
      case "ropa":
        await renderRopa(this.content, this.api);
        break;
      case "metrics":
        await renderMetrics(this.content, this.api);
        break;
      default:
        await renderTypes(this.content, ctx);
    }
  }
}

export async function mountApp(root: HTMLElement, api: ApiClient, win?: Window): Promise<App> {
  const app = new App(root, api, win);
  await app.render();
  return app;
}
