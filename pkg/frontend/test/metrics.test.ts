import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { mountApp } from "../src/app.js";
import { makeMockServer, twentyCellFindings } from "./mock_server.js";

async function flushAsync(rounds = 6): Promise<void> {
  for (let i = 0; i < rounds; i += 1) {
    await new Promise((resolve) => setTimeout(resolve, 0));
  }
}

function mountPoint(): HTMLElement {
  const root = document.createElement("div");
  root.id = "app";
  document.body.append(root);
  return root;
}

function metricsCell(name: string): string | undefined {
  return document.querySelector(`[data-cell="${name}"]`)?.textContent ?? undefined;
}

describe("metrics screen", () => {
  beforeEach(() => {
    window.history.replaceState(null, "", "/");
  });

  afterEach(() => {
    document.body.innerHTML = "";
    vi.unstubAllGlobals();
  });

  it("flips a suppressed cell to 1.00 after twenty TP verdicts, no reload", async () => {
    const server = makeMockServer(twentyCellFindings());
    vi.stubGlobal("fetch", server.fetch);
    window.history.replaceState(null, "", "/?view=metrics");

    const app = await mountApp(mountPoint(), new ApiClient(""));
    await flushAsync();
    expect(metricsCell("CON/DB")).toBe("-");

    // same document, navigate to flows via the tab bar
    document.querySelector<HTMLElement>('button[data-view="flows"]')?.click();
    await flushAsync();
    const rows = document.querySelectorAll("#flow-table tr.flow-row");
    expect(rows).toHaveLength(20);

    // select the first row, then record TP twenty times; each verdict
    // auto-advances the selection to the next unreviewed finding
    (rows[0] as HTMLElement).click();
    await flushAsync();
    for (let i = 0; i < 20; i += 1) {
      const tp = document.querySelector<HTMLButtonElement>(".triage-tp");
      expect(tp, `TP button missing at step ${i}`).not.toBeNull();
      tp?.click();
      await flushAsync();
    }
    expect(server.labels.size).toBe(20);
    expect([...server.labels.values()].every((v) => v === "TP")).toBe(true);

    // back to metrics through the tab bar: still no page reload
    document.querySelector<HTMLElement>('button[data-view="metrics"]')?.click();
    await flushAsync();
    expect(metricsCell("CON/DB")).toBe("1.00");
    expect(app.state.view).toBe("metrics");
  });

  it("updates live while mounted when a verdict is recorded elsewhere", async () => {
    const server = makeMockServer(twentyCellFindings(), 1);
    vi.stubGlobal("fetch", server.fetch);
    window.history.replaceState(null, "", "/?view=metrics");

    await mountApp(mountPoint(), new ApiClient(""));
    await flushAsync();
    expect(metricsCell("CON/DB")).toBe("-");

    const api = new ApiClient("");
    await api.label("cell00", "TP");
    document.dispatchEvent(new CustomEvent("pdflow:labels-changed"));
    await flushAsync();

    expect(metricsCell("CON/DB")).toBe("1.00");
  });

  it("nineteen reviewed findings keep the cell suppressed", async () => {
    const server = makeMockServer(twentyCellFindings());
    vi.stubGlobal("fetch", server.fetch);
    window.history.replaceState(null, "", "/?view=metrics");

    await mountApp(mountPoint(), new ApiClient(""));
    await flushAsync();

    const api = new ApiClient("");
    for (let i = 0; i < 19; i += 1) {
      await api.label(`cell${String(i).padStart(2, "0")}`, "TP");
    }
    document.dispatchEvent(new CustomEvent("pdflow:labels-changed"));
    await flushAsync();

    expect(metricsCell("CON/DB")).toBe("-");
    expect(document.querySelector("#metrics-note")?.textContent).toContain("19/20");
  });
});
