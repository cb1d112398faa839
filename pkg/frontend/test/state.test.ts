import { describe, expect, it } from "vitest";

import { DEFAULT_STATE, stateFromQuery, stateToQuery, UiState } from "../src/state.js";

describe("UI state <-> URL query", () => {
  it("round-trips every field", () => {
    const state: UiState = {
      view: "flows",
      groupBy: "sink-category",
      filters: ["stem:email", "confidence:high"],
      selected: "f03",
      page: 3,
    };
    expect(stateFromQuery(stateToQuery(state))).toEqual(state);
  });

  it("defaults produce an empty query", () => {
    expect(stateToQuery(DEFAULT_STATE)).toBe("");
    expect(stateFromQuery("")).toEqual(DEFAULT_STATE);
  });

  it("ignores junk values", () => {
    const state = stateFromQuery("view=bogus&page=-2");
    expect(state.view).toBe("types");
    expect(state.page).toBe(1);
  });

  it("keeps filter order", () => {
    const state = stateFromQuery("filter=stem:email&filter=sink-category:DB");
    expect(state.filters).toEqual(["stem:email", "sink-category:DB"]);
  });
});
