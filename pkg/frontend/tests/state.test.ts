import { describe, expect, it } from "vitest";

import {
  applyParse,
  applyParseError,
  applyResult,
  applyViews,
  editCod,
  editOdd,
  initialState,
  setIncludeCod,
  toggleModule,
  uniqueSink,
  verdictTone,
} from "../src/state";

const MODULES = [
  { name: "supported", references: [] },
  { name: "unsupported", references: [] },
  { name: "top", references: ["supported", "unsupported"] },
];

const RESULT = {
  kind: "verify" as const,
  verdict: "violation",
  model: null,
  wallMs: 12.5,
  script: "(check-sat)",
};

describe("uniqueSink", () => {
  it("finds the single unreferenced module", () => {
    expect(uniqueSink(MODULES)).toBe("top");
  });

  it("returns null when several sinks exist", () => {
    expect(uniqueSink(MODULES.slice(0, 2))).toBeNull();
  });

  it("returns null for an empty module list", () => {
    expect(uniqueSink([])).toBeNull();
  });
});

describe("buffer edits", () => {
  it("bump the generation and clear the last result", () => {
    let state = applyResult(
      applyParse(initialState(), 0, MODULES, []), 0, RESULT);
    expect(state.lastResult).not.toBeNull();
    state = editOdd(state, "changed:");
    expect(state.generation).toBe(1);
    expect(state.lastResult).toBeNull();
    expect(state.views.stale).toBe(true);
  });

  it("identical text is a no-op", () => {
    const state = initialState();
    expect(editOdd(state, "")).toBe(state);
    expect(editCod(state, "")).toBe(state);
  });
});

describe("applyParse", () => {
  it("selects the unique sink by default", () => {
    const state = applyParse(initialState(), 0, MODULES, []);
    expect(state.selected).toEqual(["top"]);
  });

  it("keeps an existing selection that still resolves", () => {
    let state = applyParse(initialState(), 0, MODULES, []);
    state = toggleModule(state, "supported");
    state = applyParse(state, 0, MODULES, []);
    expect(state.selected).toEqual(["top", "supported"]);
  });

  it("drops selections for modules that no longer exist", () => {
    let state = applyParse(initialState(), 0, MODULES, []);
    state = applyParse(state, 0, MODULES.slice(0, 2), []);
    expect(state.selected).toEqual([]);
  });

  it("ignores stale responses from older buffers", () => {
    let state = editOdd(initialState(), "newer:");
    state = applyParse(state, 0, MODULES, []);
    expect(state.modules).toEqual([]);
  });

  it("clears a previous parse error", () => {
    let state = applyParseError(initialState(), 0,
      { code: "ParseError", message: "bad" });
    expect(state.parseError).not.toBeNull();
    state = applyParse(state, 0, MODULES, []);
    expect(state.parseError).toBeNull();
  });
});

describe("applyResult", () => {
  it("stores the result and switches to the result tab", () => {
    const state = applyResult(initialState(), 0, RESULT);
    expect(state.lastResult?.verdict).toBe("violation");
    expect(state.viewTab).toBe("result");
  });

  it("never shows a result for buffers newer than the request", () => {
    const state = editOdd(initialState(), "newer:");
    expect(applyResult(state, 0, RESULT).lastResult).toBeNull();
  });
});

describe("applyViews", () => {
  it("clears staleness only for the current generation", () => {
    let state = editOdd(initialState(), "m:");
    state = applyViews(state, 1, { odd: "p" }, { odd: "s" });
    expect(state.views.stale).toBe(false);
    state = editOdd(state, "m2:");
    state = applyViews(state, 1, { odd: "p" }, { odd: "s" });
    expect(state.views.stale).toBe(true);
  });
});

describe("verdictTone", () => {
  it.each([
    ["within-odd", "good"],
    ["consistent", "good"],
    ["violation", "bad"],
    ["inconsistent", "bad"],
    ["unknown", "warn"],
  ])("%s renders %s", (verdict, tone) => {
    expect(verdictTone(verdict)).toBe(tone);
  });
});

describe("toggles", () => {
  it("module selection toggles in and out", () => {
    let state = applyParse(initialState(), 0, MODULES, []);
    state = toggleModule(state, "top");
    expect(state.selected).toEqual([]);
    state = toggleModule(state, "supported");
    expect(state.selected).toEqual(["supported"]);
  });

  it("includeCod flag flips without touching buffers", () => {
    const state = setIncludeCod(initialState(), false);
    expect(state.includeCod).toBe(false);
    expect(state.generation).toBe(0);
  });
});
