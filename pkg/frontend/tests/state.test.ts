import { describe, expect, it } from "vitest";

import {
  acceptRun,
  beginRun,
  canRecordDecision,
  modelLoaded,
  newSession,
  projectEdited,
  projectSaved,
  selectAssignment,
  suggestionIsStale,
  type RunSnapshot,
} from "../src/state.js";

function snapshot(overrides: Partial<RunSnapshot> = {}): RunSnapshot {
  return {
    suggestionId: "s1",
    modelHash: "m1",
    projectHash: "p1",
    runs: 1000,
    seed: 42,
    result: {
      tasks: ["a", "b"],
      runs: 1000,
      seed: 42,
      suggestions: [
        { assignment: ["x", "x"], wins: 700, frequency: 0.7, mean_cost: 0.4 },
        { assignment: ["x", "y"], wins: 300, frequency: 0.3, mean_cost: 0.6 },
      ],
    },
    ...overrides,
  };
}

function sessionWithRun() {
  const s = newSession();
  modelLoaded(s, "model-id", "m1");
  projectSaved(s, "project-id", "p1");
  acceptRun(s, beginRun(s), snapshot());
  return s;
}

describe("staleness", () => {
  it("a fresh run matching the loaded hashes is not stale", () => {
    const s = sessionWithRun();
    expect(suggestionIsStale(s)).toBe(false);
  });

  it("no run at all is not stale", () => {
    expect(suggestionIsStale(newSession())).toBe(false);
  });

  it("a model edit after the run marks it stale", () => {
    const s = sessionWithRun();
    modelLoaded(s, "model-id", "m2");
    expect(suggestionIsStale(s)).toBe(true);
  });

  it("saving the project under a new hash marks it stale", () => {
    const s = sessionWithRun();
    projectSaved(s, "project-id-2", "p2");
    expect(suggestionIsStale(s)).toBe(true);
  });

  it("unsaved project edits mark it stale even before saving", () => {
    const s = sessionWithRun();
    projectEdited(s);
    expect(suggestionIsStale(s)).toBe(true);
  });
});

describe("recording gate", () => {
  it("allows recording a fresh run with a selection", () => {
    const s = sessionWithRun();
    expect(s.selected).toEqual(["x", "x"]);
    expect(canRecordDecision(s)).toBe(true);
  });

  it("blocks recording when the suggestion is stale", () => {
    const s = sessionWithRun();
    projectEdited(s);
    expect(canRecordDecision(s)).toBe(false);
  });

  it("blocks recording without a run", () => {
    expect(canRecordDecision(newSession())).toBe(false);
  });

  it("re-running after the edit unblocks recording", () => {
    const s = sessionWithRun();
    modelLoaded(s, "model-id", "m2");
    expect(canRecordDecision(s)).toBe(false);
    acceptRun(s, beginRun(s), snapshot({ modelHash: "m2" }));
    expect(canRecordDecision(s)).toBe(true);
  });

  it("an explicit selection survives until the next run", () => {
    const s = sessionWithRun();
    selectAssignment(s, ["x", "y"]);
    expect(s.selected).toEqual(["x", "y"]);
    acceptRun(s, beginRun(s), snapshot());
    expect(s.selected).toEqual(["x", "x"]);
  });
});

describe("run tokens", () => {
  it("a superseded run's response is discarded", () => {
    const s = sessionWithRun();
    const oldToken = beginRun(s);
    const newToken = beginRun(s);
    expect(acceptRun(s, oldToken, snapshot({ suggestionId: "old" }))).toBe(false);
    expect(s.lastRun?.suggestionId).toBe("s1");
    expect(acceptRun(s, newToken, snapshot({ suggestionId: "new" }))).toBe(true);
    expect(s.lastRun?.suggestionId).toBe("new");
  });

  it("the same token cannot land twice after a newer run started", () => {
    const s = newSession();
    const token = beginRun(s);
    expect(acceptRun(s, token, snapshot())).toBe(true);
    beginRun(s);
    expect(acceptRun(s, token, snapshot({ suggestionId: "late" }))).toBe(false);
  });
});
