import { describe, expect, it } from "vitest";

import { rankDelta, rankingDiff } from "../src/diff.js";
import type { SuggestionRow } from "../src/types.js";

function row(assignment: string[], frequency: number): SuggestionRow {
  return { assignment, frequency, wins: Math.round(frequency * 1000), mean_cost: 0.5 };
}

describe("rankingDiff", () => {
  it("identical runs produce zero movement everywhere", () => {
    const run = [row(["a", "a"], 0.6), row(["a", "b"], 0.4)];
    const diff = rankingDiff(run, run);
    expect(diff).toHaveLength(2);
    for (const d of diff) {
      expect(rankDelta(d)).toBe(0);
      expect(d.beforeFrequency).toBe(d.afterFrequency);
    }
  });

  it("tracks a swap in both directions", () => {
    const before = [row(["a", "a"], 0.6), row(["a", "b"], 0.4)];
    const after = [row(["a", "b"], 0.7), row(["a", "a"], 0.3)];
    const diff = rankingDiff(before, after);
    expect(diff.map((d) => d.key.split("")[1])).toEqual(["b", "a"]);
    expect(rankDelta(diff[0]!)).toBe(1);
    expect(rankDelta(diff[1]!)).toBe(-1);
  });

  it("marks entries that entered or left the list", () => {
    const before = [row(["a", "a"], 0.9), row(["b", "b"], 0.1)];
    const after = [row(["a", "a"], 0.8), row(["c", "c"], 0.2)];
    const diff = rankingDiff(before, after);
    const entered = diff.find((d) => d.assignment[0] === "c")!;
    const left = diff.find((d) => d.assignment[0] === "b")!;
    expect(entered.beforeRank).toBeNull();
    expect(entered.afterRank).toBe(2);
    expect(rankDelta(entered)).toBeNull();
    expect(left.afterRank).toBeNull();
    expect(left.beforeRank).toBe(2);
    expect(left.beforeFrequency).toBe(0.1);
  });

  it("orders rows by the after ranking with departures last", () => {
    const before = [row(["x"], 0.5), row(["y"], 0.3), row(["z"], 0.2)];
    const after = [row(["y"], 0.6), row(["x"], 0.4)];
    const keys = rankingDiff(before, after).map((d) => d.assignment[0]);
    expect(keys).toEqual(["y", "x", "z"]);
  });
});
