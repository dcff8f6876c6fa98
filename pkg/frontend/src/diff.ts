// Ranking diff for the what-if panel: pair up the suggestion lists from two
// runs by assignment and report how each alternative moved.

import type { SuggestionRow } from "./types.js";

export type DiffRow = {
  key: string;
  assignment: string[];
  beforeRank: number | null;
  afterRank: number | null;
  beforeFrequency: number | null;
  afterFrequency: number | null;
};

const SEP = "";

export function assignmentKey(assignment: string[]): string {
  return assignment.join(SEP);
}

/**
 * Rows ordered by the after-ranking, with alternatives that dropped out
 * appended at the end in their old order. Ranks are 1-based.
 */
export function rankingDiff(before: SuggestionRow[], after: SuggestionRow[]): DiffRow[] {
  const rows = new Map<string, DiffRow>();
  after.forEach((row, i) => {
    rows.set(assignmentKey(row.assignment), {
      key: assignmentKey(row.assignment),
      assignment: row.assignment,
      beforeRank: null,
      afterRank: i + 1,
      beforeFrequency: null,
      afterFrequency: row.frequency,
    });
  });
  const gone: DiffRow[] = [];
  before.forEach((row, i) => {
    const key = assignmentKey(row.assignment);
    const hit = rows.get(key);
    if (hit) {
      hit.beforeRank = i + 1;
      hit.beforeFrequency = row.frequency;
    } else {
      gone.push({
        key,
        assignment: row.assignment,
        beforeRank: i + 1,
        afterRank: null,
        beforeFrequency: row.frequency,
        afterFrequency: null,
      });
    }
  });
  return [...rows.values(), ...gone];
}

/** Positive = climbed, negative = fell, null = entered or left the list. */
export function rankDelta(row: DiffRow): number | null {
  if (row.beforeRank === null || row.afterRank === null) return null;
  return row.beforeRank - row.afterRank;
}
