// Number formatting for the tables. The one non-obvious piece is
// percentShares: naive per-row rounding of frequencies can make the column
// sum to 99.9 or 100.1, so the rows are settled in integer tenths of a
// percent with the leftover tenths handed to the largest remainders.

/**
 * Render fractions (summing to ~1) as percent strings with one decimal,
 * guaranteed to add up to exactly 100.0.
 */
export function percentShares(fractions: number[]): string[] {
  if (fractions.length === 0) return [];
  const scaled = fractions.map((f) => f * 1000);
  const tenths = scaled.map((v) => Math.floor(v));
  let leftover = 1000 - tenths.reduce((a, b) => a + b, 0);
  const order = scaled
    .map((v, i) => ({ frac: v - Math.floor(v), i }))
    .sort((a, b) => b.frac - a.frac || a.i - b.i);
  for (const slot of order) {
    if (leftover <= 0) break;
    tenths[slot.i] = (tenths[slot.i] ?? 0) + 1;
    leftover -= 1;
  }
  return tenths.map((t) => (t / 10).toFixed(1));
}

export function formatCost(value: number): string {
  return value.toFixed(4);
}

export function formatHash(hash: string | null): string {
  if (!hash) return "—";
  return hash.slice(0, 12);
}

/** "design_a→munich" labels for one assignment row. */
export function assignmentChips(tasks: string[], sites: string[]): string[] {
  return tasks.map((task, i) => `${task}→${sites[i] ?? "?"}`);
}
