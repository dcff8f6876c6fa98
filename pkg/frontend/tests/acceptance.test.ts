// End-to-end checks against a real local service process: the what-if loop
// the UI performs (PATCH weights, re-run with pinned seed, diff) must match
// two direct API invocations on an untouched second service, displayed
// frequencies must settle to exactly 100.0%, and a small result must arrive
// well inside the interactive budget.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { rankingDiff } from "../src/diff.js";
import { assignmentChips, percentShares } from "../src/format.js";
import type { ModelDocument, ProjectDocument } from "../src/types.js";

const RULES = [
  "r1: coupling & cultural_differences -> communication_problems",
  "r2: time_zone_difference >= high -> communication_problems",
].join("\n");

const GOALS = {
  goals: [{ id: "project_costs", polarity: "cost" }],
  links: [
    { source: "communication_problems", target: "productivity", sign: -1 },
    { source: "site_experience", target: "productivity", sign: 1 },
    { source: "productivity", target: "project_costs", sign: -1 },
  ],
  factors: [
    { id: "coupling", scope: "task_pair" },
    { id: "cultural_differences", scope: "site_pair" },
    { id: "time_zone_difference", scope: "site_pair" },
    { id: "site_experience", scope: "site" },
  ],
};

const PROJECT: ProjectDocument = {
  tasks: ["design", "development"],
  sites: ["north", "south"],
  availability: {},
  values: [
    { factor: "coupling", binding: ["design", "development"], value: "medium" },
    { factor: "cultural_differences", binding: "*", value: "medium" },
    { factor: "time_zone_difference", binding: "*", value: "medium" },
    { factor: "site_experience", binding: ["north"], value: "high" },
    { factor: "site_experience", binding: ["south"], value: "medium" },
  ],
};

const SEED = 42;
const RUNS = 400;

type Service = { proc: ChildProcess; client: ApiClient; dir: string };

async function startService(port: number): Promise<Service> {
  const dir = mkdtempSync(join(tmpdir(), "gsdalloc-ui-"));
  const proc = spawn("gsdalloc", ["serve", "--port", String(port)], {
    env: { ...process.env, GSDALLOC_DATA_DIR: dir },
    stdio: "ignore",
  });
  const client = new ApiClient(`http://127.0.0.1:${port}`);
  const deadline = Date.now() + 60_000;
  for (;;) {
    try {
      await client.health();
      return { proc, client, dir };
    } catch {
      if (Date.now() > deadline) throw new Error(`service on :${port} never came up`);
      await new Promise((r) => setTimeout(r, 300));
    }
  }
}

function stopService(svc: Service | undefined): void {
  svc?.proc.kill();
  if (svc) rmSync(svc.dir, { recursive: true, force: true });
}

/** The weight edit a what-if slider drag produces. */
function dampenFactorEdges(doc: ModelDocument): ModelDocument {
  return {
    ...doc,
    edges: doc.edges.map((e) =>
      e.source === "time_zone_difference" ? { ...e, weight: 0.2 } : e,
    ),
  };
}

let ui: Service | undefined;
let direct: Service | undefined;

beforeAll(async () => {
  [ui, direct] = await Promise.all([startService(8791), startService(8792)]);
}, 90_000);

afterAll(() => {
  stopService(ui);
  stopService(direct);
});

describe("what-if fidelity against a local service", () => {
  it(
    "UI-path diff (PATCH + pinned-seed re-run) equals two direct invocations",
    async () => {
      const a = ui!.client;
      // UI path: derive, run, patch weights under base_hash, re-run pinned
      const model = await a.deriveModel(RULES, GOALS);
      const project = await a.createProject(PROJECT);
      const before = await a.suggest({
        model_id: model.id,
        project_id: project.id,
        runs: RUNS,
        seed: SEED,
      });
      const adjusted = dampenFactorEdges(model.document);
      await a.patchModel(model.id, model.hash, adjusted);
      const after = await a.suggest({
        model_id: model.id,
        project_id: project.id,
        runs: RUNS,
        seed: SEED,
      });
      expect(after.model_hash).not.toBe(before.model_hash);
      const uiDiff = rankingDiff(before.result.suggestions, after.result.suggestions);

      // direct path: a second, untouched service recomputes both runs cold
      const b = direct!.client;
      const baseModel = await b.deriveModel(RULES, GOALS);
      const editedModel = await b.createModel(adjusted);
      const directProject = await b.createProject(PROJECT);
      const run1 = await b.suggest({
        model_id: baseModel.id,
        project_id: directProject.id,
        runs: RUNS,
        seed: SEED,
      });
      const run2 = await b.suggest({
        model_id: editedModel.id,
        project_id: directProject.id,
        runs: RUNS,
        seed: SEED,
      });
      expect(run1.result).toEqual(before.result);
      expect(run2.result).toEqual(after.result);
      const directDiff = rankingDiff(run1.result.suggestions, run2.result.suggestions);
      expect(uiDiff).toEqual(directDiff);
    },
    60_000,
  );

  it(
    "displayed frequencies sum to 100.0 exactly for a real run",
    async () => {
      const a = ui!.client;
      const model = await a.deriveModel(RULES, GOALS);
      const project = await a.createProject(PROJECT);
      const { result } = await a.suggest({
        model_id: model.id,
        project_id: project.id,
        runs: 1000,
        seed: 7,
      });
      expect(result.suggestions.length).toBeGreaterThan(0);
      const shares = percentShares(result.suggestions.map((s) => s.frequency));
      const tenths = shares.reduce((acc, s) => acc + Math.round(parseFloat(s) * 10), 0);
      expect(tenths).toBe(1000);
    },
    60_000,
  );

  it(
    "a 2x2 project's table data is ready well under two seconds",
    async () => {
      const a = ui!.client;
      const model = await a.deriveModel(RULES, GOALS);
      const project = await a.createProject(PROJECT);
      // warm the simulation path once so the measurement is steady-state
      await a.suggest({ model_id: model.id, project_id: project.id, runs: 1000, seed: 1 });
      const started = performance.now();
      const { result } = await a.suggest({
        model_id: model.id,
        project_id: project.id,
        runs: 1000,
        seed: 2,
      });
      const shares = percentShares(result.suggestions.map((s) => s.frequency));
      const rows = result.suggestions.map((s, i) => ({
        chips: assignmentChips(result.tasks, s.assignment),
        share: shares[i],
        cost: s.mean_cost,
      }));
      const elapsed = performance.now() - started;
      expect(rows.length).toBeGreaterThanOrEqual(1);
      expect(rows.length).toBeLessThanOrEqual(4);
      expect(elapsed).toBeLessThan(2000);
    },
    60_000,
  );
});
