// @vitest-environment happy-dom
//
// Mounts the real page skeleton and walks the first paint: every element id
// the app wires must exist in index.html, and the characterization flow from
// "load model" to "validated" must render the meter and the stale banner
// logic without touching a network.

import { readFileSync } from "node:fs";
import { join } from "node:path";
import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { mountApp } from "../src/app.js";

const MODEL_DOC = {
  schema_version: 1,
  factors: [
    { id: "tz", display_name: "time zone gap", scope: "site_pair", kind: "ordinal" },
    { id: "exp", display_name: "experience", scope: "site", kind: "ordinal" },
  ],
  nodes: [
    { id: "tz", role: "factor" },
    { id: "exp", role: "factor" },
    { id: "cost", role: "goal", polarity: "cost", aggregation: "weighted_mean", noise_sigma: 0.1 },
  ],
  edges: [
    { source: "tz", target: "cost", sign: 1, weight: 1.0 },
    { source: "exp", target: "cost", sign: -1, weight: 0.66 },
  ],
  goal_weights: { cost: 1.0 },
};

const SUGGESTION_PAYLOAD = {
  suggestion_id: "s-1",
  model_hash: "model-hash-1",
  project_hash: "project-hash-1",
  result: {
    tasks: ["build", "test"],
    runs: 100,
    seed: 5,
    suggestions: [
      { assignment: ["north", "north"], wins: 80, frequency: 0.8, mean_cost: 0.41 },
      { assignment: ["north", "south"], wins: 20, frequency: 0.2, mean_cost: 0.55 },
    ],
  },
};

function pageHtml(): string {
  const raw = readFileSync(join(__dirname, "..", "index.html"), "utf8");
  const body = raw.slice(raw.indexOf("<body>") + 6, raw.indexOf("</body>"));
  // the module script is the app itself; tests mount it directly instead
  return body.replace(/<script[^>]*><\/script>/g, "");
}

function stubApi(routes: Record<string, unknown>): ApiClient {
  return new ApiClient("http://stub", async (url, init) => {
    const path = url.replace("http://stub", "").split("?")[0] ?? "";
    const key = `${init?.method ?? "GET"} ${path}`;
    if (!(key in routes)) throw new Error(`unstubbed route: ${key}`);
    return new Response(JSON.stringify(routes[key]), {
      status: 200,
      headers: { "content-type": "application/json" },
    });
  });
}

function flush(): Promise<void> {
  return new Promise((resolve) => setTimeout(resolve, 0));
}

beforeEach(() => {
  document.body.innerHTML = pageHtml();
});

describe("first paint", () => {
  it("mounts against the shipped skeleton without missing ids", async () => {
    mountApp(stubApi({ "GET /api/health": { status: "ok", backend: "numpy" } }));
    await flush();
    expect(document.getElementById("global-status")?.textContent).toContain("numpy");
    expect(document.querySelectorAll("#tabs button").length).toBe(4);
  });

  it("reports an unreachable service instead of crashing", async () => {
    const api = new ApiClient("http://stub", async () => {
      throw new Error("refused");
    });
    mountApp(api);
    await flush();
    expect(document.getElementById("global-status")?.className).toBe("error");
    expect(document.getElementById("global-status")?.textContent).toContain("gsdalloc serve");
  });
});

describe("characterization flow", () => {
  it("loads a model, edits a draft, saves and shows the completeness meter", async () => {
    const api = stubApi({
      "GET /api/health": { status: "ok", backend: "numpy" },
      "POST /api/models": { id: "m-1", hash: "model-hash-1" },
      "GET /api/models/m-1": { id: "m-1", hash: "model-hash-1", document: MODEL_DOC },
      "POST /api/projects": { id: "p-1", hash: "project-hash-1" },
      "POST /api/validate": {
        ok: false,
        findings: [
          { code: "MISSING_VALUE", message: "no value for 'tz' at (north, south)", locus: ["tz"] },
        ],
      },
    });
    mountApp(api);

    (document.getElementById("model-text") as HTMLTextAreaElement).value =
      JSON.stringify(MODEL_DOC);
    (document.getElementById("model-load") as HTMLButtonElement).click();
    await flush();
    await flush();

    // factor grid appears once the model is known
    expect(document.getElementById("value-grid")?.textContent).toContain("time zone gap");

    const taskInput = document.getElementById("task-name") as HTMLInputElement;
    taskInput.value = "build";
    (document.getElementById("task-add") as HTMLButtonElement).click();
    taskInput.value = "test";
    (document.getElementById("task-add") as HTMLButtonElement).click();
    const siteInput = document.getElementById("site-name") as HTMLInputElement;
    siteInput.value = "north";
    (document.getElementById("site-add") as HTMLButtonElement).click();
    siteInput.value = "south";
    (document.getElementById("site-add") as HTMLButtonElement).click();
    expect(document.getElementById("task-chips")?.textContent).toContain("build");
    expect(document.querySelectorAll("#availability-grid input[type=checkbox]").length).toBe(4);

    (document.getElementById("project-save") as HTMLButtonElement).click();
    await flush();
    await flush();

    const label = document.getElementById("meter-label")?.textContent ?? "";
    expect(label).toContain("finding");
    expect(document.getElementById("findings-list")?.textContent).toContain("MISSING_VALUE");
    // 1 tz pair + 2 exp sites demanded, one missing -> meter strictly between 0 and 100
    const width = (document.getElementById("meter-fill") as HTMLElement).style.width;
    expect(parseInt(width, 10)).toBeGreaterThan(0);
    expect(parseInt(width, 10)).toBeLessThan(100);
  });
});

describe("suggestion flow", () => {
  async function mountWithRun() {
    const api = stubApi({
      "GET /api/health": { status: "ok", backend: "numpy" },
      "POST /api/models": { id: "m-1", hash: "model-hash-1" },
      "GET /api/models/m-1": { id: "m-1", hash: "model-hash-1", document: MODEL_DOC },
      "POST /api/projects": { id: "p-1", hash: "project-hash-1" },
      "POST /api/validate": { ok: true, findings: [] },
      "POST /api/suggestions": SUGGESTION_PAYLOAD,
      "POST /api/decisions": { id: "d-1", record: {} },
    });
    mountApp(api);
    (document.getElementById("model-text") as HTMLTextAreaElement).value =
      JSON.stringify(MODEL_DOC);
    (document.getElementById("model-load") as HTMLButtonElement).click();
    await flush();
    await flush();
    for (const [field, button, values] of [
      ["task-name", "task-add", ["build", "test"]],
      ["site-name", "site-add", ["north", "south"]],
    ] as const) {
      for (const value of values) {
        (document.getElementById(field) as HTMLInputElement).value = value;
        (document.getElementById(button) as HTMLButtonElement).click();
      }
    }
    (document.getElementById("run-button") as HTMLButtonElement).click();
    await flush();
    await flush();
    await flush();
    return api;
  }

  it("renders the ranked table with settled percentages", async () => {
    await mountWithRun();
    const table = document.getElementById("suggestion-table");
    expect(table?.textContent).toContain("build→north");
    expect(table?.textContent).toContain("80.0%");
    expect(table?.textContent).toContain("20.0%");
    expect(document.getElementById("repro-seed")?.textContent).toBe("5");
    expect(document.getElementById("repro-runs")?.textContent).toBe("100");
    expect(document.getElementById("repro-model")?.textContent).toBe("model-hash-1");
  });

  it("flags the run stale after an edit and blocks recording", async () => {
    await mountWithRun();
    const record = document.getElementById("record-button") as HTMLButtonElement;
    expect(record.disabled).toBe(false);
    expect(document.getElementById("stale-banner")?.classList.contains("visible")).toBe(false);

    (document.getElementById("task-name") as HTMLInputElement).value = "extra";
    (document.getElementById("task-add") as HTMLButtonElement).click();
    await flush();

    expect(document.getElementById("stale-banner")?.classList.contains("visible")).toBe(true);
    expect(record.disabled).toBe(true);
    const ranking = document.querySelector("#suggestion-table table");
    expect(ranking?.classList.contains("stale")).toBe(true);
  });

  it("records the selected assignment and offers both download formats", async () => {
    await mountWithRun();
    (document.getElementById("record-button") as HTMLButtonElement).click();
    await flush();
    const links = document.querySelectorAll<HTMLAnchorElement>("#decision-links a");
    expect(links.length).toBe(2);
    const hrefs = [...links].map((a) => a.getAttribute("href"));
    expect(hrefs).toContain("http://stub/api/decisions/d-1?format=json");
    expect(hrefs).toContain("http://stub/api/decisions/d-1?format=xml");
  });
});
