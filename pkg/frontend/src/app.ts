// DOM layer: wires the four screens to the session state and the API
// client. All numbers shown in tables come straight from API responses;
// this file only formats, never recomputes.

import { ApiClient, ApiError } from "./api.js";
import {
  addSite,
  addTask,
  clearValue,
  currentValue,
  demandedRows,
  newDraft,
  removeSite,
  removeTask,
  setValue,
  toDocument,
  toggleAvailability,
  type Draft,
} from "./draft.js";
import { rankDelta, rankingDiff, type DiffRow } from "./diff.js";
import { assignmentChips, formatCost, formatHash, percentShares } from "./format.js";
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
  type Session,
} from "./state.js";
import {
  LEVELS,
  type FactorDef,
  type Finding,
  type LevelName,
  type ModelDocument,
  type RiskFinding,
  type SuggestionRow,
  type ValidateResponse,
} from "./types.js";

type RiskCounts = { high: number; medium: number; low: number; total: number };

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: (Node | string)[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) {
    if (key === "class") node.className = value;
    else node.setAttribute(key, value);
  }
  node.append(...children);
  return node;
}

function must<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

export function mountApp(api: ApiClient): void {
  const session: Session = newSession();
  let draft: Draft = newDraft();
  let modelDoc: ModelDocument | null = null;
  let lastValidation: ValidateResponse | null = null;
  let runController: AbortController | null = null;
  let rowRisks = new Map<number, RiskCounts>();
  let selectedRisks: RiskFinding[] | null = null;
  let diffRows: DiffRow[] | null = null;
  let recordedId: string | null = null;

  const status = must<HTMLDivElement>("global-status");

  function say(text: string, isError = false): void {
    status.textContent = text;
    status.className = isError ? "error" : "info";
  }

  function describe(err: unknown): string {
    if (err instanceof ApiError) {
      if (err.findings.length > 0) {
        return err.findings.map((f) => `${f.code}: ${f.message}`).join(" · ");
      }
      return err.message;
    }
    if (err instanceof DOMException && err.name === "AbortError") return "run cancelled";
    return String(err);
  }

  // -- tabs -----------------------------------------------------------------

  for (const button of document.querySelectorAll<HTMLButtonElement>("#tabs button")) {
    button.addEventListener("click", () => {
      for (const other of document.querySelectorAll("#tabs button")) {
        other.classList.toggle("active", other === button);
      }
      for (const screen of document.querySelectorAll<HTMLElement>("main .screen")) {
        screen.classList.toggle("active", screen.id === `screen-${button.dataset.screen}`);
      }
    });
  }

  // -- header strip -----------------------------------------------------------

  function renderRepro(): void {
    const run = session.lastRun;
    must("repro-model").textContent = formatHash(run ? run.modelHash : session.modelHash);
    must("repro-project").textContent = formatHash(run ? run.projectHash : session.projectHash);
    must("repro-seed").textContent = run ? String(run.seed) : "—";
    must("repro-runs").textContent = run ? String(run.runs) : "—";
  }

  // -- documents card ---------------------------------------------------------

  async function installModel(id: string): Promise<void> {
    const stored = await api.getModel(id);
    modelDoc = stored.document;
    modelLoaded(session, stored.id, stored.hash);
    say(`model ${formatHash(stored.hash)} loaded (${modelDoc.factors.length} factors)`);
    renderEntities();
    renderWhatifControls();
    renderRepro();
    renderSuggestions();
    if (session.projectId) await saveAndValidate();
  }

  must<HTMLButtonElement>("model-load").addEventListener("click", () => {
    const raw = must<HTMLTextAreaElement>("model-text").value.trim();
    if (!raw) return say("paste a model document first", true);
    void (async () => {
      try {
        const created = await api.createModel(JSON.parse(raw));
        await installModel(created.id);
      } catch (err) {
        say(describe(err), true);
      }
    })();
  });

  must<HTMLButtonElement>("model-fetch").addEventListener("click", () => {
    const id = must<HTMLInputElement>("model-id").value.trim();
    if (!id) return say("enter a model id", true);
    installModel(id).catch((err) => say(describe(err), true));
  });

  must<HTMLButtonElement>("rules-load").addEventListener("click", () => {
    const text = must<HTMLTextAreaElement>("rules-text").value;
    if (!text.trim()) return say("paste rule text first", true);
    void (async () => {
      try {
        const created = await api.createRules(text);
        session.rulesId = created.id;
        must("rules-summary").replaceChildren(
          el("div", { class: "hint" }, [`${created.count} rule(s) parsed`]),
          ...created.rules.map((line) => el("code", { class: "rule-line" }, [line])),
        );
        say(`rules ${formatHash(created.hash)} loaded`);
        renderSuggestions();
      } catch (err) {
        say(describe(err), true);
      }
    })();
  });

  // -- characterization screen -------------------------------------------------

  function touchDraft(): void {
    projectEdited(session);
    renderEntities();
    renderSuggestions();
  }

  function chipList(items: string[], onRemove: (name: string) => void): HTMLElement {
    const box = el("div", { class: "chips" });
    for (const name of items) {
      const remove = el("button", { class: "chip-x", title: `remove ${name}` }, ["×"]);
      remove.addEventListener("click", () => onRemove(name));
      box.append(el("span", { class: "chip" }, [name, remove]));
    }
    return box;
  }

  function renderEntities(): void {
    must("task-chips").replaceChildren(
      chipList(draft.tasks, (name) => {
        removeTask(draft, name);
        touchDraft();
      }),
    );
    must("site-chips").replaceChildren(
      chipList(draft.sites, (name) => {
        removeSite(draft, name);
        touchDraft();
      }),
    );
    renderAvailability();
    renderValueGrid();
  }

  function renderAvailability(): void {
    const box = must("availability-grid");
    if (draft.tasks.length === 0 || draft.sites.length === 0) {
      box.replaceChildren(el("p", { class: "hint" }, ["add tasks and sites first"]));
      return;
    }
    const head = el("tr", {}, [
      el("th", {}, ["task \\ site"]),
      ...draft.sites.map((s) => el("th", {}, [s])),
    ]);
    const rows = draft.tasks.map((task) => {
      const cells = draft.sites.map((site) => {
        const checkbox = el("input", { type: "checkbox" });
        checkbox.checked = (draft.availability[task] ?? draft.sites).includes(site);
        checkbox.addEventListener("change", () => {
          toggleAvailability(draft, task, site);
          touchDraft();
        });
        return el("td", {}, [checkbox]);
      });
      return el("tr", {}, [el("th", {}, [task]), ...cells]);
    });
    box.replaceChildren(el("table", { class: "grid" }, [head, ...rows]));
  }

  function valuePicker(factor: FactorDef, binding: "*" | string[]): HTMLSelectElement {
    const select = el("select");
    select.append(el("option", { value: "" }, ["(unset)"]));
    const options =
      factor.kind === "boolean" ? (["false", "true"] as const) : (LEVELS as readonly string[]);
    for (const option of options) {
      select.append(el("option", { value: option }, [option.replace("_", " ")]));
    }
    const entry = binding === "*" ? draft.values.get(`${factor.id}*`) : undefined;
    const shown = binding === "*" ? entry : currentValue(draft, factor, binding);
    const exactOnly =
      binding !== "*" &&
      shown !== undefined &&
      shown.binding !== "*" &&
      currentValue(draft, factor, binding) === shown;
    if (shown !== undefined && (binding === "*" || exactOnly)) {
      select.value = String(shown.value);
    } else if (shown !== undefined) {
      // wildcard supplies this cell; show it but style as inherited
      select.value = String(shown.value);
      select.classList.add("inherited");
    }
    select.addEventListener("change", () => {
      if (select.value === "") {
        clearValue(draft, factor, binding);
      } else if (factor.kind === "boolean") {
        setValue(draft, factor, binding, select.value === "true");
      } else {
        setValue(draft, factor, binding, select.value as LevelName);
      }
      touchDraft();
    });
    return select;
  }

  function renderValueGrid(): void {
    const box = must("value-grid");
    if (!modelDoc) {
      box.replaceChildren(el("p", { class: "hint" }, ["load a model to see demanded factors"]));
      return;
    }
    const rows = demandedRows(modelDoc.factors, draft);
    const table = el("table", { class: "grid values" });
    table.append(
      el("tr", {}, [el("th", {}, ["factor"]), el("th", {}, ["binding"]), el("th", {}, ["value"])]),
    );
    for (const factor of modelDoc.factors) {
      const wildcard = el("tr", { class: "wildcard-row" }, [
        el("td", {}, [factor.display_name]),
        el("td", {}, [el("em", {}, ["* (every binding)"])]),
        el("td", {}, [valuePicker(factor, "*")]),
      ]);
      table.append(wildcard);
      for (const row of rows.filter((r) => r.factor.id === factor.id)) {
        table.append(
          el("tr", {}, [
            el("td", {}, [""]),
            el("td", {}, [row.binding.length ? row.binding.join(" · ") : "(project)"]),
            el("td", {}, [valuePicker(factor, row.binding)]),
          ]),
        );
      }
    }
    box.replaceChildren(table);
  }

  function renderValidation(): void {
    const meter = must("meter-fill");
    const label = must("meter-label");
    const list = must("findings-list");
    if (!lastValidation || !modelDoc) {
      meter.style.width = "0%";
      label.textContent = "not validated yet";
      list.replaceChildren();
      return;
    }
    const demanded = demandedRows(modelDoc.factors, draft).length;
    const missing = lastValidation.findings.filter((f) => f.code === "MISSING_VALUE").length;
    const covered = Math.max(demanded - missing, 0);
    const percent = demanded === 0 ? 100 : Math.round((covered / demanded) * 100);
    meter.style.width = `${percent}%`;
    meter.classList.toggle("complete", lastValidation.ok);
    label.textContent = lastValidation.ok
      ? "complete: every demanded value is set"
      : `${covered}/${demanded} demanded values set, ${lastValidation.findings.length} finding(s)`;
    list.replaceChildren(
      ...lastValidation.findings.map((f: Finding) =>
        el("li", { class: "finding" }, [
          el("code", {}, [f.code]),
          ` ${f.message}`,
          f.locus.length ? el("span", { class: "locus" }, [` @ ${f.locus.join(" / ")}`]) : "",
        ]),
      ),
    );
  }

  async function saveAndValidate(): Promise<boolean> {
    if (!session.modelId) {
      say("load a model before validating", true);
      return false;
    }
    try {
      const saved = await api.createProject(toDocument(draft));
      projectSaved(session, saved.id, saved.hash);
      lastValidation = await api.validate(session.modelId, saved.id);
      renderValidation();
      renderRepro();
      renderSuggestions();
      say(
        lastValidation.ok
          ? `project ${formatHash(saved.hash)} saved, characterization complete`
          : `project ${formatHash(saved.hash)} saved with ${lastValidation.findings.length} finding(s)`,
        !lastValidation.ok,
      );
      return lastValidation.ok;
    } catch (err) {
      say(describe(err), true);
      return false;
    }
  }

  must<HTMLButtonElement>("task-add").addEventListener("click", () => {
    const input = must<HTMLInputElement>("task-name");
    if (addTask(draft, input.value)) {
      input.value = "";
      touchDraft();
    }
  });

  must<HTMLButtonElement>("site-add").addEventListener("click", () => {
    const input = must<HTMLInputElement>("site-name");
    if (addSite(draft, input.value)) {
      input.value = "";
      touchDraft();
    }
  });

  must<HTMLButtonElement>("project-save").addEventListener("click", () => {
    void saveAndValidate();
  });

  must<HTMLButtonElement>("project-load").addEventListener("click", () => {
    const raw = must<HTMLTextAreaElement>("project-text").value.trim();
    if (!raw) return say("paste a project document first", true);
    void (async () => {
      try {
        const doc = JSON.parse(raw);
        const { fromDocument } = await import("./draft.js");
        draft = fromDocument(doc, modelDoc?.factors ?? []);
        projectEdited(session);
        renderEntities();
        await saveAndValidate();
      } catch (err) {
        say(describe(err), true);
      }
    })();
  });

  // -- suggestion screen --------------------------------------------------------

  function runSnapshotFromPayload(payload: {
    suggestion_id: string;
    model_hash: string;
    project_hash: string;
    result: RunSnapshot["result"];
  }): RunSnapshot {
    return {
      suggestionId: payload.suggestion_id,
      modelHash: payload.model_hash,
      projectHash: payload.project_hash,
      runs: payload.result.runs,
      seed: payload.result.seed,
      result: payload.result,
    };
  }

  async function fetchRowRisks(token: number): Promise<void> {
    const run = session.lastRun;
    if (!run || !session.rulesId || !session.modelId || !session.projectId) return;
    const rows = run.result.suggestions;
    const jobs = rows.map(async (row, index) => {
      const report = await api.risks({
        model_id: session.modelId!,
        project_id: session.projectId!,
        rules_id: session.rulesId!,
        assignment: row.assignment,
      });
      if (session.runToken !== token) return;
      const counts: RiskCounts = { high: 0, medium: 0, low: 0, total: 0 };
      for (const f of report.findings) {
        counts.total += 1;
        if (f.severity === "high") counts.high += 1;
        else if (f.severity === "low") counts.low += 1;
        else counts.medium += 1;
      }
      rowRisks.set(index, counts);
    });
    try {
      await Promise.all(jobs);
    } catch {
      return; // badges stay blank; the table itself is already rendered
    }
    if (session.runToken === token) renderSuggestions();
  }

  function startRun(): void {
    if (!session.modelId) return say("load a model first", true);
    const runs = parseInt(must<HTMLInputElement>("run-count").value, 10) || 1000;
    const seedRaw = must<HTMLInputElement>("run-seed").value.trim();
    const token = beginRun(session);
    runController?.abort();
    runController = new AbortController();
    must("run-button").setAttribute("disabled", "");
    must("cancel-button").removeAttribute("disabled");
    say("running simulation…");
    void (async () => {
      try {
        if (session.projectDirty || !session.projectId) {
          const ok = await saveAndValidate();
          if (!ok) say("characterization has findings; running anyway on saved copy", true);
        }
        const payload = await api.suggest(
          {
            model_id: session.modelId!,
            project_id: session.projectId!,
            runs,
            ...(seedRaw === "" ? {} : { seed: parseInt(seedRaw, 10) }),
          },
          runController?.signal,
        );
        if (!acceptRun(session, token, runSnapshotFromPayload(payload))) return;
        rowRisks = new Map();
        recordedId = null;
        selectedRisks = null;
        renderSuggestions();
        renderRepro();
        renderRisksScreen();
        say(`run finished: ${payload.result.suggestions.length} distinct assignment(s)`);
        void fetchRowRisks(token);
        void refreshSelectedRisks();
      } catch (err) {
        if (session.runToken === token) say(describe(err), true);
      } finally {
        if (session.runToken === token) {
          must("run-button").removeAttribute("disabled");
          must("cancel-button").setAttribute("disabled", "");
        }
      }
    })();
  }

  must<HTMLButtonElement>("run-button").addEventListener("click", startRun);
  must<HTMLButtonElement>("cancel-button").addEventListener("click", () => {
    runController?.abort();
    beginRun(session); // invalidate the in-flight token
    must("run-button").removeAttribute("disabled");
    must("cancel-button").setAttribute("disabled", "");
    say("run cancelled");
  });

  function riskBadge(index: number): HTMLElement {
    const counts = rowRisks.get(index);
    if (!counts) return el("span", { class: "badge muted" }, ["…"]);
    const cls = counts.high > 0 ? "bad" : counts.total > 0 ? "warn" : "ok";
    const badge = el("span", { class: `badge ${cls}` }, [String(counts.total)]);
    badge.title = `high ${counts.high} · medium ${counts.medium} · low ${counts.low}`;
    return badge;
  }

  function renderSuggestions(): void {
    const box = must("suggestion-table");
    const banner = must("stale-banner");
    const record = must<HTMLButtonElement>("record-button");
    const run = session.lastRun;
    const stale = suggestionIsStale(session);
    banner.classList.toggle("visible", stale);
    record.disabled = !canRecordDecision(session);
    if (!run) {
      box.replaceChildren(el("p", { class: "hint" }, ["no run yet"]));
      return;
    }
    const shares = percentShares(run.result.suggestions.map((s) => s.frequency));
    const table = el("table", { class: `ranking${stale ? " stale" : ""}` });
    table.append(
      el("tr", {}, [
        el("th", {}, ["#"]),
        el("th", {}, ["assignment"]),
        el("th", {}, ["frequency"]),
        el("th", {}, ["mean cost"]),
        el("th", {}, ["risks"]),
      ]),
    );
    run.result.suggestions.forEach((row: SuggestionRow, index: number) => {
      const chips = assignmentChips(run.result.tasks, row.assignment).map((text) =>
        el("span", { class: "chip small" }, [text]),
      );
      const share = shares[index] ?? "0.0";
      const bar = el("div", { class: "bar" }, [
        el("div", { class: "bar-fill", style: `width:${share}%` }),
        el("span", { class: "bar-label" }, [`${share}%`]),
      ]);
      const tr = el("tr", { class: "selectable" }, [
        el("td", {}, [String(index + 1)]),
        el("td", {}, chips),
        el("td", {}, [bar]),
        el("td", {}, [formatCost(row.mean_cost)]),
        el("td", {}, [riskBadge(index)]),
      ]);
      if (session.selected && row.assignment.join("") === session.selected.join("")) {
        tr.classList.add("selected");
      }
      tr.addEventListener("click", () => {
        selectAssignment(session, row.assignment);
        renderSuggestions();
        void refreshSelectedRisks();
      });
      table.append(tr);
    });
    box.replaceChildren(table);
    renderDecisionPanel();
  }

  // -- decision action ------------------------------------------------------------

  function renderDecisionPanel(): void {
    const box = must("decision-links");
    if (!recordedId) {
      box.replaceChildren();
      return;
    }
    const json = el("a", { href: api.decisionUrl(recordedId, "json"), target: "_blank" }, [
      "download JSON",
    ]);
    const xml = el("a", { href: api.decisionUrl(recordedId, "xml"), target: "_blank" }, [
      "download XML",
    ]);
    box.replaceChildren(
      el("span", {}, [`decision ${formatHash(recordedId)} recorded — `]),
      json,
      el("span", {}, [" · "]),
      xml,
    );
  }

  must<HTMLButtonElement>("record-button").addEventListener("click", () => {
    const run = session.lastRun;
    if (!run || !session.selected || !canRecordDecision(session)) return;
    void (async () => {
      try {
        const created = await api.createDecision({
          suggestion_id: run.suggestionId,
          selected_assignment: session.selected!,
          ...(session.rulesId ? { rules_id: session.rulesId } : {}),
        });
        recordedId = created.id;
        renderDecisionPanel();
        say(`decision ${formatHash(created.id)} recorded`);
      } catch (err) {
        say(describe(err), true);
      }
    })();
  });

  // -- what-if panel ----------------------------------------------------------------

  function sliderRow(
    label: string,
    value: number,
    onInput: (v: number) => void,
  ): HTMLElement {
    const slider = el("input", {
      type: "range",
      min: "0",
      max: "1",
      step: "0.01",
      value: String(value),
    });
    const out = el("span", { class: "slider-value" }, [value.toFixed(2)]);
    slider.addEventListener("input", () => {
      out.textContent = parseFloat(slider.value).toFixed(2);
      onInput(parseFloat(slider.value));
    });
    return el("label", { class: "slider-row" }, [el("span", {}, [label]), slider, out]);
  }

  let pendingGoalWeights: Record<string, number> = {};
  let pendingEdgeWeights: Record<string, number> = {};

  function renderWhatifControls(): void {
    const goalBox = must("goal-sliders");
    const edgeBox = must("edge-sliders");
    if (!modelDoc) {
      goalBox.replaceChildren(el("p", { class: "hint" }, ["load a model first"]));
      edgeBox.replaceChildren();
      return;
    }
    pendingGoalWeights = { ...modelDoc.goal_weights };
    pendingEdgeWeights = Object.fromEntries(
      modelDoc.edges.map((e) => [`${e.source}${e.target}`, e.weight]),
    );
    goalBox.replaceChildren(
      ...Object.entries(modelDoc.goal_weights).map(([goal, weight]) =>
        sliderRow(goal, weight, (v) => {
          pendingGoalWeights[goal] = v;
        }),
      ),
    );
    edgeBox.replaceChildren(
      ...modelDoc.edges.map((edge) =>
        sliderRow(
          `${edge.source} ${edge.sign > 0 ? "→+" : "→−"} ${edge.target}`,
          edge.weight,
          (v) => {
            pendingEdgeWeights[`${edge.source}${edge.target}`] = v;
          },
        ),
      ),
    );
  }

  function adjustedModel(): ModelDocument {
    if (!modelDoc) throw new Error("no model loaded");
    const total = Object.values(pendingGoalWeights).reduce((a, b) => a + b, 0);
    const normalized =
      total > 0
        ? Object.fromEntries(
            Object.entries(pendingGoalWeights).map(([goal, w]) => [goal, w / total]),
          )
        : { ...modelDoc.goal_weights };
    return {
      ...modelDoc,
      edges: modelDoc.edges.map((edge) => ({
        ...edge,
        weight: Math.max(pendingEdgeWeights[`${edge.source}${edge.target}`] ?? edge.weight, 0.01),
      })),
      goal_weights: normalized,
    };
  }

  function renderDiff(): void {
    const box = must("diff-table");
    if (!diffRows) {
      box.replaceChildren(el("p", { class: "hint" }, ["no comparison yet"]));
      return;
    }
    const table = el("table", { class: "ranking" });
    table.append(
      el("tr", {}, [
        el("th", {}, ["assignment"]),
        el("th", {}, ["before"]),
        el("th", {}, ["after"]),
        el("th", {}, ["move"]),
      ]),
    );
    for (const row of diffRows) {
      const delta = rankDelta(row);
      const move =
        row.beforeRank === null
          ? "entered"
          : row.afterRank === null
            ? "left"
            : delta === 0
              ? "＝"
              : delta! > 0
                ? `↑${delta}`
                : `↓${-delta!}`;
      const fmt = (rank: number | null, freq: number | null) =>
        rank === null ? "—" : `#${rank} (${((freq ?? 0) * 100).toFixed(1)}%)`;
      table.append(
        el("tr", { class: delta === 0 ? "" : "moved" }, [
          el("td", {}, [row.assignment.join(" · ")]),
          el("td", {}, [fmt(row.beforeRank, row.beforeFrequency)]),
          el("td", {}, [fmt(row.afterRank, row.afterFrequency)]),
          el("td", {}, [move]),
        ]),
      );
    }
    box.replaceChildren(table);
  }

  must<HTMLButtonElement>("whatif-apply").addEventListener("click", () => {
    const before = session.lastRun;
    if (!modelDoc || !session.modelId || !session.modelHash) {
      return say("load a model first", true);
    }
    if (!before) return say("run a simulation first so there is a baseline to compare", true);
    void (async () => {
      try {
        const patched = await api.patchModel(session.modelId!, session.modelHash!, adjustedModel());
        const stored = await api.getModel(patched.id);
        modelDoc = stored.document;
        modelLoaded(session, stored.id, stored.hash);
        renderWhatifControls();
        const token = beginRun(session);
        const payload = await api.suggest({
          model_id: session.modelId!,
          project_id: session.projectId!,
          runs: before.runs,
          seed: before.seed, // pinned: isolates the weight change from sampling noise
        });
        if (!acceptRun(session, token, runSnapshotFromPayload(payload))) return;
        rowRisks = new Map();
        recordedId = null;
        diffRows = rankingDiff(before.result.suggestions, payload.result.suggestions);
        renderDiff();
        renderSuggestions();
        renderRepro();
        say("re-ranked with pinned seed; diff below");
        void fetchRowRisks(token);
      } catch (err) {
        say(describe(err), true);
      }
    })();
  });

  // -- risk screen --------------------------------------------------------------------

  async function refreshSelectedRisks(): Promise<void> {
    if (!session.selected || !session.rulesId || !session.modelId || !session.projectId) {
      selectedRisks = null;
      renderRisksScreen();
      return;
    }
    try {
      const report = await api.risks({
        model_id: session.modelId,
        project_id: session.projectId,
        rules_id: session.rulesId,
        assignment: session.selected,
      });
      selectedRisks = report.findings;
    } catch (err) {
      selectedRisks = null;
      say(describe(err), true);
    }
    renderRisksScreen();
  }

  function findingCard(finding: RiskFinding): HTMLElement {
    return el("div", { class: `risk-card ${finding.severity}` }, [
      el("span", { class: `sev ${finding.severity}` }, [finding.severity]),
      el("strong", {}, [finding.problem]),
      el("code", { class: "rule-id" }, [finding.rule_id]),
      el("p", { class: "explanation" }, [finding.explanation]),
    ]);
  }

  function renderRisksScreen(): void {
    const box = must("risk-groups");
    const heading = must("risk-selected");
    if (!session.selected || !session.lastRun) {
      heading.textContent = "select an assignment on the suggestions screen";
      box.replaceChildren();
      return;
    }
    heading.replaceChildren(
      ...assignmentChips(session.lastRun.result.tasks, session.selected).map((text) =>
        el("span", { class: "chip small" }, [text]),
      ),
    );
    if (!session.rulesId) {
      box.replaceChildren(el("p", { class: "hint" }, ["load rules to analyze risks"]));
      return;
    }
    if (selectedRisks === null) {
      box.replaceChildren(el("p", { class: "hint" }, ["fetching…"]));
      return;
    }
    if (selectedRisks.length === 0) {
      box.replaceChildren(el("p", { class: "hint ok" }, ["no findings for this assignment"]));
      return;
    }
    const groups = new Map<string, RiskFinding[]>();
    for (const finding of selectedRisks) {
      const label =
        finding.scope === "site_pair"
          ? `interface: ${finding.binding.join(" ↔ ")}`
          : finding.scope === "site"
            ? `site: ${finding.binding.join("")}`
            : finding.binding.length
              ? `${finding.scope}: ${finding.binding.join(" · ")}`
              : "project-wide";
      (groups.get(label) ?? groups.set(label, []).get(label)!).push(finding);
    }
    box.replaceChildren(
      ...[...groups.entries()].map(([label, findings]) =>
        el("div", { class: "risk-group" }, [
          el("h3", {}, [label]),
          ...findings.map(findingCard),
        ]),
      ),
    );
  }

  // -- boot ---------------------------------------------------------------------------

  must("api-base").textContent = api.baseUrl;
  renderEntities();
  renderValidation();
  renderSuggestions();
  renderWhatifControls();
  renderRisksScreen();
  renderRepro();
  api
    .health()
    .then((h) => say(`service reachable · search backend: ${h.backend}`))
    .catch(() => say(`service not reachable at ${api.baseUrl} — start it with: gsdalloc serve`, true));
}
