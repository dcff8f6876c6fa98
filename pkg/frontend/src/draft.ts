// Editable project draft behind the characterization screen. The draft is
// plain data the forms mutate; toDocument() turns it into the JSON the API
// stores. Values are kept in a map keyed by factor + normalized binding so
// pair entries stay order-insensitive, and serialized in sorted order so the
// same characterization always produces the same content hash server-side.

import type { FactorDef, FactorScope, LevelName, ProjectDocument, ValueEntry } from "./types.js";

export type Draft = {
  tasks: string[];
  sites: string[];
  // absent task key = available everywhere
  availability: Record<string, string[]>;
  values: Map<string, ValueEntry>;
};

export function newDraft(): Draft {
  return { tasks: [], sites: [], availability: {}, values: new Map() };
}

export function normalizeBinding(scope: FactorScope, binding: "*" | string[]): "*" | string[] {
  if (binding === "*") return "*";
  if (scope === "task_pair" || scope === "site_pair") return [...binding].sort();
  return binding;
}

export function valueKey(factor: string, binding: "*" | string[]): string {
  return binding === "*" ? `${factor}*` : `${factor}${binding.join("")}`;
}

export function setValue(
  draft: Draft,
  factor: FactorDef,
  binding: "*" | string[],
  value: LevelName | boolean,
): void {
  const normalized = normalizeBinding(factor.scope, binding);
  draft.values.set(valueKey(factor.id, normalized), {
    factor: factor.id,
    binding: normalized,
    value,
  });
}

export function clearValue(draft: Draft, factor: FactorDef, binding: "*" | string[]): void {
  draft.values.delete(valueKey(factor.id, normalizeBinding(factor.scope, binding)));
}

/** Exact entry first, wildcard fallback second; undefined when unset. */
export function currentValue(
  draft: Draft,
  factor: FactorDef,
  binding: "*" | string[],
): ValueEntry | undefined {
  const exact = draft.values.get(valueKey(factor.id, normalizeBinding(factor.scope, binding)));
  if (exact) return exact;
  return draft.values.get(valueKey(factor.id, "*"));
}

export function availableSites(draft: Draft, task: string): string[] {
  return draft.availability[task] ?? draft.sites;
}

export function toggleAvailability(draft: Draft, task: string, site: string): void {
  const current = new Set(availableSites(draft, task));
  if (current.has(site)) current.delete(site);
  else current.add(site);
  draft.availability[task] = draft.sites.filter((s) => current.has(s));
}

export function addTask(draft: Draft, task: string): boolean {
  const name = task.trim();
  if (!name || draft.tasks.includes(name)) return false;
  draft.tasks.push(name);
  return true;
}

export function addSite(draft: Draft, site: string): boolean {
  const name = site.trim();
  if (!name || draft.sites.includes(name)) return false;
  draft.sites.push(name);
  return true;
}

export function removeTask(draft: Draft, task: string): void {
  draft.tasks = draft.tasks.filter((t) => t !== task);
  delete draft.availability[task];
  dropValuesNaming(draft, task);
}

export function removeSite(draft: Draft, site: string): void {
  draft.sites = draft.sites.filter((s) => s !== site);
  for (const task of Object.keys(draft.availability)) {
    draft.availability[task] = (draft.availability[task] ?? []).filter((s) => s !== site);
  }
  dropValuesNaming(draft, site);
}

function dropValuesNaming(draft: Draft, entity: string): void {
  for (const [key, entry] of [...draft.values]) {
    if (entry.binding !== "*" && entry.binding.includes(entity)) draft.values.delete(key);
  }
}

export type DemandedRow = { factor: FactorDef; binding: string[] };

function pairs(items: string[]): string[][] {
  const out: string[][] = [];
  for (let i = 0; i < items.length; i++) {
    for (let j = i + 1; j < items.length; j++) out.push([items[i]!, items[j]!]);
  }
  return out;
}

/**
 * One form row per factor x binding the model asks for. This drives the
 * editing grid only; whether the characterization is actually complete is
 * the validation endpoint's verdict.
 */
export function demandedRows(factors: FactorDef[], draft: Draft): DemandedRow[] {
  const rows: DemandedRow[] = [];
  for (const factor of factors) {
    const bindings: string[][] =
      factor.scope === "project"
        ? [[]]
        : factor.scope === "task"
          ? draft.tasks.map((t) => [t])
          : factor.scope === "site"
            ? draft.sites.map((s) => [s])
            : factor.scope === "task_pair"
              ? pairs(draft.tasks)
              : factor.scope === "site_pair"
                ? pairs(draft.sites)
                : draft.tasks.flatMap((t) => availableSites(draft, t).map((s) => [t, s]));
    for (const binding of bindings) rows.push({ factor, binding });
  }
  return rows;
}

export function toDocument(draft: Draft): ProjectDocument {
  const values = [...draft.values.values()].sort((a, b) => {
    const ka = valueKey(a.factor, a.binding);
    const kb = valueKey(b.factor, b.binding);
    return ka < kb ? -1 : ka > kb ? 1 : 0;
  });
  const availability: Record<string, string[]> = {};
  for (const task of draft.tasks) {
    const sites = draft.availability[task];
    if (sites !== undefined) availability[task] = sites;
  }
  return {
    tasks: [...draft.tasks],
    sites: [...draft.sites],
    availability,
    values,
  };
}

export function fromDocument(doc: ProjectDocument, factors: FactorDef[]): Draft {
  const draft = newDraft();
  draft.tasks = [...doc.tasks];
  draft.sites = [...doc.sites];
  draft.availability = Object.fromEntries(
    Object.entries(doc.availability ?? {}).map(([t, s]) => [t, [...s]]),
  );
  const byId = new Map(factors.map((f) => [f.id, f]));
  for (const entry of doc.values ?? []) {
    const scope = byId.get(entry.factor)?.scope ?? "project";
    const binding = normalizeBinding(scope, entry.binding);
    draft.values.set(valueKey(entry.factor, binding), { ...entry, binding });
  }
  return draft;
}
