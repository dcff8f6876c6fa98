// Session bookkeeping: which documents are loaded, what the last simulation
// run was, and whether that run still reflects the documents on screen.
// Staleness is the load-bearing rule here: a suggestion computed from an
// older model or project hash must be flagged and can never be recorded.

import type { SuggestionResult } from "./types.js";

export type RunSnapshot = {
  suggestionId: string;
  modelHash: string;
  projectHash: string;
  runs: number;
  seed: number;
  result: SuggestionResult;
};

export type Session = {
  modelId: string | null;
  modelHash: string | null;
  projectId: string | null;
  projectHash: string | null;
  rulesId: string | null;
  projectDirty: boolean;
  lastRun: RunSnapshot | null;
  selected: string[] | null;
  runToken: number;
};

export function newSession(): Session {
  return {
    modelId: null,
    modelHash: null,
    projectId: null,
    projectHash: null,
    rulesId: null,
    projectDirty: false,
    lastRun: null,
    selected: null,
    runToken: 0,
  };
}

export function modelLoaded(s: Session, id: string, hash: string): void {
  s.modelId = id;
  s.modelHash = hash;
}

export function projectSaved(s: Session, id: string, hash: string): void {
  s.projectId = id;
  s.projectHash = hash;
  s.projectDirty = false;
}

/** Any unsaved edit to the project draft. */
export function projectEdited(s: Session): void {
  s.projectDirty = true;
}

/**
 * True when the last run no longer matches what is on screen: the model or
 * project hash moved, or the project draft has unsaved edits.
 */
export function suggestionIsStale(s: Session): boolean {
  if (s.lastRun === null) return false;
  if (s.projectDirty) return true;
  return s.lastRun.modelHash !== s.modelHash || s.lastRun.projectHash !== s.projectHash;
}

export function canRecordDecision(s: Session): boolean {
  return s.lastRun !== null && s.selected !== null && !suggestionIsStale(s);
}

/** Start a run; the returned token names it for acceptRun. */
export function beginRun(s: Session): number {
  s.runToken += 1;
  return s.runToken;
}

/**
 * Install a finished run, unless a newer run was started meanwhile; stale
 * responses are dropped and the function reports whether this one landed.
 */
export function acceptRun(s: Session, token: number, run: RunSnapshot): boolean {
  if (token !== s.runToken) return false;
  s.lastRun = run;
  s.selected = run.result.suggestions[0]?.assignment ?? null;
  return true;
}

export function selectAssignment(s: Session, assignment: string[]): void {
  s.selected = assignment;
}
