// Wire types for the allocation service. Shapes mirror the JSON the HTTP
// API actually returns; the UI never computes costs or risks on its own.

export type FactorScope =
  | "project"
  | "task"
  | "site"
  | "task_pair"
  | "site_pair"
  | "task_site";

export type FactorKind = "ordinal" | "boolean";

export const LEVELS = ["very_low", "low", "medium", "high", "very_high"] as const;

export type LevelName = (typeof LEVELS)[number];

export type FactorDef = {
  id: string;
  display_name: string;
  scope: FactorScope;
  kind: FactorKind;
};

export type ModelDocument = {
  schema_version: number;
  factors: FactorDef[];
  nodes: {
    id: string;
    role: string;
    polarity?: string | null;
    aggregation?: string | null;
    noise_sigma?: number | null;
  }[];
  edges: { source: string; target: string; sign: number; weight: number }[];
  goal_weights: Record<string, number>;
};

export type ValueEntry = {
  factor: string;
  binding: "*" | string[];
  value: LevelName | boolean;
};

export type ProjectDocument = {
  schema_version?: number;
  tasks: string[];
  sites: string[];
  availability: Record<string, string[]>;
  values: ValueEntry[];
  goal_weight_overrides?: Record<string, number>;
};

export type Finding = {
  code: string;
  message: string;
  locus: string[];
  line?: number;
  column?: number;
};

export type ValidateResponse = { ok: boolean; findings: Finding[] };

export type SuggestionRow = {
  assignment: string[];
  wins: number;
  frequency: number;
  mean_cost: number;
};

export type SuggestionResult = {
  tasks: string[];
  runs: number;
  seed: number;
  suggestions: SuggestionRow[];
};

export type SuggestionPayload = {
  suggestion_id: string;
  model_hash: string;
  project_hash: string;
  result: SuggestionResult;
};

export type RiskFinding = {
  rule_id: string;
  problem: string;
  severity: "low" | "medium" | "high" | string;
  scope: FactorScope;
  binding: string[];
  explanation: string;
};

export type RiskReport = { findings: RiskFinding[] };

export type DocumentRef = { id: string; hash: string };

export type StoredDocument<T> = DocumentRef & { document: T };

export type RulesCreated = DocumentRef & { count: number; rules: string[] };

export type DecisionRecord = {
  schema_version: number;
  created_at: string;
  model_hash: string;
  project_hash: string;
  runs: number;
  seed: number;
  suggestions: SuggestionResult;
  selected?: string[];
  risks?: RiskFinding[];
  [key: string]: unknown;
};

export type DecisionCreated = { id: string; record: DecisionRecord };

export type WhatIfBreakdown = {
  assignment: string[];
  total_mean_cost: number;
  execution: { task: string; site: string; mean_cost: number; distribution: number[] }[];
  communication: {
    tasks: string[];
    sites: string[];
    mean_cost: number;
    distribution: number[];
  }[];
  level_images: number[];
};
