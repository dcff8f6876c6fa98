// Thin typed client over the allocation service. Every method maps to one
// endpoint; domain rejections arrive as a 400 whose body is the findings
// list itself, which ApiError carries through to the UI.

import type {
  DecisionCreated,
  DocumentRef,
  Finding,
  ModelDocument,
  ProjectDocument,
  RiskReport,
  RulesCreated,
  StoredDocument,
  SuggestionPayload,
  ValidateResponse,
  WhatIfBreakdown,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  findings: Finding[];

  constructor(status: number, message: string, findings: Finding[] = []) {
    super(message);
    this.name = "ApiError";
    this.status = status;
    this.findings = findings;
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export type SuggestRequest = {
  model_id: string;
  project_id: string;
  runs?: number;
  seed?: number;
  top?: number;
};

export type RisksRequest = {
  model_id: string;
  project_id: string;
  rules_id: string;
  assignment: string[] | Record<string, string>;
};

export type DecisionRequest = {
  suggestion_id: string;
  selected_assignment: string[];
  rules_id?: string;
};

export class ApiClient {
  readonly baseUrl: string;
  private readonly fetchImpl: FetchLike;

  constructor(baseUrl: string, fetchImpl?: FetchLike) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
    // never store bare global fetch: calling it as a method rebinds `this`
    this.fetchImpl = fetchImpl ?? ((input, init) => fetch(input, init));
  }

  private async request<T>(
    method: string,
    path: string,
    body?: unknown,
    signal?: AbortSignal,
  ): Promise<T> {
    const init: RequestInit = { method, signal };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const res = await this.fetchImpl(this.baseUrl + path, init);
    if (!res.ok) {
      let findings: Finding[] = [];
      let message = `${method} ${path} failed with ${res.status}`;
      try {
        const payload = await res.json();
        if (Array.isArray(payload)) {
          findings = payload as Finding[];
          message = findings[0]?.message ?? message;
        } else if (payload && typeof payload.detail === "string") {
          message = payload.detail;
        }
      } catch {
        // non-JSON error body; keep the generic message
      }
      throw new ApiError(res.status, message, findings);
    }
    return (await res.json()) as T;
  }

  health(): Promise<{ status: string; backend: string }> {
    return this.request("GET", "/api/health");
  }

  createModel(document: ModelDocument): Promise<DocumentRef> {
    return this.request("POST", "/api/models", { document });
  }

  getModel(id: string): Promise<StoredDocument<ModelDocument>> {
    return this.request("GET", `/api/models/${id}`);
  }

  patchModel(id: string, baseHash: string, document: ModelDocument): Promise<DocumentRef> {
    return this.request("PATCH", `/api/models/${id}`, { base_hash: baseHash, document });
  }

  deriveModel(rules: string, goals: unknown): Promise<StoredDocument<ModelDocument>> {
    return this.request("POST", "/api/models/derive", { rules, goals });
  }

  createProject(document: ProjectDocument): Promise<DocumentRef> {
    return this.request("POST", "/api/projects", { document });
  }

  getProject(id: string): Promise<StoredDocument<ProjectDocument>> {
    return this.request("GET", `/api/projects/${id}`);
  }

  createRules(text: string): Promise<RulesCreated> {
    return this.request("POST", "/api/rules", { document: text });
  }

  validate(modelId: string, projectId?: string): Promise<ValidateResponse> {
    const body: Record<string, string> = { model_id: modelId };
    if (projectId) body.project_id = projectId;
    return this.request("POST", "/api/validate", body);
  }

  suggest(req: SuggestRequest, signal?: AbortSignal): Promise<SuggestionPayload> {
    return this.request("POST", "/api/suggestions", req, signal);
  }

  risks(req: RisksRequest, signal?: AbortSignal): Promise<RiskReport> {
    return this.request("POST", "/api/risks", req, signal);
  }

  whatif(modelId: string, projectId: string, assignment: string[]): Promise<WhatIfBreakdown> {
    return this.request("POST", "/api/whatif", {
      model_id: modelId,
      project_id: projectId,
      assignment,
    });
  }

  createDecision(req: DecisionRequest): Promise<DecisionCreated> {
    return this.request("POST", "/api/decisions", req);
  }

  /** Download URL for a stored decision; the browser fetches this directly. */
  decisionUrl(id: string, format: "json" | "xml"): string {
    return `${this.baseUrl}/api/decisions/${id}?format=${format}`;
  }

  replayDecision(id: string): Promise<{ match: boolean }> {
    return this.request("POST", `/api/decisions/${id}/replay`);
  }
}
