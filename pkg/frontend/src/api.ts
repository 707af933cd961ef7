/**
 * Thin typed client for the plan-space HTTP service.
 *
 * All reasoning happens server-side; this layer only moves JSON.  Counts and
 * fraction parts arrive as decimal strings and are passed through untouched.
 */

import type { Fraction } from "./fraction.js";

export interface FacetDto {
  operator: string;
  sign: "include" | "exclude";
}

export interface SpaceSummary {
  count: string;
  length: number;
  has_plans: boolean;
  brave: string[];
  cautious: string[];
  facets: FacetDto[];
}

export interface CommitmentDto {
  kind: "enforce" | "forbid" | "prefix";
  operator: string;
  step?: number;
}

export interface FacetEntry {
  operator: string;
  sign: "include" | "exclude";
  significance: Fraction;
}

export interface Snapshot {
  count: string;
  commitments: CommitmentDto[];
  facet_count: number;
  facets: FacetEntry[];
  plans: string[][];
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }

  get isConflict(): boolean {
    return this.status === 409;
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText || `status ${response.status}`;
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") detail = body.detail;
    else if (body.detail !== undefined) detail = JSON.stringify(body.detail);
  } catch {
    // non-JSON error body: keep the status text
  }
  return new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(readonly baseUrl: string = "") {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      throw await parseError(response);
    }
    return (await response.json()) as T;
  }

  async createTask(task: unknown): Promise<string> {
    const out = await this.request<{ task_id: string }>("POST", "/tasks", task);
    return out.task_id;
  }

  async createSpace(taskId: string, length: number): Promise<{ space_id: string; count: string }> {
    return this.request("POST", `/tasks/${taskId}/spaces`, { length });
  }

  async getSpace(spaceId: string): Promise<SpaceSummary> {
    return this.request("GET", `/spaces/${spaceId}`);
  }

  async probability(spaceId: string, query: string): Promise<Fraction> {
    return this.request("POST", `/spaces/${spaceId}/prob`, { query });
  }

  async openSession(spaceId: string): Promise<{ session_id: string; snapshot: Snapshot }> {
    return this.request("POST", `/spaces/${spaceId}/sessions`);
  }

  async commit(sessionId: string, commitment: CommitmentDto): Promise<Snapshot> {
    return this.request("POST", `/sessions/${sessionId}/commit`, { commitment });
  }

  async undo(sessionId: string): Promise<Snapshot> {
    return this.request("POST", `/sessions/${sessionId}/undo`);
  }

  async getSnapshot(sessionId: string): Promise<Snapshot> {
    return this.request("GET", `/sessions/${sessionId}`);
  }
}
