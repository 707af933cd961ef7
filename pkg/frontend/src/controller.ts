/**
 * Session controller: owns the UI state and talks to the service.
 *
 * The UI is a pure view over server snapshots; this layer never derives a
 * count or probability itself.  At most one mutation (commit/undo chain) is in
 * flight per session — further clicks are ignored until it settles.  Conflicts
 * (409) become inline explanations; network failures and 5xx responses become
 * a retry banner that preserves the session untouched.
 */

import { ApiClient, ApiError } from "./api.js";
import type { CommitmentDto, Snapshot, SpaceSummary } from "./api.js";
import type { Fraction } from "./fraction.js";

export interface ProbeState {
  query: string;
  result: Fraction | null;
  error: string | null;
}

export interface AppState {
  phase: "setup" | "loading" | "ready";
  setupError: string | null;
  banner: { message: string; retry: () => Promise<void> } | null;
  conflict: string | null;
  taskId: string | null;
  spaceId: string | null;
  sessionId: string | null;
  summary: SpaceSummary | null;
  snapshot: Snapshot | null;
  probe: ProbeState;
  mutating: boolean;
}

export function initialState(): AppState {
  return {
    phase: "setup",
    setupError: null,
    banner: null,
    conflict: null,
    taskId: null,
    spaceId: null,
    sessionId: null,
    summary: null,
    snapshot: null,
    probe: { query: "", result: null, error: null },
    mutating: false,
  };
}

export class Controller {
  readonly state: AppState = initialState();

  constructor(
    readonly api: ApiClient,
    readonly onChange: () => void = () => {},
  ) {}

  private emit(): void {
    this.onChange();
  }

  /** Parse the task text, build the space, and open a session. */
  async loadTask(taskText: string, bound: number): Promise<void> {
    let task: unknown;
    try {
      task = JSON.parse(taskText);
    } catch (error) {
      this.state.setupError = `task is not valid JSON: ${(error as Error).message}`;
      this.emit();
      return;
    }
    if (!Number.isInteger(bound) || bound < 0) {
      this.state.setupError = "length bound must be a non-negative integer";
      this.emit();
      return;
    }
    this.state.phase = "loading";
    this.state.setupError = null;
    this.state.banner = null;
    this.emit();
    try {
      const taskId = await this.api.createTask(task);
      const space = await this.api.createSpace(taskId, bound);
      const summary = await this.api.getSpace(space.space_id);
      const session = await this.api.openSession(space.space_id);
      this.state.taskId = taskId;
      this.state.spaceId = space.space_id;
      this.state.sessionId = session.session_id;
      this.state.summary = summary;
      this.state.snapshot = session.snapshot;
      this.state.phase = "ready";
      this.state.conflict = null;
    } catch (error) {
      if (error instanceof ApiError && error.status < 500) {
        this.state.phase = "setup";
        this.state.setupError = error.detail;
      } else {
        this.state.phase = "setup";
        this.state.banner = {
          message: describe(error),
          retry: () => this.loadTask(taskText, bound),
        };
      }
    }
    this.emit();
  }

  /** Run one mutation; concurrent clicks are dropped, not queued. */
  private async mutate(action: () => Promise<Snapshot>): Promise<void> {
    if (this.state.mutating || !this.state.sessionId) return;
    this.state.mutating = true;
    this.state.conflict = null;
    this.emit();
    try {
      this.state.snapshot = await action();
      this.state.banner = null;
    } catch (error) {
      if (error instanceof ApiError && error.isConflict) {
        this.state.conflict = error.detail;
      } else if (error instanceof ApiError && error.status < 500) {
        this.state.conflict = error.detail;
      } else {
        this.state.banner = {
          message: describe(error),
          retry: async () => {
            this.state.banner = null;
            this.state.mutating = false;
            await this.mutate(action);
          },
        };
      }
    }
    this.state.mutating = false;
    this.emit();
  }

  async commit(commitment: CommitmentDto): Promise<void> {
    await this.mutate(() => this.api.commit(this.state.sessionId!, commitment));
  }

  async enforce(operator: string): Promise<void> {
    await this.commit({ kind: "enforce", operator });
  }

  async forbid(operator: string): Promise<void> {
    await this.commit({ kind: "forbid", operator });
  }

  async undo(steps = 1): Promise<void> {
    await this.mutate(async () => {
      let snapshot = this.state.snapshot!;
      for (let i = 0; i < steps; i += 1) {
        snapshot = await this.api.undo(this.state.sessionId!);
      }
      return snapshot;
    });
  }

  /** Undo back to the state right after commitment `index` (-1 = base). */
  async undoTo(index: number): Promise<void> {
    const depth = this.state.snapshot?.commitments.length ?? 0;
    const steps = depth - (index + 1);
    if (steps > 0) await this.undo(steps);
  }

  async runQuery(query: string): Promise<void> {
    if (!this.state.spaceId) return;
    this.state.probe = { query, result: null, error: null };
    this.emit();
    try {
      this.state.probe.result = await this.api.probability(this.state.spaceId, query);
    } catch (error) {
      if (error instanceof ApiError && error.status < 500) {
        this.state.probe.error = error.detail;
      } else {
        this.state.banner = { message: describe(error), retry: () => this.runQuery(query) };
      }
    }
    this.emit();
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return error.detail;
  if (error instanceof Error) return error.message;
  return String(error);
}
