// Typed client for the session API. Every call returns the parsed JSON
// body; non-2xx responses throw ApiError with the server's error code.

export interface NodeSpec {
  id: string;
  label?: string;
  states: string[];
  parents?: string[];
  cpt: number[][];
  observable?: boolean;
  target?: boolean;
  cost?: number;
  severity?: number[];
  urgency?: number;
}

export interface NetworkSpec {
  id: string;
  nodes: NodeSpec[];
}

export interface SourceSpec {
  id: string;
  yields: string[];
  cost: number;
  reliability?: Record<string, number[][]> | null;
}

export type FindingInput =
  | { node: string; state: string }
  | { node: string; likelihood: number[] };

export type HypothesisStatus = "VERIFIED" | "REFUTED" | "UNCERTAIN";

export interface HypothesisRow {
  node: string;
  state: string;
  state_index: number;
  belief: number;
  status: HypothesisStatus;
}

export interface GoalRow {
  kind: "VERIFY" | "DIFFERENTIATE";
  nodes: string[];
  score: number;
  rationale: string;
}

export interface RankedSourceRow {
  source: SourceSpec;
  expected_gain: number;
  gain_per_cost: number;
}

export interface BeliefDelta {
  changed: Record<string, { before: number[]; after: number[] }>;
  status_changes: { node: string; state_index: number; from: string; to: string }[];
}

export interface SortedFindingRow {
  finding: FindingInput;
  relevant_targets: string[];
  goal_relevant: boolean;
  lateral: boolean;
  newly_triggered: HypothesisRow[];
}

export interface Termination {
  terminated: boolean;
  reason: "RESOLVED" | "NOT_WORTH_COST" | "FORCED" | null;
}

export interface TargetCall {
  node: string;
  committed: boolean;
  state: string | null;
  state_index: number | null;
  belief: number;
  belief_vector: number[];
}

export interface CommitReport {
  targets: TargetCall[];
  termination: Termination;
  spent: number;
  findings: FindingInput[];
  residual_uncertain: HypothesisRow[];
}

export interface SessionDescription {
  session_id: string;
  revision: number;
  created: string;
  updated: string;
  network: NetworkSpec;
  config: Record<string, unknown>;
  sources: SourceSpec[];
  ledger: FindingInput[];
  spent: number;
  invocations: number;
  failed_sources: string[];
  pending_yields: string[];
}

export interface TraceEvent {
  seq: number;
  type: string;
  [key: string]: unknown;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

interface ErrorBody {
  error?: { code?: string; message?: string };
}

export class Client {
  constructor(private readonly base: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await fetch(this.base + path, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await response.json()) as T & ErrorBody;
    if (!response.ok) {
      const err = payload.error ?? {};
      throw new ApiError(response.status, err.code ?? "ERR_UNKNOWN", err.message ?? response.statusText);
    }
    return payload;
  }

  createSession(body: {
    network: NetworkSpec;
    config?: Record<string, unknown>;
    sources?: SourceSpec[];
    initial_findings?: FindingInput[];
  }): Promise<{ session_id: string; revision: number }> {
    return this.request("POST", "/sessions", body);
  }

  listSessions(): Promise<{ sessions: string[] }> {
    return this.request("GET", "/sessions");
  }

  describe(id: string): Promise<SessionDescription> {
    return this.request("GET", `/sessions/${id}`);
  }

  beliefs(id: string): Promise<{ revision: number; beliefs: Record<string, number[]> }> {
    return this.request("GET", `/sessions/${id}/beliefs`);
  }

  hypotheses(id: string): Promise<{ revision: number; hypotheses: HypothesisRow[] }> {
    return this.request("GET", `/sessions/${id}/hypotheses`);
  }

  goals(id: string): Promise<{ revision: number; goals: GoalRow[] }> {
    return this.request("GET", `/sessions/${id}/goals`);
  }

  sources(id: string): Promise<{ revision: number; ranked: RankedSourceRow[] }> {
    return this.request("GET", `/sessions/${id}/sources`);
  }

  termination(id: string): Promise<{ revision: number } & Termination> {
    return this.request("GET", `/sessions/${id}/termination`);
  }

  trace(id: string): Promise<{ revision: number; trace: TraceEvent[] }> {
    return this.request("GET", `/sessions/${id}/trace`);
  }

  submitEvidence(
    id: string,
    findings: FindingInput[],
    expectedRevision: number,
  ): Promise<{ revision: number; delta: BeliefDelta; sorted_findings: SortedFindingRow[] }> {
    return this.request("POST", `/sessions/${id}/evidence`, {
      findings,
      expected_revision: expectedRevision,
    });
  }

  invoke(
    id: string,
    sourceId: string,
    expectedRevision: number,
  ): Promise<{ revision: number; yields: string[]; spent: number }> {
    return this.request("POST", `/sessions/${id}/invoke`, {
      source_id: sourceId,
      expected_revision: expectedRevision,
    });
  }

  commit(id: string, expectedRevision: number): Promise<{ revision: number; report: CommitReport }> {
    return this.request("POST", `/sessions/${id}/commit`, {
      expected_revision: expectedRevision,
    });
  }
}
