// Session view model: owns the client, the current revision, and the last
// response from every read endpoint. Actions re-pull whatever a mutation
// invalidates. DOM-free so the cycle can be driven from tests.

import {
  ApiError,
  Client,
  type BeliefDelta,
  type CommitReport,
  type FindingInput,
  type GoalRow,
  type HypothesisRow,
  type NetworkSpec,
  type RankedSourceRow,
  type SessionDescription,
  type SortedFindingRow,
  type SourceSpec,
  type Termination,
  type TraceEvent,
} from "./api.js";

export interface ConsoleView {
  sessionId: string;
  revision: number;
  network: NetworkSpec;
  beliefs: Record<string, number[]>;
  ledger: FindingInput[];
  hypotheses: HypothesisRow[];
  goals: GoalRow[];
  ranked: RankedSourceRow[];
  termination: Termination;
  spent: number;
  pendingYields: string[];
  failedSources: string[];
  trace: TraceEvent[];
  lastDelta: BeliefDelta | null;
  lastSorted: SortedFindingRow[];
  report: CommitReport | null;
}

export class SessionController {
  private view: ConsoleView | null = null;

  constructor(readonly client: Client) {}

  get isOpen(): boolean {
    return this.view !== null;
  }

  get current(): ConsoleView {
    if (!this.view) throw new Error("no session open");
    return this.view;
  }

  async open(sessionId: string): Promise<ConsoleView> {
    const describe = await this.client.describe(sessionId);
    this.view = {
      sessionId,
      revision: describe.revision,
      network: describe.network,
      beliefs: {},
      ledger: describe.ledger,
      hypotheses: [],
      goals: [],
      ranked: [],
      termination: { terminated: false, reason: null },
      spent: describe.spent,
      pendingYields: describe.pending_yields,
      failedSources: describe.failed_sources,
      trace: [],
      lastDelta: null,
      lastSorted: [],
      report: null,
    };
    await this.refresh();
    return this.current;
  }

  async create(body: {
    network: NetworkSpec;
    config?: Record<string, unknown>;
    sources?: SourceSpec[];
    initial_findings?: FindingInput[];
  }): Promise<ConsoleView> {
    const created = await this.client.createSession(body);
    return this.open(created.session_id);
  }

  async refresh(): Promise<ConsoleView> {
    const view = this.current;
    const id = view.sessionId;
    const [describe, beliefs, hypotheses, goals, sources, termination, trace] =
      await Promise.all([
        this.client.describe(id),
        this.client.beliefs(id),
        this.client.hypotheses(id),
        this.client.goals(id),
        this.client.sources(id),
        this.client.termination(id),
        this.client.trace(id),
      ]);
    view.revision = describe.revision;
    view.ledger = describe.ledger;
    view.spent = describe.spent;
    view.pendingYields = describe.pending_yields;
    view.failedSources = describe.failed_sources;
    view.beliefs = beliefs.beliefs;
    view.hypotheses = hypotheses.hypotheses;
    view.goals = goals.goals;
    view.ranked = sources.ranked;
    view.termination = { terminated: termination.terminated, reason: termination.reason };
    view.trace = trace.trace;
    return view;
  }

  async submitEvidence(findings: FindingInput[]): Promise<ConsoleView> {
    const view = this.current;
    const result = await this.client.submitEvidence(view.sessionId, findings, view.revision);
    view.lastDelta = result.delta;
    view.lastSorted = result.sorted_findings;
    return this.refresh();
  }

  async invoke(sourceId: string): Promise<{ yields: string[] }> {
    const view = this.current;
    const result = await this.client.invoke(view.sessionId, sourceId, view.revision);
    await this.refresh();
    return { yields: result.yields };
  }

  async commit(): Promise<CommitReport> {
    const view = this.current;
    const result = await this.client.commit(view.sessionId, view.revision);
    view.report = result.report;
    await this.refresh();
    return result.report;
  }

  /** Retry a stale-revision mutation once after a refresh. */
  async withRetry<T>(action: () => Promise<T>): Promise<T> {
    try {
      return await action();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409 && error.code === "ERR_REVISION_CONFLICT") {
        await this.refresh();
        return action();
      }
      throw error;
    }
  }
}

/** Parse the evidence-entry text field: `state-name` or `p1,p2,...`. */
export function parseFindingValue(node: string, raw: string): FindingInput {
  const text = raw.trim();
  if (text.includes(",")) {
    const likelihood = text.split(",").map((x) => {
      const v = Number(x.trim());
      if (!Number.isFinite(v)) throw new Error(`bad likelihood component: ${x}`);
      return v;
    });
    return { node, likelihood };
  }
  return { node, state: text };
}
