// Render-to-string views. No DOM access here: every function takes API
// payloads and returns an HTML fragment, which keeps the whole visual layer
// testable in plain node.

import type {
  CommitReport,
  FindingInput,
  GoalRow,
  HypothesisRow,
  NetworkSpec,
  RankedSourceRow,
  SortedFindingRow,
  Termination,
  TraceEvent,
} from "./api.js";
import { belief, cost, escapeHtml, gain, pct, score } from "./format.js";

function nodeLabel(network: NetworkSpec, nodeId: string): string {
  const node = network.nodes.find((n) => n.id === nodeId);
  return node?.label ? node.label : nodeId;
}

export function renderBeliefs(
  network: NetworkSpec,
  beliefs: Record<string, number[]>,
  ledger: FindingInput[],
): string {
  const observed = new Set(ledger.map((f) => f.node));
  const rows = network.nodes.map((node) => {
    const vector = beliefs[node.id] ?? [];
    const bars = node.states
      .map((state, i) => {
        const p = vector[i] ?? 0;
        return `<div class="belief-row">
          <span class="state-name">${escapeHtml(state)}</span>
          <div class="bar-track"><div class="bar-fill" style="width:${(100 * p).toFixed(2)}%"></div></div>
          <span class="belief-value">${pct(p)}</span>
        </div>`;
      })
      .join("");
    const mark = observed.has(node.id) ? ' <span class="observed-mark">observed</span>' : "";
    return `<section class="node-card" data-node="${escapeHtml(node.id)}">
      <h3>${escapeHtml(nodeLabel(network, node.id))}${mark}</h3>
      ${bars}
    </section>`;
  });
  return rows.join("\n");
}

export function renderHypotheses(rows: HypothesisRow[]): string {
  if (rows.length === 0) return '<p class="muted">no target hypotheses</p>';
  const body = rows
    .map(
      (h) => `<tr class="status-${h.status.toLowerCase()}">
        <td>${escapeHtml(h.node)}</td>
        <td>${escapeHtml(h.state)}</td>
        <td class="num">${belief(h.belief)}</td>
        <td>${h.status}</td>
      </tr>`,
    )
    .join("");
  return `<table class="hyp-table">
    <thead><tr><th>node</th><th>state</th><th>belief</th><th>status</th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

export function renderGoals(goals: GoalRow[]): string {
  if (goals.length === 0) return '<p class="muted">nothing left to pursue</p>';
  const items = goals
    .map(
      (g) => `<li>
        <span class="goal-kind">${g.kind}</span>
        <strong>${g.nodes.map(escapeHtml).join(", ")}</strong>
        <span class="goal-score">score ${score(g.score)}</span>
        <div class="muted">${escapeHtml(g.rationale)}</div>
      </li>`,
    )
    .join("");
  return `<ol class="goal-list">${items}</ol>`;
}

export function renderSources(ranked: RankedSourceRow[], failed: string[]): string {
  if (ranked.length === 0) return '<p class="muted">no sources worth ranking</p>';
  const failedSet = new Set(failed);
  const body = ranked
    .map((r) => {
      const dead = failedSet.has(r.source.id);
      const button = dead
        ? '<span class="muted">failed</span>'
        : `<button class="invoke-btn" data-source="${escapeHtml(r.source.id)}">invoke</button>`;
      return `<tr${dead ? ' class="source-failed"' : ""}>
        <td>${escapeHtml(r.source.id)}</td>
        <td>${r.source.yields.map(escapeHtml).join(", ")}</td>
        <td class="num">${gain(r.expected_gain)}</td>
        <td class="num">${cost(r.source.cost)}</td>
        <td class="num">${r.gain_per_cost.toFixed(4)}</td>
        <td>${button}</td>
      </tr>`;
    })
    .join("");
  return `<table class="source-table">
    <thead><tr><th>source</th><th>yields</th><th>expected gain</th><th>cost</th><th>gain/cost</th><th></th></tr></thead>
    <tbody>${body}</tbody>
  </table>`;
}

export function renderTermination(term: Termination, spent: number): string {
  const label = term.terminated ? (term.reason ?? "terminated") : "collecting evidence";
  const cls = term.terminated ? "banner-done" : "banner-running";
  return `<div class="banner ${cls}">
    <strong>${label}</strong>
    <span>spent ${cost(spent)}</span>
  </div>`;
}

export function renderSortedFindings(sorted: SortedFindingRow[]): string {
  return sorted
    .map((s) => {
      const tag = s.goal_relevant
        ? '<span class="tag tag-relevant">goal-relevant</span>'
        : '<span class="tag tag-lateral">lateral</span>';
      const targets = s.relevant_targets.length
        ? s.relevant_targets.map(escapeHtml).join(", ")
        : "none";
      const triggered = s.newly_triggered
        .map((h) => `${escapeHtml(h.node)}=${escapeHtml(h.state)} now ${h.status}`)
        .join("; ");
      return `<div class="sorted-finding">
        ${tag} <strong>${escapeHtml(s.finding.node)}</strong>
        <span class="muted">targets: ${targets}</span>
        ${triggered ? `<div class="muted">${triggered}</div>` : ""}
      </div>`;
    })
    .join("\n");
}

export function renderCommitReport(report: CommitReport): string {
  const rows = report.targets
    .map((t) => {
      const call = t.committed
        ? `<strong>${escapeHtml(t.state ?? "")}</strong> at ${belief(t.belief)}`
        : `<span class="muted">UNRESOLVED (best ${belief(t.belief)})</span>`;
      return `<tr><td>${escapeHtml(t.node)}</td><td>${call}</td></tr>`;
    })
    .join("");
  const residual = report.residual_uncertain.length
    ? `<p class="muted">still uncertain: ${report.residual_uncertain
        .map((h) => `${escapeHtml(h.node)}=${escapeHtml(h.state)} (${belief(h.belief)})`)
        .join(", ")}</p>`
    : "";
  return `<div class="commit-report">
    <div class="banner banner-done"><strong>${report.termination.reason ?? ""}</strong>
      <span>spent ${cost(report.spent)} over ${report.findings.length} findings</span></div>
    <table class="commit-table"><tbody>${rows}</tbody></table>
    ${residual}
  </div>`;
}

export function renderTrace(events: TraceEvent[]): string {
  const lines = events
    .slice()
    .reverse()
    .map((e) => {
      const rest = Object.entries(e)
        .filter(([k]) => k !== "seq" && k !== "type")
        .map(([k, v]) => `${k}=${JSON.stringify(v)}`)
        .join(" ");
      return `<li><span class="trace-seq">#${e.seq}</span> <strong>${escapeHtml(e.type)}</strong> <span class="muted">${escapeHtml(rest)}</span></li>`;
    })
    .join("");
  return `<ul class="trace-list">${lines}</ul>`;
}
