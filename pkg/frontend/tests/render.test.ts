import { describe, expect, it } from "vitest";
import type {
  CommitReport,
  HypothesisRow,
  NetworkSpec,
  RankedSourceRow,
  SortedFindingRow,
  TraceEvent,
} from "../src/api.js";
import { belief, cost, gain, pct } from "../src/format.js";
import {
  renderBeliefs,
  renderCommitReport,
  renderGoals,
  renderHypotheses,
  renderSortedFindings,
  renderSources,
  renderTermination,
  renderTrace,
} from "../src/render.js";

const network: NetworkSpec = {
  id: "demo",
  nodes: [
    { id: "burglary", states: ["true", "false"], cpt: [[0.01, 0.99]], target: true },
    { id: "alarm", label: "house <alarm>", states: ["on", "off"], parents: ["burglary"], cpt: [], observable: true },
  ],
};

describe("renderBeliefs", () => {
  const beliefs = { burglary: [0.5834605503220761, 0.41653944967792387], alarm: [1, 0] };

  it("shows each state through the pct helper", () => {
    const html = renderBeliefs(network, beliefs, []);
    expect(html).toContain(pct(0.5834605503220761));
    expect(html).toContain('data-node="burglary"');
  });

  it("marks nodes that appear in the ledger", () => {
    const html = renderBeliefs(network, beliefs, [{ node: "alarm", state: "on" }]);
    expect(html).toContain("observed-mark");
    expect(renderBeliefs(network, beliefs, [])).not.toContain("observed-mark");
  });

  it("escapes labels", () => {
    const html = renderBeliefs(network, beliefs, []);
    expect(html).toContain("house &lt;alarm&gt;");
    expect(html).not.toContain("house <alarm>");
  });
});

describe("renderHypotheses", () => {
  const rows: HypothesisRow[] = [
    { node: "burglary", state: "true", state_index: 0, belief: 0.96631, status: "VERIFIED" },
    { node: "burglary", state: "false", state_index: 1, belief: 0.03369, status: "REFUTED" },
  ];

  it("prints beliefs at four decimals with a status class per row", () => {
    const html = renderHypotheses(rows);
    expect(html).toContain(belief(0.96631));
    expect(html).toContain("status-verified");
    expect(html).toContain("status-refuted");
  });

  it("says so when empty", () => {
    expect(renderHypotheses([])).toContain("no target hypotheses");
  });
});

describe("renderGoals", () => {
  it("lists kind, nodes, and score", () => {
    const html = renderGoals([
      { kind: "DIFFERENTIATE", nodes: ["burglary"], score: 0.42, rationale: "split the leaders" },
    ]);
    expect(html).toContain("DIFFERENTIATE");
    expect(html).toContain("score 0.420");
    expect(html).toContain("split the leaders");
  });

  it("says so when resolved", () => {
    expect(renderGoals([])).toContain("nothing left to pursue");
  });
});

describe("renderSources", () => {
  const ranked: RankedSourceRow[] = [
    {
      source: { id: "radio_check", yields: ["radio"], cost: 1.0 },
      expected_gain: 1.2501,
      gain_per_cost: 1.2501,
    },
    {
      source: { id: "seismograph", yields: ["earthquake"], cost: 3.0 },
      expected_gain: 1.567,
      gain_per_cost: 0.5223,
    },
  ];

  it("renders an invoke button per usable source", () => {
    const html = renderSources(ranked, []);
    expect(html).toContain('data-source="radio_check"');
    expect(html).toContain(gain(1.2501));
    expect(html).toContain(cost(3.0));
  });

  it("marks failed sources and withholds their button", () => {
    const html = renderSources(ranked, ["seismograph"]);
    expect(html).toContain("source-failed");
    expect(html).not.toContain('data-source="seismograph"');
    expect(html).toContain('data-source="radio_check"');
  });

  it("says so when nothing ranks", () => {
    expect(renderSources([], [])).toContain("no sources worth ranking");
  });
});

describe("renderTermination", () => {
  it("shows the reason once terminated", () => {
    const html = renderTermination({ terminated: true, reason: "RESOLVED" }, 4.0);
    expect(html).toContain("RESOLVED");
    expect(html).toContain("banner-done");
    expect(html).toContain("spent 4");
  });

  it("shows a running banner otherwise", () => {
    const html = renderTermination({ terminated: false, reason: null }, 0);
    expect(html).toContain("collecting evidence");
    expect(html).toContain("banner-running");
  });
});

describe("renderSortedFindings", () => {
  const rows: SortedFindingRow[] = [
    {
      finding: { node: "alarm", state: "on" },
      relevant_targets: ["burglary", "earthquake"],
      goal_relevant: true,
      lateral: false,
      newly_triggered: [],
    },
    {
      finding: { node: "call", state: "received" },
      relevant_targets: [],
      goal_relevant: false,
      lateral: true,
      newly_triggered: [
        { node: "burglary", state: "true", state_index: 0, belief: 0.97, status: "VERIFIED" },
      ],
    },
  ];

  it("tags relevance and lists trigger previews", () => {
    const html = renderSortedFindings(rows);
    expect(html).toContain("goal-relevant");
    expect(html).toContain("lateral");
    expect(html).toContain("burglary, earthquake");
    expect(html).toContain("burglary=true now VERIFIED");
  });
});

describe("renderCommitReport", () => {
  const report: CommitReport = {
    targets: [
      {
        node: "burglary",
        committed: true,
        state: "false",
        state_index: 1,
        belief: 0.9663091045619856,
        belief_vector: [0.0336908954, 0.9663091046],
      },
      { node: "mystery", committed: false, state: null, state_index: null, belief: 0.6, belief_vector: [0.6, 0.4] },
    ],
    termination: { terminated: true, reason: "RESOLVED" },
    spent: 1.0,
    findings: [{ node: "alarm", state: "on" }],
    residual_uncertain: [
      { node: "mystery", state: "a", state_index: 0, belief: 0.6, status: "UNCERTAIN" },
    ],
  };

  it("prints committed calls through the belief helper", () => {
    const html = renderCommitReport(report);
    expect(html).toContain(belief(0.9663091045619856));
    expect(html).toContain("RESOLVED");
    expect(html).toContain("UNRESOLVED");
    expect(html).toContain("still uncertain");
  });
});

describe("renderTrace", () => {
  const events: TraceEvent[] = [
    { seq: 1, type: "session_started", nodes: 5 },
    { seq: 2, type: "evidence_integrated", node: "alarm" },
  ];

  it("lists newest first", () => {
    const html = renderTrace(events);
    const first = html.indexOf("evidence_integrated");
    const second = html.indexOf("session_started");
    expect(first).toBeGreaterThan(-1);
    expect(first).toBeLessThan(second);
    expect(html).toContain("#2");
  });
});
