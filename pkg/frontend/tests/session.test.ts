// Drives the console against a real service process: the burglary/earthquake
// walkthrough, with every number a panel would display checked against the
// raw API response it came from.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";
import { ApiError, Client, type NetworkSpec, type SourceSpec } from "../src/api.js";
import { belief, cost, gain, pct } from "../src/format.js";
import {
  renderBeliefs,
  renderCommitReport,
  renderHypotheses,
  renderSources,
  renderTermination,
} from "../src/render.js";
import { SessionController, parseFindingValue } from "../src/state.js";

const network = JSON.parse(
  readFileSync(new URL("../../fixtures/case_e.json", import.meta.url), "utf8"),
) as NetworkSpec;
const sources = JSON.parse(
  readFileSync(new URL("../../fixtures/case_e_sources.json", import.meta.url), "utf8"),
) as SourceSpec[];

let server: ChildProcess;
let dataDir: string;
let client: Client;
let walkthroughId = "";

beforeAll(async () => {
  dataDir = mkdtempSync(join(tmpdir(), "console-e2e-"));
  // -u keeps the listen banner unbuffered through the pipe.
  server = spawn("python3", ["-u", "-m", "evidentia.cli", "serve", "--port", "0", "--data", dataDir]);
  const base = await new Promise<string>((resolve, reject) => {
    let banner = "";
    let errors = "";
    const timer = setTimeout(
      () => reject(new Error(`service never announced a port: ${errors || banner}`)),
      15000,
    );
    server.stderr?.on("data", (chunk: Buffer) => {
      errors += chunk.toString();
    });
    server.stdout?.on("data", (chunk: Buffer) => {
      banner += chunk.toString();
      const match = banner.match(/listening on (http:\/\/[\d.]+:\d+)/);
      if (match?.[1]) {
        clearTimeout(timer);
        resolve(match[1]);
      }
    });
    server.on("exit", (code) => {
      clearTimeout(timer);
      reject(new Error(`service exited early (${code}): ${errors}`));
    });
  });
  client = new Client(base);
}, 20000);

afterAll(() => {
  server?.kill("SIGTERM");
  if (dataDir) rmSync(dataDir, { recursive: true, force: true });
});

describe("alarm walkthrough", () => {
  it("runs entry, lookahead, invocation, and commitment against the live service", async () => {
    const controller = new SessionController(client);
    const view = await controller.create({ network, sources });
    walkthroughId = view.sessionId;
    expect(view.revision).toBe(1);

    // Decisive priors: both targets already clear before any finding.
    expect(view.termination).toEqual({ terminated: true, reason: "RESOLVED" });

    await controller.withRetry(() =>
      controller.submitEvidence([parseFindingValue("alarm", "on")]),
    );
    const burglaryOn = view.beliefs["burglary"]?.[0];
    expect(burglaryOn).toBeCloseTo(0.5834605503220761, 12);
    expect(view.lastDelta?.changed["burglary"]?.after[0]).toBe(burglaryOn);

    // Entered while the priors still settled everything, so no goal was live
    // yet: the alarm arrives as a lateral finding that reaches both targets.
    const sorted = view.lastSorted[0];
    expect(sorted?.lateral).toBe(true);
    expect(sorted?.relevant_targets).toEqual(["burglary", "earthquake"]);

    // The beliefs panel shows exactly what the API returned.
    let screen = renderBeliefs(view.network, view.beliefs, view.ledger);
    expect(screen).toContain(pct(burglaryOn ?? 0));
    expect(screen).toContain(pct(0.5834605503220761));
    expect(screen).toContain("observed-mark");

    const hypScreen = renderHypotheses(view.hypotheses);
    for (const row of view.hypotheses) {
      expect(hypScreen).toContain(belief(row.belief));
      expect(row.status).toBe("UNCERTAIN");
    }
    expect(view.goals.length).toBeGreaterThan(0);

    // Radio check leads the ranking; its panel numbers come from the response.
    const top = view.ranked[0];
    expect(top?.source.id).toBe("radio_check");
    const sourceScreen = renderSources(view.ranked, view.failedSources);
    for (const row of view.ranked) {
      expect(sourceScreen).toContain(gain(row.expected_gain));
      expect(sourceScreen).toContain(row.gain_per_cost.toFixed(4));
      expect(sourceScreen).toContain(cost(row.source.cost));
    }
    expect(sourceScreen).toContain('data-source="radio_check"');

    const invoked = await controller.withRetry(() => controller.invoke("radio_check"));
    expect(invoked.yields).toEqual(["radio"]);
    expect(view.spent).toBe(1.0);
    expect(view.pendingYields).toContain("radio");

    await controller.withRetry(() =>
      controller.submitEvidence([parseFindingValue("radio", "announced")]),
    );

    // This one lands while goals are live, and settles the earthquake call.
    const radioSorted = view.lastSorted[0];
    expect(radioSorted?.goal_relevant).toBe(true);
    expect(radioSorted?.relevant_targets).toContain("earthquake");
    expect(
      radioSorted?.newly_triggered.some(
        (h) => h.node === "earthquake" && h.state === "true" && h.status === "VERIFIED",
      ),
    ).toBe(true);

    const burglaryAfter = view.beliefs["burglary"]?.[0] ?? 1;
    const earthquakeAfter = view.beliefs["earthquake"]?.[0] ?? 0;
    expect(burglaryAfter).toBeLessThan(0.05);
    expect(burglaryAfter).toBeCloseTo(0.03369089543801436, 12);
    expect(earthquakeAfter).toBeCloseTo(0.9980964229045294, 12);
    expect(view.pendingYields).not.toContain("radio");

    screen = renderBeliefs(view.network, view.beliefs, view.ledger);
    expect(screen).toContain(pct(burglaryAfter));
    expect(screen).toContain(pct(earthquakeAfter));

    expect(view.termination).toEqual({ terminated: true, reason: "RESOLVED" });
    const banner = renderTermination(view.termination, view.spent);
    expect(banner).toContain("RESOLVED");
    expect(banner).toContain(`spent ${cost(view.spent)}`);

    const report = await controller.withRetry(() => controller.commit());
    const byNode = new Map(report.targets.map((t) => [t.node, t]));
    const burglaryCall = byNode.get("burglary");
    const earthquakeCall = byNode.get("earthquake");
    expect(burglaryCall?.committed).toBe(true);
    expect(burglaryCall?.state).toBe("false");
    expect(burglaryCall?.belief).toBeCloseTo(0.9663091045619856, 12);
    expect(earthquakeCall?.state).toBe("true");
    expect(earthquakeCall?.belief).toBeCloseTo(0.9980964229045294, 12);

    const reportScreen = renderCommitReport(report);
    expect(reportScreen).toContain(belief(burglaryCall?.belief ?? 0));
    expect(reportScreen).toContain(belief(earthquakeCall?.belief ?? 0));
    expect(reportScreen).toContain("RESOLVED");

    const types = view.trace.map((e) => e.type);
    expect(types[0]).toBe("session_started");
    expect(types).toContain("source_invoked");
    expect(types).toContain("commitment_composed");
  }, 30000);

  it("persists the session for a later open()", async () => {
    const lister = await client.listSessions();
    expect(lister.sessions).toContain(walkthroughId);
    const controller = new SessionController(client);
    const view = await controller.open(walkthroughId);
    expect(view.ledger.length).toBe(2);
    expect(view.spent).toBe(1.0);
  }, 30000);
});

describe("revision handling", () => {
  it("surfaces a stale mutation as ApiError 409", async () => {
    const controller = new SessionController(client);
    const view = await controller.create({ network, sources });
    const error = await client
      .submitEvidence(view.sessionId, [{ node: "alarm", state: "on" }], 999)
      .then(() => null)
      .catch((e: unknown) => e);
    expect(error).toBeInstanceOf(ApiError);
    expect((error as ApiError).status).toBe(409);
    expect((error as ApiError).code).toBe("ERR_REVISION_CONFLICT");
  }, 30000);

  it("withRetry refreshes once and replays the mutation", async () => {
    const writerA = new SessionController(client);
    const viewA = await writerA.create({ network, sources });

    const writerB = new SessionController(client);
    await writerB.open(viewA.sessionId);

    await writerA.submitEvidence([{ node: "alarm", state: "on" }]);

    // B still holds the pre-alarm revision; the retry path must recover.
    await writerB.withRetry(() =>
      writerB.submitEvidence([{ node: "radio", state: "announced" }]),
    );
    expect(writerB.current.ledger.length).toBe(2);
    expect(writerB.current.beliefs["burglary"]?.[0]).toBeCloseTo(0.03369089543801436, 12);
  }, 30000);

  it("rejects a malformed likelihood before it reaches the service", () => {
    expect(() => parseFindingValue("alarm", "0.9,oops")).toThrow(/bad likelihood/);
  });
});
