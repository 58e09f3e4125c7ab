// DOM wiring for the assessment console. All rendering goes through the
// string builders in render.ts; this file only places their output and
// forwards clicks to the controller.

import { ApiError, Client } from "./api.js";
import { parseFindingValue, SessionController } from "./state.js";
import {
  renderBeliefs,
  renderCommitReport,
  renderGoals,
  renderHypotheses,
  renderSortedFindings,
  renderSources,
  renderTermination,
  renderTrace,
} from "./render.js";

const client = new Client("");
const controller = new SessionController(client);

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing #${id}`);
  return found as T;
}

function setStatus(text: string, isError = false) {
  const status = el<HTMLParagraphElement>("status-line");
  status.textContent = text;
  status.className = isError ? "status error" : "status";
}

function redraw() {
  const view = controller.current;
  el("session-name").textContent = `${view.network.id} / ${view.sessionId} (rev ${view.revision})`;
  el("beliefs-panel").innerHTML = renderBeliefs(view.network, view.beliefs, view.ledger);
  el("hypotheses-panel").innerHTML = renderHypotheses(view.hypotheses);
  el("goals-panel").innerHTML = renderGoals(view.goals);
  el("sources-panel").innerHTML = renderSources(view.ranked, view.failedSources);
  el("termination-panel").innerHTML = renderTermination(view.termination, view.spent);
  el("sorted-panel").innerHTML = view.lastSorted.length
    ? renderSortedFindings(view.lastSorted)
    : '<p class="muted">no findings entered yet</p>';
  el("trace-panel").innerHTML = renderTrace(view.trace);
  el("report-panel").innerHTML = view.report
    ? renderCommitReport(view.report)
    : '<p class="muted">not committed</p>';

  const pending = view.pendingYields.length
    ? `awaiting outcomes for: ${view.pendingYields.join(", ")}`
    : "";
  el("pending-line").textContent = pending;

  const nodeSelect = el<HTMLSelectElement>("evidence-node");
  const chosen = nodeSelect.value;
  nodeSelect.innerHTML = view.network.nodes
    .map((n) => `<option value="${n.id}">${n.id} (${n.states.join("/")})</option>`)
    .join("");
  if (chosen) nodeSelect.value = chosen;

  el<HTMLButtonElement>("commit-btn").disabled = !view.termination.terminated;

  for (const button of document.querySelectorAll<HTMLButtonElement>(".invoke-btn")) {
    button.addEventListener("click", () => invokeSource(button.dataset.source ?? ""));
  }
}

async function guard(action: () => Promise<unknown>) {
  try {
    await action();
    setStatus("ok");
  } catch (error) {
    if (error instanceof ApiError) {
      setStatus(`${error.code}: ${error.message}`, true);
      await controller.refresh().catch(() => undefined);
    } else {
      setStatus(String(error), true);
    }
  }
  if (controller.isOpen) redraw();
}

async function invokeSource(sourceId: string) {
  await guard(async () => {
    const result = await controller.withRetry(() => controller.invoke(sourceId));
    setStatus(
      result.yields.length
        ? `invoked ${sourceId}; report outcomes for ${result.yields.join(", ")}`
        : `invoked ${sourceId}; nothing new to observe`,
    );
  });
}

async function openFromForm() {
  const networkText = el<HTMLTextAreaElement>("network-json").value;
  const sourcesText = el<HTMLTextAreaElement>("sources-json").value.trim();
  await guard(async () => {
    await controller.create({
      network: JSON.parse(networkText),
      sources: sourcesText ? JSON.parse(sourcesText) : [],
    });
    el("setup-card").classList.add("hidden");
    el("console-grid").classList.remove("hidden");
  });
}

async function openExisting(sessionId: string) {
  await guard(async () => {
    await controller.open(sessionId);
    el("setup-card").classList.add("hidden");
    el("console-grid").classList.remove("hidden");
  });
}

async function submitEvidenceFromForm() {
  const node = el<HTMLSelectElement>("evidence-node").value;
  const value = el<HTMLInputElement>("evidence-value").value;
  await guard(async () => {
    const finding = parseFindingValue(node, value);
    await controller.withRetry(() => controller.submitEvidence([finding]));
    el<HTMLInputElement>("evidence-value").value = "";
  });
}

async function init() {
  el("create-btn").addEventListener("click", () => void openFromForm());
  el("evidence-btn").addEventListener("click", () => void submitEvidenceFromForm());
  el("refresh-btn").addEventListener("click", () =>
    void guard(() => controller.refresh()),
  );
  el("commit-btn").addEventListener("click", () =>
    void guard(() => controller.withRetry(() => controller.commit())),
  );

  try {
    const existing = await client.listSessions();
    const list = el("session-list");
    list.innerHTML = existing.sessions
      .map((id) => `<li><button class="open-btn" data-session="${id}">${id}</button></li>`)
      .join("");
    for (const button of list.querySelectorAll<HTMLButtonElement>(".open-btn")) {
      button.addEventListener("click", () => void openExisting(button.dataset.session ?? ""));
    }
  } catch {
    setStatus("service unreachable; is the session server running?", true);
  }
}

document.addEventListener("DOMContentLoaded", () => void init());
