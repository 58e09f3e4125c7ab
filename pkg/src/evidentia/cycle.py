"""Sequential evidence acquisition over a belief network.

The loop mirrors how an analyst works a situation board: classify the
standing hypotheses against thresholds, pick the most pressing goals, rank
the available information sources by expected entropy reduction per unit
cost, buy the best one, fold its findings back in, and stop when the board
is resolved, nothing left is worth its price, or the budget runs out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    AlreadyObservedError,
    EvidentiaError,
    NoSuchSourceError,
    NotTerminatedError,
    NoUsableSourceError,
    UnobservableFindingError,
)
from .network import Network, Node, ensure_validated
from .propagation import (
    BeliefState,
    Evidence,
    EvidenceKind,
    assert_evidence,
    initialize,
)

# Belief changes smaller than this are reported as "no change".
DELTA_TOLERANCE = 1e-12


def entropy_bits(vector: Sequence[float]) -> float:
    """Shannon entropy of a distribution, in bits; zero terms contribute 0."""
    arr = np.asarray(vector, dtype=float)
    positive = arr[arr > 0.0]
    return float(-(positive * np.log2(positive)).sum())


class Status(Enum):
    VERIFIED = "VERIFIED"
    REFUTED = "REFUTED"
    UNCERTAIN = "UNCERTAIN"


class GoalKind(Enum):
    VERIFY = "VERIFY"
    DIFFERENTIATE = "DIFFERENTIATE"


class TerminationReason(Enum):
    RESOLVED = "RESOLVED"
    NOT_WORTH_COST = "NOT_WORTH_COST"
    FORCED = "FORCED"


@dataclass(frozen=True)
class CycleConfig:
    """Thresholds and stop conditions; the defaults suit desk-scale reviews.

    verify/refute thresholds classify hypothesis states, commit_threshold
    gates the final calls, min_voi_per_cost is the floor under which buying
    more evidence stops being worth it.
    """

    verify_threshold: float = 0.95
    refute_threshold: float = 0.05
    commit_threshold: float = 0.90
    min_voi_per_cost: float = 0.01
    max_goals: int = 3
    budget: float | None = None
    max_queries: int | None = None

    def __post_init__(self) -> None:
        if not 0.5 < self.verify_threshold <= 1.0:
            raise ValueError("verify_threshold must be in (0.5, 1.0]")
        if not 0.0 <= self.refute_threshold < 0.5:
            raise ValueError("refute_threshold must be in [0.0, 0.5)")
        if self.refute_threshold >= self.verify_threshold:
            raise ValueError("refute_threshold must be below verify_threshold")
        if not 0.5 < self.commit_threshold <= 1.0:
            raise ValueError("commit_threshold must be in (0.5, 1.0]")
        if self.min_voi_per_cost <= 0.0:
            raise ValueError("min_voi_per_cost must be positive")
        if self.max_goals < 1:
            raise ValueError("max_goals must be >= 1")
        if self.budget is not None and self.budget < 0:
            raise ValueError("budget must be >= 0 when set")
        if self.max_queries is not None and self.max_queries < 1:
            raise ValueError("max_queries must be >= 1 when set")

    def to_dict(self) -> dict:
        theta: float | str = self.min_voi_per_cost
        if not math.isfinite(self.min_voi_per_cost):
            theta = "inf"
        return {
            "verify_threshold": self.verify_threshold,
            "refute_threshold": self.refute_threshold,
            "commit_threshold": self.commit_threshold,
            "min_voi_per_cost": theta,
            "max_goals": self.max_goals,
            "budget": self.budget,
            "max_queries": self.max_queries,
        }

    @staticmethod
    def from_dict(raw: object) -> "CycleConfig":
        if not isinstance(raw, dict):
            raise ValueError(f"config must be an object, got {type(raw).__name__}")
        known = {
            "verify_threshold", "refute_threshold", "commit_threshold",
            "min_voi_per_cost", "max_goals", "budget", "max_queries",
        }
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"config has unknown field(s) {sorted(unknown)}")
        kwargs = dict(raw)
        theta = kwargs.get("min_voi_per_cost")
        if isinstance(theta, str):
            kwargs["min_voi_per_cost"] = float(theta)
        return CycleConfig(**kwargs)


@dataclass(frozen=True)
class HypothesisStatus:
    node: str
    state_index: int
    state: str
    belief: float
    status: Status

    def to_dict(self) -> dict:
        return {
            "node": self.node,
            "state": self.state,
            "state_index": self.state_index,
            "belief": self.belief,
            "status": self.status.value,
        }


@dataclass(frozen=True)
class Goal:
    kind: GoalKind
    nodes: tuple[str, ...]
    score: float
    rationale: str

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "nodes": list(self.nodes),
            "score": self.score,
            "rationale": self.rationale,
        }


@dataclass(frozen=True)
class InformationSource:
    """A purchasable query: invoking it yields findings on ``yields`` nodes.

    ``reliability`` maps a yield node to a square confusion matrix whose row
    s is the distribution of reported states when the true state is s.  A
    node without a matrix reports faithfully.
    """

    id: str
    yields: tuple[str, ...]
    cost: float = 1.0
    reliability: Mapping[str, tuple[tuple[float, ...], ...]] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "yields", tuple(self.yields))
        if self.reliability is not None:
            frozen = {
                node: tuple(tuple(float(p) for p in row) for row in matrix)
                for node, matrix in self.reliability.items()
            }
            object.__setattr__(self, "reliability", frozen)

    def confusion(self, node_id: str) -> np.ndarray | None:
        if self.reliability is None or node_id not in self.reliability:
            return None
        return np.asarray(self.reliability[node_id], dtype=float)

    def validate_against(self, network: Network) -> None:
        if not self.id:
            raise ValueError("source id must be non-empty")
        if not self.yields:
            raise ValueError(f"source {self.id!r} yields no nodes")
        if self.cost <= 0:
            raise ValueError(f"source {self.id!r} must have positive cost")
        for node_id in self.yields:
            node = network.node(node_id)
            if not node.observable:
                raise ValueError(
                    f"source {self.id!r} yields non-observable node {node_id!r}"
                )
        for node_id, matrix in (self.reliability or {}).items():
            if node_id not in self.yields:
                raise ValueError(
                    f"source {self.id!r} has reliability for non-yield node {node_id!r}"
                )
            k = len(network.node(node_id).states)
            if len(matrix) != k or any(len(row) != k for row in matrix):
                raise ValueError(
                    f"source {self.id!r}: confusion matrix for {node_id!r} must be {k}x{k}"
                )
            for r, row in enumerate(matrix):
                if any(p < 0 for p in row):
                    raise ValueError(
                        f"source {self.id!r}: confusion row {r} for {node_id!r} has a negative entry"
                    )
                if abs(sum(row) - 1.0) > 1e-9:
                    raise ValueError(
                        f"source {self.id!r}: confusion row {r} for {node_id!r} must sum to 1"
                    )

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "yields": list(self.yields),
            "cost": self.cost,
            "reliability": (
                None
                if self.reliability is None
                else {n: [list(row) for row in m] for n, m in self.reliability.items()}
            ),
        }

    @staticmethod
    def from_dict(raw: object) -> "InformationSource":
        if not isinstance(raw, dict):
            raise ValueError(f"source must be an object, got {type(raw).__name__}")
        unknown = set(raw) - {"id", "yields", "cost", "reliability"}
        if unknown:
            raise ValueError(f"source has unknown field(s) {sorted(unknown)}")
        source_id = raw.get("id")
        if not isinstance(source_id, str) or not source_id:
            raise ValueError("source is missing a non-empty string 'id'")
        yields = raw.get("yields")
        if not isinstance(yields, list) or not all(isinstance(y, str) for y in yields):
            raise ValueError(f"source {source_id!r}: 'yields' must be a list of node ids")
        cost = raw.get("cost", 1.0)
        if isinstance(cost, bool) or not isinstance(cost, (int, float)):
            raise ValueError(f"source {source_id!r}: 'cost' must be a number")
        reliability = raw.get("reliability")
        if reliability is not None and not isinstance(reliability, dict):
            raise ValueError(f"source {source_id!r}: 'reliability' must be an object or null")
        return InformationSource(
            id=source_id,
            yields=tuple(yields),
            cost=float(cost),
            reliability=reliability,
        )


@dataclass(frozen=True)
class RankedSource:
    source: InformationSource
    expected_gain: float
    gain_per_cost: float

    def to_dict(self) -> dict:
        return {
            "source": self.source.to_dict(),
            "expected_gain": self.expected_gain,
            "gain_per_cost": self.gain_per_cost,
        }


@dataclass(frozen=True)
class SortedFinding:
    """One incoming finding with its routing annotations.

    Findings whose reachable targets miss every current goal node are tagged
    lateral rather than dropped: they still integrate, they just were not
    what the goals asked for.
    """

    finding: Evidence
    relevant_targets: tuple[str, ...]
    goal_relevant: bool
    newly_triggered: tuple[HypothesisStatus, ...]

    @property
    def lateral(self) -> bool:
        return not self.goal_relevant

    def to_dict(self, network: Network) -> dict:
        return {
            "finding": self.finding.to_dict(network),
            "relevant_targets": list(self.relevant_targets),
            "goal_relevant": self.goal_relevant,
            "lateral": self.lateral,
            "newly_triggered": [h.to_dict() for h in self.newly_triggered],
        }


@dataclass(frozen=True)
class BeliefDelta:
    """Per-node belief movement caused by one integration batch."""

    changed: Mapping[str, tuple[np.ndarray, np.ndarray]]
    status_changes: tuple[tuple[str, int, Status, Status], ...]

    def to_dict(self) -> dict:
        return {
            "changed": {
                node: {"before": before.tolist(), "after": after.tolist()}
                for node, (before, after) in self.changed.items()
            },
            "status_changes": [
                {"node": n, "state_index": s, "from": old.value, "to": new.value}
                for n, s, old, new in self.status_changes
            ],
        }


@dataclass(frozen=True)
class Termination:
    terminated: bool
    reason: TerminationReason | None

    def to_dict(self) -> dict:
        return {
            "terminated": self.terminated,
            "reason": self.reason.value if self.reason else None,
        }


@dataclass(frozen=True)
class TargetCall:
    node: str
    committed: bool
    state: str | None
    state_index: int | None
    belief: float
    belief_vector: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "node": self.node,
            "committed": self.committed,
            "state": self.state,
            "state_index": self.state_index,
            "belief": self.belief,
            "belief_vector": list(self.belief_vector),
        }


@dataclass(frozen=True)
class CommitmentReport:
    targets: tuple[TargetCall, ...]
    termination: Termination
    spent: float
    findings: tuple[Evidence, ...]
    residual_uncertain: tuple[HypothesisStatus, ...]

    def to_dict(self, network: Network) -> dict:
        return {
            "targets": [t.to_dict() for t in self.targets],
            "termination": self.termination.to_dict(),
            "spent": self.spent,
            "findings": [f.to_dict(network) for f in self.findings],
            "residual_uncertain": [h.to_dict() for h in self.residual_uncertain],
        }


@dataclass
class AssessmentState:
    """Everything one assessment session owns.

    Exclusively owned by a single caller; operations mutate in place and the
    trace is append-only.  ``prior_beliefs`` snapshots the no-evidence
    marginals for tie-breaking and reporting.
    """

    belief_state: BeliefState
    config: CycleConfig
    sources: tuple[InformationSource, ...]
    prior_beliefs: Mapping[str, np.ndarray]
    goals: list[Goal] = field(default_factory=list)
    spent: float = 0.0
    invocations: int = 0
    failed_sources: set[str] = field(default_factory=set)
    pending_yields: list[str] = field(default_factory=list)
    trace: list[dict] = field(default_factory=list)

    @property
    def network(self) -> Network:
        return self.belief_state.network

    def source(self, source_id: str) -> InformationSource:
        for source in self.sources:
            if source.id == source_id:
                return source
        raise NoSuchSourceError(f"no source {source_id!r} in this session")

    def trace_event(self, event_type: str, **payload: object) -> dict:
        event = {"seq": len(self.trace), "type": event_type, **payload}
        self.trace.append(event)
        return event


# ---------------------------------------------------------------------------
# Session lifecycle.


def start_session(
    network: Network,
    config: CycleConfig | None = None,
    sources: Iterable[InformationSource] = (),
    initial_findings: Iterable[Evidence] = (),
) -> AssessmentState:
    """Open an assessment over a validated polytree.

    Hard initial findings must land on observable nodes; virtual findings
    (summarized assessments reported from elsewhere) are welcome anywhere.
    """
    ensure_validated(network)
    cfg = config if config is not None else CycleConfig()
    source_list = tuple(sources)
    seen_ids: set[str] = set()
    for source in source_list:
        source.validate_against(network)
        if source.id in seen_ids:
            raise ValueError(f"duplicate source id {source.id!r}")
        seen_ids.add(source.id)

    findings = tuple(initial_findings)
    for finding in findings:
        finding.validate_against(network)
        if finding.kind is EvidenceKind.HARD and not network.node(finding.node).observable:
            raise UnobservableFindingError(
                f"hard finding targets non-observable node {finding.node!r}"
            )

    belief_state = initialize(network)
    state = AssessmentState(
        belief_state=belief_state,
        config=cfg,
        sources=source_list,
        prior_beliefs=dict(belief_state.belief_map),
    )
    state.trace_event(
        "session_started",
        network=network.id,
        findings=[f.to_dict(network) for f in findings],
    )
    if findings:
        integrate(state, findings)
    state.goals = set_goals(state)
    return state


def classify_hypotheses(state: AssessmentState) -> list[HypothesisStatus]:
    """Status of every state of every target node against the thresholds."""
    return _classify(state.network, state.belief_state.belief_map, state.config)


def _classify(
    network: Network, belief_map: Mapping[str, np.ndarray], cfg: CycleConfig
) -> list[HypothesisStatus]:
    out: list[HypothesisStatus] = []
    for node in network.nodes:
        if not node.target:
            continue
        bel = belief_map[node.id]
        for s, name in enumerate(node.states):
            p = float(bel[s])
            if p >= cfg.verify_threshold:
                status = Status.VERIFIED
            elif p <= cfg.refute_threshold:
                status = Status.REFUTED
            else:
                status = Status.UNCERTAIN
            out.append(HypothesisStatus(node.id, s, name, p, status))
    return out


def set_goals(state: AssessmentState) -> list[Goal]:
    """Pick the most pressing unresolved target nodes, highest stake first.

    score = urgency * max over uncertain states of (severity * belief)
            * entropy normalized by log2(state count).
    A node with two or more uncertain states becomes a DIFFERENTIATE goal
    (its own states compete); a single uncertain state is a VERIFY goal.
    """
    cfg = state.config
    belief_map = state.belief_state.belief_map
    scored: list[tuple[float, float, str, Goal]] = []
    for node in state.network.nodes:
        if not node.target:
            continue
        bel = belief_map[node.id]
        uncertain = [
            s
            for s in range(len(bel))
            if cfg.refute_threshold < float(bel[s]) < cfg.verify_threshold
        ]
        if not uncertain:
            continue
        h_norm = entropy_bits(bel) / math.log2(len(node.states))
        stake = max(node.severity[s] * float(bel[s]) for s in uncertain)
        score = node.urgency * stake * h_norm
        if score <= 0.0:
            continue
        kind = GoalKind.DIFFERENTIATE if len(uncertain) >= 2 else GoalKind.VERIFY
        names = ", ".join(node.states[s] for s in uncertain)
        rationale = (
            f"urgency {node.urgency:g} x stake {stake:.4g} x "
            f"normalized entropy {h_norm:.4g}; uncertain: {names}"
        )
        prior_incidence = float(np.max(state.prior_beliefs[node.id]))
        scored.append(
            (score, prior_incidence, node.id, Goal(kind, (node.id,), score, rationale))
        )
    scored.sort(key=lambda item: (-item[0], -item[1], item[2]))
    return [goal for _, _, _, goal in scored[: cfg.max_goals]]


def predictive_distribution(state: AssessmentState, node_id: str) -> np.ndarray:
    """Current marginal of an observable node that has not been observed."""
    node = state.network.node(node_id)
    if not node.observable:
        raise UnobservableFindingError(f"node {node_id!r} is not observable")
    if state.belief_state.evidence_on(node_id) is not None:
        raise AlreadyObservedError(f"node {node_id!r} already carries evidence")
    return state.belief_state.belief(node_id)


# ---------------------------------------------------------------------------
# Source ranking: myopic expected entropy reduction per unit cost.


def rank_sources(
    state: AssessmentState, goals: Sequence[Goal]
) -> list[RankedSource]:
    """Rank usable sources by expected entropy reduction over the goal nodes.

    For every joint outcome of a source's unobserved yield nodes, the
    outcome is asserted hypothetically (through the regular engine), the
    goal-node entropies are measured, and the hypothetical is dropped; the
    expectation is taken under the current predictive distribution.  An
    unreliable yield is asserted as a virtual finding built from the garbled
    report's confusion-matrix column.
    """
    if not goals:
        raise ValueError("rank_sources needs a non-empty goal list")
    goal_nodes: list[str] = []
    for goal in goals:
        for node_id in goal.nodes:
            if node_id not in goal_nodes:
                goal_nodes.append(node_id)

    observed = {f.node for f in state.belief_state.ledger}
    usable = [
        source
        for source in state.sources
        if source.id not in state.failed_sources
        and any(y not in observed for y in source.yields)
    ]
    if not usable:
        raise NoUsableSourceError("every source's yield nodes already carry evidence")

    base = state.belief_state
    base_entropy = {g: entropy_bits(base.belief_map[g]) for g in goal_nodes}
    ranked = []
    for source in usable:
        open_yields = tuple(y for y in source.yields if y not in observed)
        residual = {g: 0.0 for g in goal_nodes}
        _expected_residual_entropy(base, source, open_yields, 0, 1.0, residual)
        gain = sum(base_entropy[g] - residual[g] for g in goal_nodes)
        ranked.append(RankedSource(source, gain, gain / source.cost))
    ranked.sort(key=lambda r: (-r.gain_per_cost, r.source.cost, r.source.id))
    return ranked


def _expected_residual_entropy(
    belief_state: BeliefState,
    source: InformationSource,
    open_yields: tuple[str, ...],
    position: int,
    weight: float,
    residual: dict[str, float],
) -> None:
    if position == len(open_yields):
        for goal_node in residual:
            residual[goal_node] += weight * entropy_bits(
                belief_state.belief_map[goal_node]
            )
        return
    node_id = open_yields[position]
    marginal = belief_state.belief_map[node_id]
    confusion = source.confusion(node_id)
    if confusion is None:
        for s in range(len(marginal)):
            p = float(marginal[s])
            if p <= 0.0:
                continue
            branch = assert_evidence(belief_state, Evidence.hard(node_id, s))
            _expected_residual_entropy(
                branch, source, open_yields, position + 1, weight * p, residual
            )
    else:
        for report in range(confusion.shape[1]):
            column = confusion[:, report]
            p = float(column @ marginal)
            if p <= 0.0:
                continue
            branch = assert_evidence(
                belief_state, Evidence.virtual(node_id, column)
            )
            _expected_residual_entropy(
                branch, source, open_yields, position + 1, weight * p, residual
            )


# ---------------------------------------------------------------------------
# Finding intake.


def sort_findings(
    state: AssessmentState, findings: Sequence[Evidence]
) -> list[SortedFinding]:
    """Annotate incoming findings with routing information; drop nothing.

    A finding's relevance set is every target reachable from its node in the
    undirected skeleton without passing through a hard-observed node (an
    intentional over-approximation: converging unobserved connections are
    not treated as blocking).  Findings touching no current goal node are
    tagged lateral.
    """
    network = state.network
    cfg = state.config
    goal_node_ids = {nid for goal in state.goals for nid in goal.nodes}
    before_status = {
        (h.node, h.state_index): h.status
        for h in _classify(network, state.belief_state.belief_map, cfg)
    }
    out: list[SortedFinding] = []
    for finding in findings:
        finding.validate_against(network)
        relevant = _reachable_targets(state, finding.node)
        newly: tuple[HypothesisStatus, ...] = ()
        try:
            preview = assert_evidence(state.belief_state, finding)
        except EvidentiaError:
            preview = None
        if preview is not None:
            newly = tuple(
                h
                for h in _classify(network, preview.belief_map, cfg)
                if before_status[(h.node, h.state_index)] is not h.status
            )
        out.append(
            SortedFinding(
                finding=finding,
                relevant_targets=relevant,
                goal_relevant=bool(set(relevant) & goal_node_ids),
                newly_triggered=newly,
            )
        )
    return out


def _reachable_targets(state: AssessmentState, start: str) -> tuple[str, ...]:
    network = state.network
    hard_observed = {
        f.node for f in state.belief_state.ledger if f.kind is EvidenceKind.HARD
    }
    visited = {start}
    frontier = [start]
    while frontier:
        nid = frontier.pop()
        # Hard-observed nodes block propagation through themselves; the
        # finding's own node always spreads.
        if nid != start and nid in hard_observed:
            continue
        node = state.network.node(nid)
        for neighbor in tuple(node.parents) + network.children(nid):
            if neighbor not in visited:
                visited.add(neighbor)
                frontier.append(neighbor)
    return tuple(n.id for n in network.nodes if n.target and n.id in visited)


def integrate(
    state: AssessmentState, findings: Sequence[Evidence]
) -> tuple[AssessmentState, BeliefDelta]:
    """Assert a batch of findings atomically and report what moved.

    If any finding is rejected (duplicate node, contradiction), the whole
    batch is rolled back and the session state is untouched.
    """
    before = state.belief_state
    current = before
    for finding in findings:
        try:
            current = assert_evidence(current, finding)
        except EvidentiaError as exc:
            raise type(exc)(
                f"{exc} [offending finding: {finding.to_dict(state.network)}; batch rolled back]"
            ) from exc

    cfg = state.config
    old_status = {
        (h.node, h.state_index): h for h in _classify(state.network, before.belief_map, cfg)
    }
    changed: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for node in state.network.nodes:
        b = before.belief_map[node.id]
        a = current.belief_map[node.id]
        if float(np.max(np.abs(a - b))) > DELTA_TOLERANCE:
            changed[node.id] = (b.copy(), a.copy())
    status_changes = tuple(
        (h.node, h.state_index, old_status[(h.node, h.state_index)].status, h.status)
        for h in _classify(state.network, current.belief_map, cfg)
        if old_status[(h.node, h.state_index)].status is not h.status
    )
    delta = BeliefDelta(changed=changed, status_changes=status_changes)

    state.belief_state = current
    state.pending_yields = [n for n in state.pending_yields if current.evidence_on(n) is None]
    state.trace_event(
        "findings_integrated",
        findings=[f.to_dict(state.network) for f in findings],
        changed_nodes=sorted(changed),
        status_changes=[
            {"node": n, "state_index": s, "from": old.value, "to": new.value}
            for n, s, old, new in status_changes
        ],
    )
    return state, delta


# ---------------------------------------------------------------------------
# Termination and commitment.


def check_termination(state: AssessmentState) -> Termination:
    """RESOLVED beats NOT_WORTH_COST beats FORCED; otherwise keep going."""
    cfg = state.config
    belief_map = state.belief_state.belief_map
    targets = [n for n in state.network.nodes if n.target]
    if all(float(np.max(belief_map[n.id])) >= cfg.verify_threshold for n in targets):
        return Termination(True, TerminationReason.RESOLVED)

    goals = set_goals(state)
    worth_continuing = False
    if goals:
        try:
            ranked = rank_sources(state, goals)
        except NoUsableSourceError:
            ranked = []
        if ranked and ranked[0].gain_per_cost >= cfg.min_voi_per_cost:
            worth_continuing = True
    if not worth_continuing:
        return Termination(True, TerminationReason.NOT_WORTH_COST)

    if cfg.budget is not None and state.spent >= cfg.budget:
        return Termination(True, TerminationReason.FORCED)
    if cfg.max_queries is not None and state.invocations >= cfg.max_queries:
        return Termination(True, TerminationReason.FORCED)
    return Termination(False, None)


def compose_commitment(state: AssessmentState) -> CommitmentReport:
    """Final per-target calls once the cycle has stopped.

    The most probable state of each target is committed only if it clears
    commit_threshold; otherwise the target is reported unresolved.
    """
    termination = check_termination(state)
    if not termination.terminated:
        raise NotTerminatedError("the cycle has not terminated; keep acquiring or force a stop")
    cfg = state.config
    belief_map = state.belief_state.belief_map
    calls: list[TargetCall] = []
    for node in state.network.nodes:
        if not node.target:
            continue
        bel = belief_map[node.id]
        top = int(np.argmax(bel))
        committed = float(bel[top]) >= cfg.commit_threshold
        calls.append(
            TargetCall(
                node=node.id,
                committed=committed,
                state=node.states[top] if committed else None,
                state_index=top if committed else None,
                belief=float(bel[top]),
                belief_vector=tuple(float(p) for p in bel),
            )
        )
    residual = tuple(
        h for h in classify_hypotheses(state) if h.status is Status.UNCERTAIN
    )
    report = CommitmentReport(
        targets=tuple(calls),
        termination=termination,
        spent=state.spent,
        findings=state.belief_state.ledger,
        residual_uncertain=residual,
    )
    state.trace_event(
        "commitment_composed",
        termination=termination.to_dict(),
        targets=[c.to_dict() for c in calls],
    )
    return report


def invoke_source(state: AssessmentState, source_id: str) -> list[str]:
    """Spend a source's cost and return its yield nodes awaiting outcomes."""
    source = state.source(source_id)
    observed = {f.node for f in state.belief_state.ledger}
    open_yields = [y for y in source.yields if y not in observed]
    state.spent += source.cost
    state.invocations += 1
    state.pending_yields = list(open_yields)
    state.trace_event(
        "source_invoked", source=source_id, cost=source.cost, yields=open_yields
    )
    return open_yields


Executor = Callable[[InformationSource, list[str]], Sequence[Evidence]]


def run_cycle(
    state: AssessmentState, executor: Executor
) -> tuple[AssessmentState, CommitmentReport]:
    """Drive the acquisition loop to termination and compose the commitment.

    Each pass: check termination, refresh goals, rank sources, invoke the
    best one, route its findings, integrate.  An executor failure (or a
    source that produces no new evidence) sidelines that source and the loop
    re-enters the termination check, so the loop always halts.
    """
    observable_count = sum(1 for n in state.network.nodes if n.observable)
    bound = observable_count + len(state.sources) + 1
    passes = 0
    while True:
        termination = check_termination(state)
        if termination.terminated:
            state.trace_event("terminated", reason=termination.reason.value)
            break
        passes += 1
        if passes > bound:
            raise RuntimeError("acquisition loop exceeded its structural iteration bound")

        state.goals = set_goals(state)
        state.trace_event("goals_set", goals=[g.to_dict() for g in state.goals])
        ranked = rank_sources(state, state.goals)
        best = ranked[0]
        state.trace_event(
            "sources_ranked",
            ranking=[
                {
                    "source": r.source.id,
                    "expected_gain": r.expected_gain,
                    "gain_per_cost": r.gain_per_cost,
                }
                for r in ranked[:3]
            ],
        )
        open_yields = invoke_source(state, best.source.id)
        try:
            findings = list(executor(best.source, open_yields))
        except Exception as exc:  # executor is caller code; contain it
            state.failed_sources.add(best.source.id)
            state.trace_event("executor_error", source=best.source.id, error=str(exc))
            continue
        routed = sort_findings(state, findings)
        state.trace_event(
            "findings_sorted",
            findings=[r.to_dict(state.network) for r in routed],
        )
        ledger_before = len(state.belief_state.ledger)
        try:
            integrate(state, findings)
        except EvidentiaError as exc:
            state.failed_sources.add(best.source.id)
            state.trace_event("integration_error", source=best.source.id, error=str(exc))
            continue
        if len(state.belief_state.ledger) == ledger_before:
            state.failed_sources.add(best.source.id)
            state.trace_event("no_progress", source=best.source.id)

    report = compose_commitment(state)
    return state, report
