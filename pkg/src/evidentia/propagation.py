"""Exact belief updating on singly connected networks.

Each node keeps two kinds of support: causal support flowing down from its
parents and diagnostic support flowing up from its children.  A full update
is two sweeps over the undirected skeleton of each component (leaves toward
an arbitrary anchor, then back out), after which every directed link holds
both messages and beliefs are the normalized product of the two supports.

Belief states are values: asserting or retracting evidence returns a new
state recomputed from the ledger, so beliefs depend only on the set of
findings, never on the order they arrived in.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping, Sequence

import numpy as np

from .errors import (
    DuplicateEvidenceError,
    NoSuchEvidenceError,
    NoSuchNodeError,
    ZeroProbabilityEvidenceError,
)
from .network import Network, Node, ensure_validated

# Normalizers at or below this are treated as contradictions, not rounded up.
MIN_NORMALIZER = 1e-300


class EvidenceKind(Enum):
    HARD = "HARD"
    VIRTUAL = "VIRTUAL"


@dataclass(frozen=True)
class Evidence:
    """One finding: either a directly observed state or a likelihood vector.

    Virtual findings are scale-invariant; only the ratios of the likelihood
    components matter.  A ledger holds at most one finding per node.
    """

    kind: EvidenceKind
    node: str
    state: int | None = None
    likelihood: tuple[float, ...] | None = None

    @staticmethod
    def hard(node: str, state: int) -> "Evidence":
        return Evidence(EvidenceKind.HARD, node, state=state)

    @staticmethod
    def virtual(node: str, likelihood: Sequence[float]) -> "Evidence":
        return Evidence(
            EvidenceKind.VIRTUAL, node, likelihood=tuple(float(v) for v in likelihood)
        )

    def validate_against(self, network: Network) -> Node:
        node = network.node(self.node)
        k = len(node.states)
        if self.kind is EvidenceKind.HARD:
            if self.state is None or not 0 <= self.state < k:
                raise NoSuchNodeError(
                    f"node {self.node!r} has no state index {self.state!r}"
                )
        else:
            lam = self.likelihood
            if lam is None or len(lam) != k:
                raise ValueError(
                    f"likelihood for node {self.node!r} must have {k} components"
                )
            if any(v < 0 for v in lam):
                raise ValueError(f"likelihood for node {self.node!r} has a negative component")
            if not any(v > 0 for v in lam):
                raise ValueError(f"likelihood for node {self.node!r} has no positive component")
        return node

    def weight_vector(self, k: int) -> np.ndarray:
        if self.kind is EvidenceKind.HARD:
            vec = np.zeros(k)
            vec[self.state] = 1.0
            return vec
        return np.asarray(self.likelihood, dtype=float)

    def to_dict(self, network: Network | None = None) -> dict:
        out: dict = {"node": self.node}
        if self.kind is EvidenceKind.HARD:
            out["state"] = (
                network.node(self.node).states[self.state] if network else self.state
            )
        else:
            out["likelihood"] = list(self.likelihood or ())
        return out


def evidence_from_dict(raw: object, network: Network) -> Evidence:
    """Decode a finding from its wire form, mapping state names to indices."""
    if not isinstance(raw, dict):
        raise ValueError(f"finding must be an object, got {type(raw).__name__}")
    unknown = set(raw) - {"node", "state", "likelihood"}
    if unknown:
        raise ValueError(f"finding has unknown field(s) {sorted(unknown)}")
    node_id = raw.get("node")
    if not isinstance(node_id, str):
        raise ValueError("finding is missing string field 'node'")
    node = network.node(node_id)
    has_state = "state" in raw
    has_likelihood = "likelihood" in raw
    if has_state == has_likelihood:
        raise ValueError(f"finding on {node_id!r} must carry exactly one of 'state' or 'likelihood'")
    if has_state:
        state = raw["state"]
        if isinstance(state, str):
            return Evidence.hard(node_id, node.state_index(state))
        if isinstance(state, int) and not isinstance(state, bool):
            return Evidence.hard(node_id, state)
        raise ValueError(f"finding on {node_id!r}: 'state' must be a state name or index")
    likelihood = raw["likelihood"]
    if not isinstance(likelihood, list):
        raise ValueError(f"finding on {node_id!r}: 'likelihood' must be a list")
    return Evidence.virtual(node_id, likelihood)


class _Runtime:
    """Per-network constants for the sweeps: tensors, adjacency, schedules.

    Built once per network and cached on the instance; contains no evidence
    and no results, so it is safe to share across belief states.
    """

    def __init__(self, network: Network):
        self.network = network
        self.pos = {n.id: i for i, n in enumerate(network.nodes)}
        self.k = {n.id: len(n.states) for n in network.nodes}
        self.parents = {n.id: n.parents for n in network.nodes}
        self.children = {n.id: network.children(n.id) for n in network.nodes}
        self.cpt: dict[str, np.ndarray] = {}
        for n in network.nodes:
            counts = tuple(self.k[p] for p in n.parents)
            self.cpt[n.id] = np.asarray(n.cpt, dtype=float).reshape(counts + (self.k[n.id],))
        # Rooted-forest traversal: BFS from the first unvisited node of each
        # component.  The upward sweep walks the order reversed, the downward
        # sweep walks it forward, so every link gets both direction messages.
        self.bfs_order: list[tuple[str, str | None]] = []
        seen: set[str] = set()
        for n in network.nodes:
            if n.id in seen:
                continue
            seen.add(n.id)
            queue = [(n.id, None)]
            while queue:
                nid, anchor = queue.pop(0)
                self.bfs_order.append((nid, anchor))
                for neighbor in self.parents[nid] + self.children[nid]:
                    if neighbor not in seen:
                        seen.add(neighbor)
                        queue.append((neighbor, nid))


def _runtime(network: Network) -> _Runtime:
    rt = network.__dict__.get("_runtime")
    if rt is None:
        rt = _Runtime(network)
        network.__dict__["_runtime"] = rt
    return rt


@dataclass(frozen=True)
class BeliefState:
    """Immutable posterior snapshot for one network and one evidence ledger.

    ``pi_messages[(u, x)]`` is the causal support node u sends its child x
    (a vector over u's states); ``lambda_messages[(x, u)]`` is the diagnostic
    support x sends its parent u (also over u's states).
    """

    network: Network
    ledger: tuple[Evidence, ...]
    belief_map: Mapping[str, np.ndarray]
    pi_messages: Mapping[tuple[str, str], np.ndarray]
    lambda_messages: Mapping[tuple[str, str], np.ndarray]

    def belief(self, node_id: str) -> np.ndarray:
        if node_id not in self.belief_map:
            raise NoSuchNodeError(f"no node {node_id!r} in network {self.network.id!r}")
        return self.belief_map[node_id].copy()

    def evidence_on(self, node_id: str) -> Evidence | None:
        for finding in self.ledger:
            if finding.node == node_id:
                return finding
        return None


def initialize(network: Network) -> BeliefState:
    """Prior marginals for a validated network, before any evidence."""
    ensure_validated(network)
    return _propagate(network, ())


def assert_evidence(state: BeliefState, finding: Evidence) -> BeliefState:
    """Fold one finding into the ledger and return the updated state."""
    finding.validate_against(state.network)
    if any(existing.node == finding.node for existing in state.ledger):
        raise DuplicateEvidenceError(
            f"node {finding.node!r} already carries evidence; retract it first"
        )
    return _propagate(state.network, state.ledger + (finding,))


def retract_evidence(state: BeliefState, node_id: str) -> BeliefState:
    """Remove the finding on ``node_id`` and recompute from the remainder."""
    state.network.node(node_id)
    kept = tuple(f for f in state.ledger if f.node != node_id)
    if len(kept) == len(state.ledger):
        raise NoSuchEvidenceError(f"no evidence recorded on node {node_id!r}")
    return _propagate(state.network, kept)


def beliefs(state: BeliefState, node_id: str) -> np.ndarray:
    return state.belief(node_id)


def _normalize(vec: np.ndarray, context: str) -> np.ndarray:
    total = float(vec.sum())
    if total <= MIN_NORMALIZER:
        raise ZeroProbabilityEvidenceError(
            f"evidence assigns zero probability to every configuration ({context})"
        )
    return vec / total


def _propagate(network: Network, ledger: tuple[Evidence, ...]) -> BeliefState:
    rt = _runtime(network)
    weights: dict[str, np.ndarray] = {}
    for finding in ledger:
        finding.validate_against(network)
        weights[finding.node] = finding.weight_vector(rt.k[finding.node])

    pi_msgs: dict[tuple[str, str], np.ndarray] = {}
    lam_msgs: dict[tuple[str, str], np.ndarray] = {}

    def evidence_weight(nid: str) -> np.ndarray | None:
        return weights.get(nid)

    def lambda_value(nid: str, exclude_child: str | None = None) -> np.ndarray:
        """Evidence on nid combined with diagnostic messages from children."""
        vec = np.ones(rt.k[nid])
        w = evidence_weight(nid)
        if w is not None:
            vec = vec * w
        for child in rt.children[nid]:
            if child != exclude_child:
                vec = vec * lam_msgs[(child, nid)]
        return vec

    def pi_value(nid: str) -> np.ndarray:
        """Causal support from the CPT and all parents' messages."""
        parents = rt.parents[nid]
        arr = rt.cpt[nid]
        # Contract parent axes highest-first so remaining indexes stay put.
        for axis in range(len(parents) - 1, -1, -1):
            arr = np.tensordot(arr, pi_msgs[(parents[axis], nid)], axes=([axis], [0]))
        return arr

    def message(src: str, dst: str) -> np.ndarray:
        if dst in rt.children[src]:
            # Causal message to a child: belief in src with dst's own
            # diagnostic contribution left out.
            vec = pi_value(src) * lambda_value(src, exclude_child=dst)
            return _normalize(vec, f"message {src} -> {dst}")
        # Diagnostic message to the parent dst: sum the CPT against the full
        # diagnostic support of src and the causal messages of the co-parents.
        parents = rt.parents[src]
        dst_axis = parents.index(dst)
        arr = rt.cpt[src] @ lambda_value(src)
        for axis in range(len(parents) - 1, -1, -1):
            if axis == dst_axis:
                continue
            arr = np.tensordot(arr, pi_msgs[(parents[axis], src)], axes=([axis], [0]))
        return _normalize(arr, f"message {src} -> {dst}")

    def store(src: str, dst: str) -> None:
        msg = message(src, dst)
        if dst in rt.children[src]:
            pi_msgs[(src, dst)] = msg
        else:
            lam_msgs[(src, dst)] = msg

    # Sweep 1: leaves toward each component anchor.
    for nid, anchor in reversed(rt.bfs_order):
        if anchor is not None:
            store(nid, anchor)
    # Sweep 2: anchors back out to the leaves.
    for nid, anchor in rt.bfs_order:
        if anchor is not None:
            store(anchor, nid)

    belief_map: dict[str, np.ndarray] = {}
    for node in network.nodes:
        vec = pi_value(node.id) * lambda_value(node.id)
        belief_map[node.id] = _normalize(vec, f"belief of {node.id}")
        belief_map[node.id].setflags(write=False)

    return BeliefState(
        network=network,
        ledger=ledger,
        belief_map=belief_map,
        pi_messages=pi_msgs,
        lambda_messages=lam_msgs,
    )
