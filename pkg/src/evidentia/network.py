"""Inference-network model: multi-valued proposition nodes with conditional
probability tables, structural validation, and a strict JSON file format.

A network is a directed graph of nodes whose undirected skeleton must be
acyclic (a polytree) for the propagation engine to accept it.  Validation is
explicit and reports problems as data; a ``Network`` value can exist in an
unvalidated state, but every downstream module insists on a validated one.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterator, Sequence

from .errors import (
    IndexOutOfRangeError,
    NoSuchNodeError,
    NotValidatedError,
    ParseError,
    UnknownFieldError,
)

# CPT rows must sum to one within this tolerance.
ROW_SUM_TOLERANCE = 1e-9


def parent_config_index(parent_state_counts: Sequence[int], assignment: Sequence[int]) -> int:
    """Map a joint parent-state assignment to its CPT row index.

    Mixed-radix encoding with the first parent most significant:
    counts (2, 3) and assignment (1, 2) give row 1*3 + 2 = 5.
    """
    if len(assignment) != len(parent_state_counts):
        raise IndexOutOfRangeError(
            f"assignment has {len(assignment)} components, expected {len(parent_state_counts)}"
        )
    index = 0
    for pos, (count, value) in enumerate(zip(parent_state_counts, assignment)):
        if count < 1:
            raise IndexOutOfRangeError(f"state count at position {pos} must be >= 1, got {count}")
        if not 0 <= value < count:
            raise IndexOutOfRangeError(
                f"assignment component {pos} is {value}, outside [0, {count})"
            )
        index = index * count + value
    return index


def parent_configs(parent_state_counts: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Yield every parent assignment in CPT row order (last parent fastest)."""
    return itertools.product(*(range(c) for c in parent_state_counts))


class NodeCategory(Enum):
    ROOT = "ROOT"
    INTERMEDIATE = "INTERMEDIATE"
    OBSERVABLE_LEAF = "OBSERVABLE_LEAF"


@dataclass(frozen=True)
class Node:
    """One proposition variable with a finite, exhaustive set of states.

    ``cpt`` holds one row per joint parent configuration (a single row for
    root nodes), each row a distribution over this node's states in state
    order.  ``observable`` and ``target`` may be left as None, in which case
    the owning network resolves them structurally: observable defaults to
    "has no children", target to "has no parents".
    """

    id: str
    states: tuple[str, ...]
    cpt: tuple[tuple[float, ...], ...]
    label: str | None = None
    parents: tuple[str, ...] = ()
    observable: bool | None = None
    target: bool | None = None
    observation_cost: float = 1.0
    severity: tuple[float, ...] | None = None
    urgency: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "states", tuple(self.states))
        object.__setattr__(self, "parents", tuple(self.parents))
        object.__setattr__(
            self, "cpt", tuple(tuple(float(p) for p in row) for row in self.cpt)
        )
        if self.severity is not None:
            object.__setattr__(self, "severity", tuple(float(s) for s in self.severity))

    def state_index(self, name: str) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise NoSuchNodeError(f"node {self.id!r} has no state {name!r}") from None


@dataclass(frozen=True)
class Issue:
    code: str
    subject: str
    message: str
    severity: str = "error"


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[Issue, ...]

    def codes(self) -> set[str]:
        return {issue.code for issue in self.issues}

    def to_dict(self) -> dict:
        return {
            "ok": self.ok,
            "issues": [
                {
                    "code": i.code,
                    "subject": i.subject,
                    "message": i.message,
                    "severity": i.severity,
                }
                for i in self.issues
            ],
        }


class Network:
    """An ordered collection of nodes forming a directed inference graph.

    Construction resolves structural defaults (observable/target/severity)
    and builds lookup indexes; it does not validate.  Call :func:`validate`
    and check ``report.ok`` before handing the network to the engine.
    Treat instances as immutable once validated.
    """

    def __init__(self, id: str, nodes: Sequence[Node]):
        self.id = id
        children: dict[str, list[str]] = {n.id: [] for n in nodes}
        for node in nodes:
            for parent in node.parents:
                if parent in children:
                    children[parent].append(node.id)
        resolved = []
        for node in nodes:
            updates: dict = {}
            if node.label is None:
                updates["label"] = node.id
            if node.observable is None:
                updates["observable"] = not children.get(node.id)
            if node.target is None:
                updates["target"] = not node.parents
            if node.severity is None:
                updates["severity"] = tuple(1.0 for _ in node.states)
            resolved.append(replace(node, **updates) if updates else node)
        self.nodes: tuple[Node, ...] = tuple(resolved)
        self._children = {nid: tuple(kids) for nid, kids in children.items()}
        self._by_id: dict[str, Node] = {}
        for node in self.nodes:
            self._by_id.setdefault(node.id, node)
        self._validated = False

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Network)
            and self.id == other.id
            and self.nodes == other.nodes
        )

    def __repr__(self) -> str:
        return f"Network(id={self.id!r}, nodes={len(self.nodes)})"

    @property
    def validated(self) -> bool:
        return self._validated

    def node(self, node_id: str) -> Node:
        try:
            return self._by_id[node_id]
        except KeyError:
            raise NoSuchNodeError(f"no node {node_id!r} in network {self.id!r}") from None

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._by_id

    def children(self, node_id: str) -> tuple[str, ...]:
        self.node(node_id)
        return self._children.get(node_id, ())

    def node_ids(self) -> tuple[str, ...]:
        return tuple(n.id for n in self.nodes)

    def category(self, node_id: str) -> NodeCategory:
        node = self.node(node_id)
        if not node.parents:
            return NodeCategory.ROOT
        if not self.children(node_id) and node.observable:
            return NodeCategory.OBSERVABLE_LEAF
        return NodeCategory.INTERMEDIATE


def validate(network: Network) -> ValidationReport:
    """Check structure and parameters; never raises on content problems.

    Violations come back as issues in the report.  A passing report marks the
    network validated, unlocking the propagation engine.
    """
    issues: list[Issue] = []
    seen: set[str] = set()
    for node in network.nodes:
        if node.id in seen:
            issues.append(Issue("ERR_DUPLICATE_NODE_ID", node.id, f"node id {node.id!r} appears more than once"))
        seen.add(node.id)

    for node in network.nodes:
        nid = node.id
        if len(node.states) < 2:
            issues.append(Issue("ERR_TOO_FEW_STATES", nid, f"node {nid!r} needs >= 2 states, has {len(node.states)}"))
        if len(set(node.states)) != len(node.states):
            issues.append(Issue("ERR_DUPLICATE_STATE", nid, f"node {nid!r} has repeated state names"))

        dangling = [p for p in node.parents if p not in network]
        for parent in dangling:
            issues.append(Issue("ERR_DANGLING_LINK", nid, f"node {nid!r} references unknown parent {parent!r}"))
        if len(set(node.parents)) != len(node.parents):
            issues.append(Issue("ERR_DUPLICATE_PARENT", nid, f"node {nid!r} lists a parent more than once"))

        if node.severity is not None and len(node.severity) != len(node.states):
            issues.append(Issue("ERR_SEVERITY_SHAPE", nid, f"node {nid!r} severity length {len(node.severity)} != state count {len(node.states)}"))
        if node.severity is not None and any(s < 0 for s in node.severity):
            issues.append(Issue("ERR_NEGATIVE_WEIGHT", nid, f"node {nid!r} has negative severity"))
        if node.observation_cost < 0:
            issues.append(Issue("ERR_NEGATIVE_WEIGHT", nid, f"node {nid!r} has negative observation cost"))
        if node.urgency < 0:
            issues.append(Issue("ERR_NEGATIVE_WEIGHT", nid, f"node {nid!r} has negative urgency"))

        if not dangling:
            counts = [len(network.node(p).states) for p in node.parents]
            expected_rows = 1
            for c in counts:
                expected_rows *= c
            if len(node.cpt) != expected_rows:
                issues.append(Issue(
                    "ERR_CPT_SHAPE", nid,
                    f"node {nid!r} has {len(node.cpt)} CPT rows, expected {expected_rows}",
                ))
        for r, row in enumerate(node.cpt):
            if len(row) != len(node.states):
                issues.append(Issue("ERR_CPT_SHAPE", nid, f"node {nid!r} CPT row {r} has {len(row)} entries, expected {len(node.states)}"))
                continue
            if any(p < 0 for p in row):
                issues.append(Issue("ERR_NEGATIVE_PROBABILITY", nid, f"node {nid!r} CPT row {r} has a negative entry"))
                continue
            total = sum(row)
            if abs(total - 1.0) > ROW_SUM_TOLERANCE:
                issues.append(Issue(
                    "ERR_CPT_NORMALIZATION", nid,
                    f"node {nid!r} CPT row {r} sums to {total!r}, expected 1.0",
                ))

    structural = not any(i.code in ("ERR_DUPLICATE_NODE_ID", "ERR_DANGLING_LINK") for i in issues)
    if structural:
        issues.extend(_graph_issues(network))

    ok = not any(i.severity == "error" for i in issues)
    network._validated = ok
    return ValidationReport(ok=ok, issues=tuple(issues))


def _graph_issues(network: Network) -> list[Issue]:
    issues: list[Issue] = []
    # Directed cycle check: Kahn's algorithm.
    indegree = {n.id: len(n.parents) for n in network.nodes}
    queue = [nid for nid, d in indegree.items() if d == 0]
    visited = 0
    while queue:
        nid = queue.pop()
        visited += 1
        for child in network.children(nid):
            indegree[child] -= 1
            if indegree[child] == 0:
                queue.append(child)
    if visited != len(network.nodes):
        cyclic = sorted(nid for nid, d in indegree.items() if d > 0)
        issues.append(Issue("ERR_CYCLE", cyclic[0], f"directed cycle through nodes {cyclic}"))

    # Singly-connected check: a component with as many arcs as nodes has an
    # undirected cycle (each tree component has exactly nodes - 1 arcs).
    remaining = set(network.node_ids())
    while remaining:
        start = next(iter(remaining))
        component = {start}
        frontier = [start]
        while frontier:
            nid = frontier.pop()
            node = network.node(nid)
            for neighbor in tuple(node.parents) + network.children(nid):
                if neighbor not in component:
                    component.add(neighbor)
                    frontier.append(neighbor)
        arc_count = sum(len(network.node(nid).parents) for nid in component)
        if arc_count >= len(component):
            issues.append(Issue(
                "ERR_NOT_SINGLY_CONNECTED", min(component),
                f"component containing {min(component)!r} has {arc_count} arcs over {len(component)} nodes",
            ))
        remaining -= component
    return issues


def ensure_validated(network: Network) -> None:
    """Validate on first use; raise if the network does not pass."""
    if network.validated:
        return
    report = validate(network)
    if not report.ok:
        summary = "; ".join(f"{i.code}({i.subject})" for i in report.issues[:5])
        raise NotValidatedError(f"network {network.id!r} failed validation: {summary}")


# ---------------------------------------------------------------------------
# JSON file format.  Strict: unknown keys are rejected, not ignored.

_TOP_KEYS = {"id", "nodes"}
_NODE_KEYS = {
    "id", "label", "states", "parents", "cpt",
    "observable", "target", "observation_cost", "severity", "urgency",
}


def parse_network(text: str) -> Network:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return network_from_dict(doc)


def network_from_dict(doc: object) -> Network:
    if not isinstance(doc, dict):
        raise ParseError(f"document root must be an object, got {type(doc).__name__}")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise UnknownFieldError(f"unknown top-level field(s): {sorted(unknown)}")
    net_id = doc.get("id")
    if not isinstance(net_id, str) or not net_id:
        raise ParseError("document is missing a non-empty string 'id'")
    raw_nodes = doc.get("nodes")
    if not isinstance(raw_nodes, list):
        raise ParseError(f"network {net_id!r}: 'nodes' must be a list")
    nodes = [_node_from_dict(raw, i) for i, raw in enumerate(raw_nodes)]
    return Network(net_id, nodes)


def _node_from_dict(raw: object, index: int) -> Node:
    where = f"nodes[{index}]"
    if not isinstance(raw, dict):
        raise ParseError(f"{where} must be an object, got {type(raw).__name__}")
    node_id = raw.get("id")
    if not isinstance(node_id, str) or not node_id:
        raise ParseError(f"{where} is missing a non-empty string 'id'")
    where = f"node {node_id!r}"

    unknown = set(raw) - _NODE_KEYS
    if unknown:
        raise UnknownFieldError(f"{where}: unknown field(s) {sorted(unknown)}")
    for required in ("states", "cpt"):
        if required not in raw:
            raise ParseError(f"{where}: missing required field {required!r}")

    states = raw["states"]
    if (not isinstance(states, list) or not states
            or not all(isinstance(s, str) and s for s in states)):
        raise ParseError(f"{where}: 'states' must be a non-empty list of non-empty strings")

    parents = raw.get("parents", [])
    if not isinstance(parents, list) or not all(isinstance(p, str) for p in parents):
        raise ParseError(f"{where}: 'parents' must be a list of node ids")

    cpt = raw["cpt"]
    if not isinstance(cpt, list) or not all(isinstance(row, list) for row in cpt):
        raise ParseError(f"{where}: 'cpt' must be a list of rows")
    for r, row in enumerate(cpt):
        if not all(isinstance(p, (int, float)) and not isinstance(p, bool) for p in row):
            raise ParseError(f"{where}: CPT row {r} must contain only numbers")

    label = raw.get("label")
    if label is not None and not isinstance(label, str):
        raise ParseError(f"{where}: 'label' must be a string")

    observable = raw.get("observable")
    if observable is not None and not isinstance(observable, bool):
        raise ParseError(f"{where}: 'observable' must be a boolean")
    target = raw.get("target")
    if target is not None and not isinstance(target, bool):
        raise ParseError(f"{where}: 'target' must be a boolean")

    cost = raw.get("observation_cost", 1.0)
    if isinstance(cost, bool) or not isinstance(cost, (int, float)):
        raise ParseError(f"{where}: 'observation_cost' must be a number")

    severity = raw.get("severity")
    if severity is not None:
        if not isinstance(severity, list) or not all(
            isinstance(s, (int, float)) and not isinstance(s, bool) for s in severity
        ):
            raise ParseError(f"{where}: 'severity' must be a list of numbers")
        severity = tuple(float(s) for s in severity)

    urgency = raw.get("urgency", 1.0)
    if isinstance(urgency, bool) or not isinstance(urgency, (int, float)):
        raise ParseError(f"{where}: 'urgency' must be a number")

    return Node(
        id=node_id,
        label=label,
        states=tuple(states),
        parents=tuple(parents),
        cpt=tuple(tuple(float(p) for p in row) for row in cpt),
        observable=observable,
        target=target,
        observation_cost=float(cost),
        severity=severity,
        urgency=float(urgency),
    )


def network_to_dict(network: Network) -> dict:
    return {
        "id": network.id,
        "nodes": [
            {
                "id": n.id,
                "label": n.label,
                "states": list(n.states),
                "parents": list(n.parents),
                "cpt": [list(row) for row in n.cpt],
                "observable": n.observable,
                "target": n.target,
                "observation_cost": n.observation_cost,
                "severity": list(n.severity or ()),
                "urgency": n.urgency,
            }
            for n in network.nodes
        ],
    }


def serialize_network(network: Network) -> str:
    """Render a network to its canonical JSON form (all fields explicit)."""
    return json.dumps(network_to_dict(network), indent=2) + "\n"
