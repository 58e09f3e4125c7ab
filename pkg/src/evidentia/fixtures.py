"""Reusable benchmark networks, a seeded polytree generator, and ground-truth
world sampling for cycle simulations.

The lettered cases grow in structure: (a) one latent class over independent
indicators, (b) a three-level cascade, (c) one root whose states group into
threat families, (d) two co-existing hypotheses with private and shared
indicators, (e) the two-cause alarm network where one confirmed cause
explains away the other, and (f) a battlefield picture with several
perspective targets wired as a polytree.  All constants are frozen here;
the shipped JSON files must stay byte-consistent with these builders.
"""

from __future__ import annotations

import heapq
import random
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .cycle import InformationSource
from .errors import UnknownCaseError
from .network import Network, Node, ensure_validated, parent_config_index, serialize_network
from .propagation import Evidence


def case_ids() -> tuple[str, ...]:
    return ("a", "b", "c", "d", "e", "f")


def build_case(case_id: str, **params) -> Network:
    """Build a lettered fixture network; parameters only where noted."""
    builders: dict[str, Callable[..., Network]] = {
        "a": _case_a,
        "b": _case_b,
        "c": _case_c,
        "d": _case_d,
        "e": _case_e,
        "f": _case_f,
    }
    builder = builders.get(case_id)
    if builder is None:
        raise UnknownCaseError(f"unknown fixture case {case_id!r}; expected one of {case_ids()}")
    network = builder(**params)
    ensure_validated(network)
    return network


def _case_a(k: int = 3, n: int = 6) -> Network:
    """One k-state latent class, n conditionally independent binary indicators."""
    if k < 2 or n < 1:
        raise ValueError("case a needs k >= 2 states and n >= 1 indicators")
    weights = list(range(k, 0, -1))
    total = sum(weights)
    prior = tuple(w / total for w in weights)
    nodes = [
        Node(
            id="category",
            label="Latent category",
            states=tuple(f"c{i + 1}" for i in range(k)),
            cpt=(prior,),
        )
    ]
    for j in range(n):
        rows = []
        for i in range(k):
            present = ((3 * i + 5 * j) % 9 + 1) / 10
            rows.append((present, 1.0 - present))
        nodes.append(
            Node(
                id=f"x{j + 1}",
                label=f"Indicator {j + 1}",
                states=("present", "absent"),
                parents=("category",),
                cpt=tuple(rows),
            )
        )
    return Network("case_a", nodes)


def _case_b() -> Network:
    """Depth-three cascade; evidence enters only at the leaves."""
    nodes = [
        Node(
            id="origin",
            label="Originating condition",
            states=("o1", "o2", "o3"),
            cpt=((0.45, 0.35, 0.20),),
        ),
        Node(
            id="m1",
            label="Subsystem state",
            states=("active", "idle"),
            parents=("origin",),
            cpt=((0.8, 0.2), (0.3, 0.7), (0.1, 0.9)),
        ),
        Node(
            id="m2",
            label="Load level",
            states=("low", "mid", "high"),
            parents=("origin",),
            cpt=((0.6, 0.3, 0.1), (0.2, 0.5, 0.3), (0.1, 0.3, 0.6)),
        ),
        Node(
            id="l1",
            label="Panel lamp",
            states=("on", "off"),
            parents=("m1",),
            cpt=((0.9, 0.1), (0.2, 0.8)),
        ),
        Node(
            id="l2",
            label="Audible hum",
            states=("on", "off"),
            parents=("m1",),
            cpt=((0.7, 0.3), (0.1, 0.9)),
        ),
        Node(
            id="l3",
            label="Gauge reading",
            states=("high", "normal"),
            parents=("m2",),
            cpt=((0.8, 0.2), (0.4, 0.6), (0.1, 0.9)),
        ),
        Node(
            id="l4",
            label="Vibration class",
            states=("a", "b", "c"),
            parents=("m2",),
            cpt=((0.7, 0.2, 0.1), (0.2, 0.6, 0.2), (0.1, 0.2, 0.7)),
        ),
    ]
    return Network("case_b", nodes)


def _case_c() -> Network:
    """Six-state threat root whose states group into families.

    States 2-3 form family A and states 4-6 family B; a family-level virtual
    finding uses a likelihood constant within the family, which multiplies
    every member state's belief by the same factor before renormalization.
    """
    nodes = [
        Node(
            id="threat",
            label="Track classification",
            states=("benign", "a1", "a2", "b1", "b2", "b3"),
            cpt=((0.5, 0.1, 0.1, 0.1, 0.1, 0.1),),
            severity=(0.5, 2.0, 2.5, 3.0, 3.5, 4.0),
            urgency=2.0,
        ),
        Node(
            id="radar_signature",
            label="Radar return strength",
            states=("strong", "weak"),
            parents=("threat",),
            cpt=(
                (0.10, 0.90),
                (0.70, 0.30),
                (0.75, 0.25),
                (0.55, 0.45),
                (0.60, 0.40),
                (0.65, 0.35),
            ),
        ),
        Node(
            id="iff_response",
            label="Transponder reply",
            states=("absent", "present"),
            parents=("threat",),
            cpt=(
                (0.05, 0.95),
                (0.70, 0.30),
                (0.65, 0.35),
                (0.60, 0.40),
                (0.55, 0.45),
                (0.50, 0.50),
            ),
        ),
        Node(
            id="velocity_profile",
            label="Observed speed band",
            states=("slow", "cruise", "dash"),
            parents=("threat",),
            cpt=(
                (0.50, 0.40, 0.10),
                (0.20, 0.50, 0.30),
                (0.15, 0.35, 0.50),
                (0.30, 0.45, 0.25),
                (0.25, 0.45, 0.30),
                (0.10, 0.30, 0.60),
            ),
        ),
    ]
    return Network("case_c", nodes)


def _case_d() -> Network:
    """Two co-existing binary hypotheses with private and shared children."""
    nodes = [
        Node(
            id="h1",
            label="Condition one",
            states=("present", "absent"),
            cpt=((0.3, 0.7),),
        ),
        Node(
            id="h2",
            label="Condition two",
            states=("present", "absent"),
            cpt=((0.4, 0.6),),
        ),
        Node(
            id="p1",
            label="Private sign of one",
            states=("on", "off"),
            parents=("h1",),
            cpt=((0.9, 0.1), (0.2, 0.8)),
        ),
        Node(
            id="p2",
            label="Private sign of two",
            states=("on", "off"),
            parents=("h2",),
            cpt=((0.8, 0.2), (0.1, 0.9)),
        ),
        Node(
            id="s",
            label="Shared sign",
            states=("on", "off"),
            parents=("h1", "h2"),
            cpt=((0.95, 0.05), (0.7, 0.3), (0.6, 0.4), (0.05, 0.95)),
        ),
    ]
    return Network("case_d", nodes)


def _case_e() -> Network:
    """Two independent causes of one alarm; confirming either explains the
    alarm away from the other.  Five nodes, four arcs."""
    nodes = [
        Node(
            id="burglary",
            label="Burglary in progress",
            states=("true", "false"),
            cpt=((0.01, 0.99),),
            observable=False,
            severity=(3.0, 1.0),
            urgency=1.5,
        ),
        Node(
            id="earthquake",
            label="Earthquake occurred",
            states=("true", "false"),
            cpt=((0.02, 0.98),),
            observable=True,
            observation_cost=3.0,
            severity=(2.0, 1.0),
        ),
        Node(
            id="alarm",
            label="House alarm sounding",
            states=("on", "off"),
            parents=("burglary", "earthquake"),
            cpt=((0.95, 0.05), (0.94, 0.06), (0.29, 0.71), (0.001, 0.999)),
            observable=True,
            observation_cost=2.0,
        ),
        Node(
            id="radio",
            label="Earthquake announced on the radio",
            states=("announced", "silent"),
            parents=("earthquake",),
            cpt=((0.9, 0.1), (0.001, 0.999)),
        ),
        Node(
            id="call",
            label="Neighbor calls",
            states=("received", "none"),
            parents=("alarm",),
            cpt=((0.9, 0.1), (0.05, 0.95)),
        ),
    ]
    return Network("case_e", nodes)


def _case_f() -> Network:
    """Battlefield picture: several perspective targets over one terrain.

    Sized so the full joint stays within the enumeration oracle's
    configuration cap (4 * 2**18 = 2**20 exactly).
    """
    nodes = [
        Node(
            id="attack_type",
            label="Attack type",
            states=("deliberate", "hasty", "spoiling", "ambush"),
            cpt=((0.35, 0.30, 0.20, 0.15),),
            observable=False,
            severity=(2.0, 1.0, 1.5, 3.0),
            urgency=2.0,
        ),
        Node(
            id="target_sector",
            label="Attack target sector",
            states=("northern", "southern"),
            parents=("attack_type",),
            cpt=((0.7, 0.3), (0.5, 0.5), (0.4, 0.6), (0.6, 0.4)),
            target=True,
            severity=(2.0, 1.0),
            urgency=1.5,
        ),
        Node(
            id="deployment",
            label="Force deployment pattern",
            states=("massed", "dispersed"),
            parents=("attack_type",),
            cpt=((0.8, 0.2), (0.4, 0.6), (0.3, 0.7), (0.2, 0.8)),
            target=True,
            observation_cost=4.0,
            severity=(1.5, 1.0),
        ),
        Node(
            id="x1",
            label="INCREASED ACTIVITY IN THE NORTHERN AREA",
            states=("present", "absent"),
            parents=("target_sector",),
            cpt=((0.8, 0.2), (0.15, 0.85)),
        ),
        Node(
            id="terrain",
            label="Terrain character",
            states=("open", "close"),
            cpt=((0.55, 0.45),),
            target=False,
        ),
        Node(
            id="cover",
            label="Concealment available",
            states=("dense", "sparse"),
            parents=("terrain",),
            cpt=((0.2, 0.8), (0.85, 0.15)),
        ),
        Node(
            id="trafficability",
            label="Ground trafficability",
            states=("good", "poor"),
            parents=("terrain",),
            cpt=((0.8, 0.2), (0.3, 0.7)),
        ),
        Node(
            id="capability",
            label="Enemy capability posture",
            states=("full", "degraded"),
            cpt=((0.6, 0.4),),
            target=False,
        ),
        Node(
            id="tactics",
            label="Expected tactics",
            states=("envelopment", "penetration"),
            parents=("terrain", "capability"),
            cpt=((0.7, 0.3), (0.5, 0.5), (0.35, 0.65), (0.2, 0.8)),
            target=True,
            observation_cost=6.0,
            severity=(1.5, 1.0),
        ),
        Node(
            id="thrust_tanks",
            label="Main thrust includes tanks",
            states=("yes", "no"),
            parents=("trafficability",),
            cpt=((0.55, 0.45), (0.1, 0.9)),
            target=True,
            severity=(2.0, 1.0),
            urgency=1.5,
        ),
        Node(
            id="x2",
            label="BRIDGING EQUIPMENT MOVED FORWARD",
            states=("present", "absent"),
            parents=("thrust_tanks",),
            cpt=((0.7, 0.3), (0.05, 0.95)),
        ),
        Node(
            id="thrust_air",
            label="Main thrust includes air assets",
            states=("yes", "no"),
            cpt=((0.3, 0.7),),
            observation_cost=8.0,
            severity=(2.0, 1.0),
            urgency=1.2,
        ),
        Node(
            id="thrust_mobile_infantry",
            label="Main thrust includes mobile infantry",
            states=("yes", "no"),
            cpt=((0.45, 0.55),),
            observation_cost=8.0,
            severity=(1.5, 1.0),
        ),
        Node(
            id="thrust_parachutes",
            label="Main thrust includes parachute troops",
            states=("yes", "no"),
            cpt=((0.15, 0.85),),
            observation_cost=8.0,
            severity=(2.5, 1.0),
            urgency=1.3,
        ),
        Node(
            id="thrust_helicopter_infantry",
            label="Main thrust includes helicopter infantry",
            states=("yes", "no"),
            cpt=((0.2, 0.8),),
            observation_cost=8.0,
            severity=(2.0, 1.0),
            urgency=1.2,
        ),
        Node(
            id="tree_height",
            label="Tree height",
            states=("tall", "short"),
            parents=("cover",),
            cpt=((0.75, 0.25), (0.25, 0.75)),
        ),
        Node(
            id="tree_density",
            label="Tree density",
            states=("thick", "thin"),
            parents=("cover",),
            cpt=((0.85, 0.15), (0.1, 0.9)),
        ),
        Node(
            id="boulder_size",
            label="Boulder size",
            states=("small", "large"),
            parents=("trafficability",),
            cpt=((0.8, 0.2), (0.25, 0.75)),
        ),
        Node(
            id="soil_type",
            label="Soil type",
            states=("firm", "soft"),
            parents=("trafficability",),
            cpt=((0.85, 0.15), (0.3, 0.7)),
        ),
    ]
    return Network("case_f", nodes)


# ---------------------------------------------------------------------------
# Random polytrees and world simulation.


def random_polytree(seed: int, node_count: int = 8, max_states: int = 4) -> Network:
    """A validated random polytree: uniform labeled tree skeleton, random arc
    orientations, Dirichlet(1) CPT rows.  Deterministic per seed."""
    if node_count < 1:
        raise ValueError("node_count must be >= 1")
    if max_states < 2:
        raise ValueError("max_states must be >= 2")
    rng = random.Random(seed)
    edges = _random_tree_edges(rng, node_count)
    parents: dict[int, list[int]] = {i: [] for i in range(node_count)}
    for u, v in edges:
        if rng.random() < 0.5:
            parents[v].append(u)
        else:
            parents[u].append(v)
    counts = [rng.randint(2, max_states) for _ in range(node_count)]

    nodes = []
    for i in range(node_count):
        rows = 1
        for p in parents[i]:
            rows *= counts[p]
        cpt = tuple(_dirichlet_row(rng, counts[i]) for _ in range(rows))
        nodes.append(
            Node(
                id=f"n{i}",
                states=tuple(f"s{j}" for j in range(counts[i])),
                parents=tuple(f"n{p}" for p in parents[i]),
                cpt=cpt,
            )
        )
    network = Network(f"random_{seed}", nodes)
    ensure_validated(network)
    return network


def _random_tree_edges(rng: random.Random, n: int) -> list[tuple[int, int]]:
    """Decode a random sequence into a uniform random labeled tree."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    sequence = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in sequence:
        degree[x] += 1
    leaves = [i for i in range(n) if degree[i] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in sequence:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return edges


def _dirichlet_row(rng: random.Random, k: int) -> tuple[float, ...]:
    draws = [rng.gammavariate(1.0, 1.0) for _ in range(k)]
    total = sum(draws)
    return tuple(d / total for d in draws)


def sample_world(network: Network, seed: int) -> dict[str, int]:
    """Draw one complete joint configuration by ancestral sampling."""
    ensure_validated(network)
    rng = random.Random(seed)
    order = _topological(network)
    world: dict[str, int] = {}
    for node_id in order:
        node = network.node(node_id)
        counts = [len(network.node(p).states) for p in node.parents]
        assignment = [world[p] for p in node.parents]
        row = node.cpt[parent_config_index(counts, assignment)]
        u = rng.random()
        cumulative = 0.0
        picked = len(row) - 1
        for s, p in enumerate(row):
            cumulative += p
            if u < cumulative:
                picked = s
                break
        world[node_id] = picked
    return world


def _topological(network: Network) -> list[str]:
    indegree = {n.id: len(n.parents) for n in network.nodes}
    ready = [n.id for n in network.nodes if indegree[n.id] == 0]
    order: list[str] = []
    while ready:
        nid = ready.pop(0)
        order.append(nid)
        for child in network.children(nid):
            indegree[child] -= 1
            if indegree[child] == 0:
                ready.append(child)
    return order


def world_executor(
    network: Network, world: Mapping[str, int], seed: int = 0
) -> Callable[[InformationSource, list[str]], list[Evidence]]:
    """Executor that reads outcomes off a fixed ground-truth world.

    Faithful yields come back as hard findings of the true state; yields
    with a confusion matrix sample a garbled report and come back as the
    matching likelihood column.
    """
    rng = random.Random(seed)

    def execute(source: InformationSource, open_yields: list[str]) -> list[Evidence]:
        findings: list[Evidence] = []
        for node_id in open_yields:
            true_state = world[node_id]
            confusion = source.confusion(node_id)
            if confusion is None:
                findings.append(Evidence.hard(node_id, true_state))
            else:
                row = confusion[true_state]
                report = rng.choices(range(len(row)), weights=row)[0]
                findings.append(Evidence.virtual(node_id, tuple(confusion[:, report])))
        return findings

    return execute


def unit_cost_sources(network: Network) -> list[InformationSource]:
    """One perfect unit-cost source per observable node."""
    return [
        InformationSource(id=f"obs_{n.id}", yields=(n.id,), cost=1.0)
        for n in network.nodes
        if n.observable
    ]


def write_fixture_files(directory: str | Path) -> list[Path]:
    """Regenerate the shipped fixture files from the builders."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for case_id in case_ids():
        path = directory / f"case_{case_id}.json"
        path.write_text(serialize_network(build_case(case_id)))
        written.append(path)
    return written
