"""Brute-force posterior computation over the full joint distribution.

This is the reference path the message-passing engine is checked against.
It multiplies CPT entries across every joint configuration, weights by the
evidence ledger, renormalizes, and marginalizes per node.  Exponential in
network size, so it refuses anything past 2**20 configurations, but it works
on any acyclic graph, including multiply connected ones the propagation
engine rejects.
"""

from __future__ import annotations

from typing import Mapping, Sequence

import numpy as np

from .errors import NotValidatedError, TooLargeError, ZeroNormalizerError
from .network import Network, validate
from .propagation import Evidence

MAX_CONFIGURATIONS = 1 << 20

# Structural problems that make enumeration meaningless.  A multiply
# connected skeleton is fine here; broken CPTs or dangling links are not.
_FATAL = (
    "ERR_DUPLICATE_NODE_ID",
    "ERR_DANGLING_LINK",
    "ERR_DUPLICATE_PARENT",
    "ERR_CYCLE",
    "ERR_CPT_SHAPE",
    "ERR_CPT_NORMALIZATION",
    "ERR_NEGATIVE_PROBABILITY",
    "ERR_TOO_FEW_STATES",
    "ERR_DUPLICATE_STATE",
)


def enumerate_posteriors(
    network: Network, ledger: Sequence[Evidence] = ()
) -> Mapping[str, np.ndarray]:
    """Posterior marginals for every node given the ledger, by enumeration."""
    report = validate(network)
    fatal = [i for i in report.issues if i.code in _FATAL]
    if fatal:
        raise NotValidatedError(
            f"network {network.id!r} cannot be enumerated: "
            + "; ".join(f"{i.code}({i.subject})" for i in fatal[:5])
        )

    shape = tuple(len(n.states) for n in network.nodes)
    total = 1
    for k in shape:
        total *= k
        if total > MAX_CONFIGURATIONS:
            raise TooLargeError(
                f"network {network.id!r} exceeds {MAX_CONFIGURATIONS} joint configurations"
            )

    pos = {n.id: i for i, n in enumerate(network.nodes)}
    joint = np.ones(shape)
    for i, node in enumerate(network.nodes):
        counts = tuple(len(network.node(p).states) for p in node.parents)
        tensor = np.asarray(node.cpt, dtype=float).reshape(counts + (shape[i],))
        axes = [pos[p] for p in node.parents] + [i]
        order = np.argsort(axes)
        tensor = np.transpose(tensor, order)
        broadcast = [1] * len(shape)
        for axis in axes:
            broadcast[axis] = shape[axis]
        joint *= tensor.reshape(broadcast)

    seen: set[str] = set()
    for finding in ledger:
        if finding.node in seen:
            raise ValueError(f"ledger carries two findings on node {finding.node!r}")
        seen.add(finding.node)
        finding.validate_against(network)
        axis = pos[finding.node]
        weight = finding.weight_vector(shape[axis])
        broadcast = [1] * len(shape)
        broadcast[axis] = shape[axis]
        joint *= weight.reshape(broadcast)

    if float(joint.sum()) <= 1e-300:
        raise ZeroNormalizerError(
            "the ledger assigns zero probability to every joint configuration"
        )

    posteriors: dict[str, np.ndarray] = {}
    for i, node in enumerate(network.nodes):
        others = tuple(a for a in range(len(shape)) if a != i)
        marginal = joint.sum(axis=others) if others else joint.copy()
        posteriors[node.id] = marginal / marginal.sum()
    return posteriors
