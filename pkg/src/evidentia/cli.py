"""Command-line front end: validate networks, run one-shot inference,
drive a simulated acquisition cycle, or start the session service.

Exit codes: 0 success, 1 validation/inference failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .cycle import CycleConfig, InformationSource, run_cycle, start_session
from .enumeration import enumerate_posteriors
from .errors import EvidentiaError
from .fixtures import sample_world, unit_cost_sources, world_executor
from .network import Network, parse_network, validate
from .propagation import Evidence, assert_evidence, evidence_from_dict, initialize


def _load_network(path: str) -> Network:
    return parse_network(Path(path).read_text())


def _parse_evidence_args(entries: list[str], network: Network) -> list[Evidence]:
    """Each entry is either `node=state`, `node=p1,p2,...` (virtual likelihood),
    or a path to a JSON file holding an array of finding objects."""
    findings: list[Evidence] = []
    for entry in entries:
        if "=" in entry:
            node_id, _, value = entry.partition("=")
            node = network.node(node_id)
            if "," in value:
                likelihood = tuple(float(x) for x in value.split(","))
                findings.append(Evidence.virtual(node_id, likelihood))
            else:
                findings.append(Evidence.hard(node_id, node.state_index(value)))
        else:
            raw = json.loads(Path(entry).read_text())
            if not isinstance(raw, list):
                raise ValueError(f"evidence file {entry} must hold a JSON array")
            findings.extend(evidence_from_dict(item, network) for item in raw)
    return findings


def _cmd_validate(args) -> int:
    network = _load_network(args.network)
    report = validate(network)
    print(json.dumps(report.to_dict(), indent=2))
    print("ok" if report.ok else "INVALID")
    return 0 if report.ok else 1


def _cmd_infer(args) -> int:
    network = _load_network(args.network)
    report = validate(network)
    if not report.ok:
        print(json.dumps(report.to_dict(), indent=2), file=sys.stderr)
        return 1
    findings = _parse_evidence_args(args.evidence, network)
    state = initialize(network)
    for finding in findings:
        state = assert_evidence(state, finding)
    oracle = enumerate_posteriors(network, state.ledger) if args.oracle else None

    width = max(len(n) for n in network.node_ids())
    worst = 0.0
    for node_id in network.node_ids():
        engine = state.belief(node_id)
        line = f"{node_id:<{width}}  " + " ".join(f"{x:.6f}" for x in engine)
        if oracle is not None:
            diff = max(abs(float(a) - float(b)) for a, b in zip(engine, oracle[node_id]))
            worst = max(worst, diff)
            line += "   | oracle " + " ".join(f"{x:.6f}" for x in oracle[node_id])
        print(line)
    if oracle is not None:
        print(f"max |engine - oracle| = {worst:.3e}")
    return 0


def _cmd_cycle(args) -> int:
    network = _load_network(args.network)
    report = validate(network)
    if not report.ok:
        print(json.dumps(report.to_dict(), indent=2), file=sys.stderr)
        return 1
    if args.sources == "all-unit-cost":
        sources = unit_cost_sources(network)
    else:
        raw = json.loads(Path(args.sources).read_text())
        sources = [InformationSource.from_dict(item) for item in raw]
    config = CycleConfig()
    if args.config:
        config = CycleConfig.from_dict(json.loads(Path(args.config).read_text()))
    world = sample_world(network, args.world_seed)
    state = start_session(network, config=config, sources=sources)
    executor = world_executor(network, world, seed=args.world_seed)
    state, commitment = run_cycle(state, executor)
    for event in state.trace:
        print(json.dumps(event))
    print("REPORT")
    print(json.dumps(commitment.to_dict(network), indent=2))
    print("WORLD")
    print(json.dumps({n: network.node(n).states[s] for n, s in world.items()}, indent=2))
    return 0


def _cmd_serve(args) -> int:
    from .service import resolve_data_dir, serve

    serve(args.port, resolve_data_dir(args.data), static_dir=args.static, host=args.host)
    return 0


def cli_main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="evidentia",
        description="Belief networks with a sequential evidence-acquisition shell.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a network file")
    p.add_argument("network")
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("infer", help="print posteriors for a network and evidence")
    p.add_argument("network")
    p.add_argument(
        "--evidence",
        action="append",
        default=[],
        help="node=state, node=p1,p2,... or a JSON findings file; repeatable",
    )
    p.add_argument("--oracle", action="store_true", help="print enumeration side by side")
    p.set_defaults(func=_cmd_infer)

    p = sub.add_parser("cycle", help="run a simulated acquisition cycle")
    p.add_argument("network")
    p.add_argument("--sources", required=True, help="JSON sources file or 'all-unit-cost'")
    p.add_argument("--world-seed", type=int, required=True)
    p.add_argument("--config", help="JSON cycle-config file")
    p.set_defaults(func=_cmd_cycle)

    p = sub.add_parser("serve", help="start the HTTP session service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--data", help="session snapshot directory (env EVIDENTIA_DATA)")
    p.add_argument("--static", help="directory of console files to serve at /")
    p.add_argument("--host", default="127.0.0.1")
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except EvidentiaError as exc:
        print(f"error[{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
