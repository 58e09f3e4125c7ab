import math
from pathlib import Path

import numpy as np
import pytest

from evidentia import (
    Evidence,
    InformationSource,
    UnknownCaseError,
    assert_evidence,
    build_case,
    case_ids,
    enumerate_posteriors,
    initialize,
    parse_network,
    random_polytree,
    sample_world,
    serialize_network,
    unit_cost_sources,
    validate,
    world_executor,
)


class TestBuilders:
    def test_all_cases_validate(self):
        for case_id in case_ids():
            report = validate(build_case(case_id))
            assert report.ok, (case_id, report.codes())

    def test_unknown_case(self):
        with pytest.raises(UnknownCaseError):
            build_case("z")

    def test_case_e_shape(self):
        net = build_case("e")
        assert len(net.nodes) == 5
        assert sum(len(n.parents) for n in net.nodes) == 4

    def test_case_a_parameters(self):
        net = build_case("a", k=3, n=4)
        targets = [n.id for n in net.nodes if n.target]
        leaves = [n.id for n in net.nodes if n.observable]
        assert targets == ["category"]
        assert len(leaves) == 4
        with pytest.raises(ValueError):
            build_case("a", k=1)

    def test_files_match_builders(self):
        for case_id in case_ids():
            path = Path("fixtures") / f"case_{case_id}.json"
            assert parse_network(path.read_text()) == build_case(case_id)
            assert serialize_network(build_case(case_id)) == path.read_text()


class TestCaseBehaviors:
    def test_case_e_explaining_away(self):
        net = build_case("e")
        prior = initialize(net)
        alarm = assert_evidence(prior, Evidence.hard("alarm", 0))
        both = assert_evidence(alarm, Evidence.hard("earthquake", 0))
        assert alarm.belief("burglary")[0] == pytest.approx(0.583, abs=1e-3)
        assert both.belief("burglary")[0] < alarm.belief("burglary")[0]
        assert alarm.belief("burglary")[0] > prior.belief("burglary")[0]

    def test_case_c_family_finding_scales_members_equally(self):
        net = build_case("c")
        prior = initialize(net)
        family_b = Evidence.virtual("threat", (0.2, 0.2, 0.2, 0.7, 0.7, 0.7))
        posterior = assert_evidence(prior, family_b)
        before = prior.belief("threat")
        after = posterior.belief("threat")
        ratios_b = [after[i] / before[i] for i in (3, 4, 5)]
        ratios_a = [after[i] / before[i] for i in (1, 2)]
        assert max(ratios_b) - min(ratios_b) <= 1e-12
        assert max(ratios_a) - min(ratios_a) <= 1e-12
        assert ratios_b[0] > ratios_a[0]  # the family the finding supports gains

    def test_case_b_leaf_reaches_root(self):
        net = build_case("b")
        state = assert_evidence(initialize(net), Evidence.hard("l4", 2))
        oracle = enumerate_posteriors(net, state.ledger)
        assert np.max(np.abs(state.belief("origin") - oracle["origin"])) <= 1e-12
        assert abs(state.belief("origin")[0] - 0.45) > 1e-3

    def test_case_d_private_evidence_isolates(self):
        net = build_case("d")
        state = assert_evidence(initialize(net), Evidence.hard("p1", 0))
        assert state.belief("h1")[0] != pytest.approx(0.3, abs=1e-6)
        assert state.belief("h2") == pytest.approx([0.4, 0.6], abs=1e-12)

    def test_case_f_fits_the_oracle_exactly(self):
        net = build_case("f")
        size = math.prod(len(n.states) for n in net.nodes)
        assert size == 1 << 20
        state = assert_evidence(initialize(net), Evidence.hard("x1", 0))
        oracle = enumerate_posteriors(net, state.ledger)
        prior = initialize(net)
        moved = np.max(np.abs(state.belief("attack_type") - prior.belief("attack_type")))
        assert moved > 1e-3
        for nid in net.node_ids():
            assert np.max(np.abs(state.belief(nid) - oracle[nid])) <= 1e-9


class TestRandomPolytree:
    def test_deterministic_per_seed(self):
        assert serialize_network(random_polytree(7)) == serialize_network(random_polytree(7))

    def test_single_node(self):
        net = random_polytree(3, node_count=1)
        assert len(net.nodes) == 1
        assert validate(net).ok

    def test_thousand_seeds_validate(self):
        for seed in range(1000):
            net = random_polytree(seed, node_count=1 + seed % 8)
            assert validate(net).ok, seed

    def test_parameter_guards(self):
        with pytest.raises(ValueError):
            random_polytree(0, node_count=0)
        with pytest.raises(ValueError):
            random_polytree(0, max_states=1)


class TestWorldSampling:
    def test_deterministic_per_seed(self):
        net = build_case("e")
        assert sample_world(net, 11) == sample_world(net, 11)

    def test_deterministic_cpts_give_the_only_world(self):
        from evidentia import Network, Node

        net = Network(
            "det",
            [
                Node(id="A", states=("x", "y"), cpt=((1.0, 0.0),)),
                Node(id="B", states=("x", "y"), parents=("A",), cpt=((0.0, 1.0), (1.0, 0.0))),
            ],
        )
        for seed in range(20):
            assert sample_world(net, seed) == {"A": 0, "B": 1}

    def test_root_frequency_tracks_prior(self):
        net = build_case("e")
        hits = sum(sample_world(net, seed)["burglary"] == 0 for seed in range(10000))
        assert abs(hits / 10000 - 0.01) <= 0.02

    def test_world_probability_positive(self):
        net = build_case("f")
        world = sample_world(net, 5)
        ledger = tuple(Evidence.hard(nid, s) for nid, s in world.items())
        # no error means the sampled world has positive probability
        enumerate_posteriors(net, ledger)


class TestExecutors:
    def test_unit_cost_sources_cover_observables(self):
        net = build_case("e")
        sources = unit_cost_sources(net)
        yielded = {nid for s in sources for nid in s.yields}
        assert yielded == {n.id for n in net.nodes if n.observable}
        assert all(s.cost == 1.0 for s in sources)

    def test_perfect_executor_reports_truth(self):
        net = build_case("e")
        world = sample_world(net, 2)
        execute = world_executor(net, world)
        source = InformationSource(id="s", yields=("alarm", "radio"), cost=1.0)
        findings = execute(source, ["alarm", "radio"])
        assert [f.node for f in findings] == ["alarm", "radio"]
        assert all(f.state == world[f.node] for f in findings)

    def test_garbled_executor_returns_confusion_column(self):
        net = build_case("e")
        world = {"burglary": 0, "earthquake": 0, "alarm": 0, "radio": 0, "call": 0}
        confusion = [[0.8, 0.2], [0.3, 0.7]]
        source = InformationSource(
            id="noisy", yields=("alarm",), cost=1.0, reliability={"alarm": confusion}
        )
        execute = world_executor(net, world, seed=4)
        (finding,) = execute(source, ["alarm"])
        assert finding.state is None
        columns = [tuple(col) for col in np.array(confusion).T]
        assert tuple(finding.likelihood) in columns
