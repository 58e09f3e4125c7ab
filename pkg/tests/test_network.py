import itertools
import random

import pytest

from evidentia import (
    IndexOutOfRangeError,
    Network,
    Node,
    NodeCategory,
    NotValidatedError,
    ParseError,
    UnknownFieldError,
    ensure_validated,
    network_to_dict,
    parent_config_index,
    parse_network,
    serialize_network,
    validate,
)


def two_node_net(child_row0=(0.9, 0.1), child_row1=(0.2, 0.8)) -> Network:
    return Network(
        "tiny",
        [
            Node(id="H", states=("h", "not_h"), cpt=((0.2, 0.8),)),
            Node(id="E", states=("e", "not_e"), parents=("H",), cpt=(child_row0, child_row1)),
        ],
    )


class TestParentConfigIndex:
    def test_documented_values(self):
        assert parent_config_index([2, 3], [1, 2]) == 5
        assert parent_config_index([2, 2], [0, 0]) == 0
        assert parent_config_index([3], [2]) == 2
        assert parent_config_index([], []) == 0

    def test_bijection(self):
        counts = [2, 3, 4]
        seen = [
            parent_config_index(counts, assignment)
            for assignment in itertools.product(*(range(c) for c in counts))
        ]
        assert seen == list(range(24))

    def test_out_of_range(self):
        with pytest.raises(IndexOutOfRangeError):
            parent_config_index([2, 3], [1, 3])
        with pytest.raises(IndexOutOfRangeError):
            parent_config_index([2], [-1])
        with pytest.raises(IndexOutOfRangeError):
            parent_config_index([2, 3], [1])


class TestDefaults:
    def test_structural_defaults(self):
        net = two_node_net()
        assert net.node("H").observable is False  # has a child
        assert net.node("E").observable is True  # leaf
        assert net.node("H").target is True  # root
        assert net.node("E").target is False
        assert net.node("H").label == "H"
        assert net.node("H").severity == (1.0, 1.0)
        assert net.node("H").observation_cost == 1.0
        assert net.node("H").urgency == 1.0

    def test_explicit_flags_win(self):
        net = Network(
            "flags",
            [
                Node(id="A", states=("x", "y"), cpt=((0.5, 0.5),), observable=True, target=False),
                Node(
                    id="B",
                    states=("x", "y"),
                    parents=("A",),
                    cpt=((1.0, 0.0), (0.0, 1.0)),
                    target=True,
                ),
            ],
        )
        assert net.node("A").observable is True
        assert net.node("A").target is False
        assert net.node("B").target is True

    def test_categories(self):
        net = Network(
            "cat",
            [
                Node(id="r", states=("a", "b"), cpt=((0.5, 0.5),)),
                Node(id="m", states=("a", "b"), parents=("r",), cpt=((0.5, 0.5), (0.5, 0.5))),
                Node(id="leaf", states=("a", "b"), parents=("m",), cpt=((0.5, 0.5), (0.5, 0.5))),
            ],
        )
        assert net.category("r") is NodeCategory.ROOT
        assert net.category("m") is NodeCategory.INTERMEDIATE
        assert net.category("leaf") is NodeCategory.OBSERVABLE_LEAF


class TestValidate:
    def test_clean_network_ok(self):
        report = validate(two_node_net())
        assert report.ok
        assert report.issues == ()

    def test_row_normalization(self):
        report = validate(two_node_net(child_row0=(0.5, 0.4)))
        assert not report.ok
        assert "ERR_CPT_NORMALIZATION" in report.codes()

    def test_diamond_not_singly_connected(self):
        rows2 = ((0.5, 0.5), (0.5, 0.5))
        net = Network(
            "diamond",
            [
                Node(id="A", states=("0", "1"), cpt=((0.5, 0.5),)),
                Node(id="B", states=("0", "1"), parents=("A",), cpt=rows2),
                Node(id="C", states=("0", "1"), parents=("A",), cpt=rows2),
                Node(
                    id="D",
                    states=("0", "1"),
                    parents=("B", "C"),
                    cpt=((0.5, 0.5),) * 4,
                ),
            ],
        )
        report = validate(net)
        assert not report.ok
        assert "ERR_NOT_SINGLY_CONNECTED" in report.codes()

    def test_directed_cycle(self):
        rows2 = ((0.5, 0.5), (0.5, 0.5))
        net = Network(
            "loop",
            [
                Node(id="A", states=("0", "1"), parents=("B",), cpt=rows2),
                Node(id="B", states=("0", "1"), parents=("A",), cpt=rows2),
            ],
        )
        assert "ERR_CYCLE" in validate(net).codes()

    def test_dangling_parent(self):
        net = Network(
            "dangling",
            [Node(id="E", states=("0", "1"), parents=("ghost",), cpt=((0.5, 0.5), (0.5, 0.5)))],
        )
        assert "ERR_DANGLING_LINK" in validate(net).codes()

    def test_duplicate_node_ids(self):
        net = Network(
            "dup",
            [
                Node(id="A", states=("0", "1"), cpt=((0.5, 0.5),)),
                Node(id="A", states=("0", "1"), cpt=((0.5, 0.5),)),
            ],
        )
        assert "ERR_DUPLICATE_NODE_ID" in validate(net).codes()

    def test_state_problems(self):
        net = Network("one_state", [Node(id="A", states=("only",), cpt=((1.0,),))])
        assert "ERR_TOO_FEW_STATES" in validate(net).codes()
        net = Network("dup_state", [Node(id="A", states=("x", "x"), cpt=((0.5, 0.5),))])
        assert "ERR_DUPLICATE_STATE" in validate(net).codes()

    def test_cpt_shape_and_sign(self):
        net = Network(
            "shape",
            [
                Node(id="H", states=("h", "n"), cpt=((0.2, 0.8),)),
                Node(id="E", states=("e", "n"), parents=("H",), cpt=((0.9, 0.1),)),
            ],
        )
        assert "ERR_CPT_SHAPE" in validate(net).codes()
        net = Network("neg", [Node(id="A", states=("0", "1"), cpt=((1.5, -0.5),))])
        assert "ERR_NEGATIVE_PROBABILITY" in validate(net).codes()

    def test_weight_problems(self):
        net = Network(
            "sev", [Node(id="A", states=("0", "1"), cpt=((0.5, 0.5),), severity=(1.0,))]
        )
        assert "ERR_SEVERITY_SHAPE" in validate(net).codes()
        net = Network(
            "neg_u", [Node(id="A", states=("0", "1"), cpt=((0.5, 0.5),), urgency=-1.0)]
        )
        assert "ERR_NEGATIVE_WEIGHT" in validate(net).codes()
        net = Network(
            "neg_c",
            [Node(id="A", states=("0", "1"), cpt=((0.5, 0.5),), observation_cost=-2.0)],
        )
        assert "ERR_NEGATIVE_WEIGHT" in validate(net).codes()

    def test_duplicate_parent(self):
        net = Network(
            "dp",
            [
                Node(id="A", states=("0", "1"), cpt=((0.5, 0.5),)),
                Node(
                    id="B",
                    states=("0", "1"),
                    parents=("A", "A"),
                    cpt=((0.5, 0.5),) * 4,
                ),
            ],
        )
        assert "ERR_DUPLICATE_PARENT" in validate(net).codes()

    def test_forest_is_singly_connected(self):
        net = Network(
            "forest",
            [
                Node(id="A", states=("0", "1"), cpt=((0.5, 0.5),)),
                Node(id="B", states=("0", "1"), cpt=((0.3, 0.7),)),
            ],
        )
        assert validate(net).ok

    def test_polytree_flag_matches_union_find(self):
        # random DAGs over a topological order, verdict checked against union-find
        for seed in range(120):
            rng = random.Random(seed)
            n = rng.randint(2, 7)
            edges = []
            for child in range(1, n):
                for parent in range(child):
                    if rng.random() < 0.35:
                        edges.append((parent, child))
            rows = lambda k_parents: ((0.5, 0.5),) * (2**k_parents)
            nodes = []
            for i in range(n):
                ps = tuple(f"n{p}" for p, c in edges if c == i)
                nodes.append(Node(id=f"n{i}", states=("0", "1"), parents=ps, cpt=rows(len(ps))))
            report = validate(Network(f"g{seed}", nodes))

            uf = list(range(n))

            def find(x):
                while uf[x] != x:
                    uf[x] = uf[uf[x]]
                    x = uf[x]
                return x

            cyclic = False
            for parent, child in edges:
                a, b = find(parent), find(child)
                if a == b:
                    cyclic = True
                    break
                uf[a] = b
            assert ("ERR_NOT_SINGLY_CONNECTED" in report.codes()) == cyclic, seed


class TestEnsureValidated:
    def test_raises_on_invalid(self):
        with pytest.raises(NotValidatedError):
            ensure_validated(two_node_net(child_row0=(0.5, 0.4)))

    def test_caches_success(self):
        net = two_node_net()
        assert not net.validated
        ensure_validated(net)
        assert net.validated


class TestParseSerialize:
    def test_round_trip_fixture_file(self):
        text = open("fixtures/case_a.json").read()
        net = parse_network(text)
        assert serialize_network(net) == text

    def test_parse_serialize_identity(self):
        net = two_node_net()
        ensure_validated(net)
        again = parse_network(serialize_network(net))
        assert again == net
        assert network_to_dict(again) == network_to_dict(net)

    def test_missing_states_names_node(self):
        doc = '{"id": "x", "nodes": [{"id": "A", "cpt": [[1.0]]}]}'
        with pytest.raises(ParseError, match="A"):
            parse_network(doc)

    def test_unknown_field_rejected(self):
        doc = '{"id": "x", "nodes": [], "extra": 1}'
        with pytest.raises(UnknownFieldError):
            parse_network(doc)
        doc = '{"id": "x", "nodes": [{"id": "A", "states": ["a","b"], "cpt": [[0.5,0.5]], "wat": 0}]}'
        with pytest.raises(UnknownFieldError):
            parse_network(doc)

    def test_dangling_link_is_validation_concern(self):
        doc = (
            '{"id": "x", "nodes": [{"id": "A", "states": ["a","b"], '
            '"parents": ["ghost"], "cpt": [[0.5,0.5],[0.5,0.5]]}]}'
        )
        net = parse_network(doc)  # parse succeeds
        assert "ERR_DANGLING_LINK" in validate(net).codes()

    def test_malformed_json(self):
        with pytest.raises(ParseError):
            parse_network("{nope")

    def test_bool_is_not_a_probability(self):
        doc = '{"id": "x", "nodes": [{"id": "A", "states": ["a","b"], "cpt": [[true, false]]}]}'
        with pytest.raises(ParseError):
            parse_network(doc)

    def test_full_precision_round_trip(self):
        value = 0.5834605503220763
        net = Network("p", [Node(id="A", states=("0", "1"), cpt=((value, 1 - value),))])
        ensure_validated(net)
        again = parse_network(serialize_network(net))
        assert again.node("A").cpt[0][0] == value
