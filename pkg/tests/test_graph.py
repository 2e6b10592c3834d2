import itertools
import random

import networkx as nx
import pytest

from conftest import data_path
from netecc.errors import InsufficientCapacity, ParseError
from netecc.graph import (
    augment,
    build_flow_plan,
    edge_disjoint_paths,
    format_network,
    imaginary_paths,
    min_cut,
    parse_network,
    path_nodes,
    strip,
    topological_order,
)

FIG1_TEXT = open(data_path("fig1.net")).read()
FIXTURES = ["fig1.net", "diamond.net", "threenode.net", "p2p4.net"]


def test_fig1_parses(fig1):
    assert len(fig1.edges) == 21
    assert fig1.sinks == ("t1", "t2")
    assert fig1.source == "s"


@pytest.mark.parametrize(
    "text, message",
    [
        (FIG1_TEXT + "edge 21 t1 s\n", "enters the source"),
        (FIG1_TEXT.replace("sink t1\n", "").replace("sink t2\n", ""), "missing sink"),
        (FIG1_TEXT + "edge 3 s 1\n", "duplicate edge id"),
        (FIG1_TEXT + "edge 30 s nowhere\n", "unknown node"),
        ("node s\nnode t\nsource s\nsink t\n", "unreachable"),
        ("node s\nnode t\nsink t\nedge 0 s t\n", "missing source"),
        ("node s\nsource s\nsink s\n", "source cannot also be a sink"),
        ("node s\nnode t\nsource s\nsink t\nedge x s t\n", "integer"),
        ("node s\nnode t\nsource s\nsink t\nlink 0 s t\n", "unknown keyword"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(ParseError, match=message):
        parse_network(text)


def test_cycle_error_carries_line_number():
    text = FIG1_TEXT + "edge 21 t1 5\nedge 22 5 1\nedge 23 1 t1\n"
    with pytest.raises(ParseError, match="cycle") as info:
        parse_network(text)
    assert info.value.line is not None
    assert f"line {info.value.line}" in str(info.value)


def test_parse_error_line_number():
    with pytest.raises(ParseError) as info:
        parse_network("node s\nnode t\nsource s\nsink t\nedge 0 s q\n")
    assert info.value.line == 5


def test_format_round_trip(fig1):
    assert parse_network(format_network(fig1)) == fig1


def _assert_topological(net, order):
    assert sorted(order) == sorted(net.nodes)
    pos = {v: i for i, v in enumerate(order)}
    assert all(pos[e.tail] < pos[e.head] for e in net.edges)


@pytest.mark.parametrize("name", FIXTURES)
def test_topological_order(name):
    from conftest import fixture_network

    net = fixture_network(name)
    _assert_topological(net, topological_order(net))


def test_topological_examples(fig1, diamond):
    single = parse_network("node s\nnode t\nsource s\nsink t\nedge 0 s t\n")
    assert topological_order(single) == ["s", "t"]
    order = topological_order(diamond)
    assert order[0] == "s" and order[-1] == "t"
    order = topological_order(fig1)
    pos = {v: i for i, v in enumerate(order)}
    assert max(pos[v] for v in "1234") < min(pos[v] for v in ("5", "6", "7"))


def test_min_cut_examples(fig1, diamond):
    assert min_cut(fig1, "s", "t1") == 4
    assert min_cut(fig1, "s", "t2") == 4
    assert min_cut(diamond, "s", "t") == 3
    assert fig1.min_cut_to_sinks() == {"t1": 4, "t2": 4}
    assert min_cut(diamond, "t", "s") == 0


def _nx(net):
    g = nx.DiGraph()
    for e in net.edges:
        # parallel edges become a relay node so the oracle stays a simple digraph
        mid = ("e", e.id)
        g.add_edge(e.tail, mid, capacity=1)
        g.add_edge(mid, e.head, capacity=1)
    return g


@pytest.mark.parametrize("name", FIXTURES)
def test_min_cut_matches_networkx(name):
    from conftest import fixture_network

    net = fixture_network(name)
    g = _nx(net)
    for t in net.sinks:
        assert min_cut(net, net.source, t) == nx.maximum_flow_value(g, net.source, t)


def _disjoint(paths):
    flat = [e for p in paths for e in p]
    return len(flat) == len(set(flat))


def _is_path(net, path, frm, to):
    nodes = path_nodes(net, path)
    return nodes[0] == frm and nodes[-1] == to


def test_edge_disjoint_paths_examples(fig1, diamond):
    paths = edge_disjoint_paths(diamond, "s", "t", 3)
    assert sorted(path_nodes(diamond, p)[1] for p in paths) == ["a", "b", "c"]
    blocked = {1, 8, 13, 19}  # s,2,6,9,t2
    paths = edge_disjoint_paths(fig1, "s", "t2", 2, blocked)
    assert len(paths) == 2 and _disjoint(paths)
    assert all(_is_path(fig1, p, "s", "t2") and not set(p) & blocked for p in paths)
    with pytest.raises(InsufficientCapacity):
        edge_disjoint_paths(diamond, "s", "t", 4)


def test_augment_example(fig1):
    aug = augment(fig1, [0, 6], 2)
    assert aug.source_edges == (21, 22)
    assert aug.imaginary_source in aug.nodes
    assert len(aug.splits) == 2
    assert len(aug.edges) == 21 + 2 + 2 * 2
    for eid, s in aug.splits:
        by_id = {e.id: e for e in aug.edges}
        assert by_id[s.in_half].tail == fig1.edge(eid).tail
        assert by_id[s.out_half].head == fig1.edge(eid).head
        assert by_id[s.imaginary].tail == aug.imaginary_source
        assert eid not in by_id


def test_augment_empty_and_single(fig1):
    aug = augment(fig1, [], 2)
    assert len(aug.edges) == 23 and len(aug.nodes) == len(fig1.nodes) + 1
    one = parse_network("node s\nnode t\nsource s\nsink t\nedge 0 s t\n")
    aug = augment(one, [0], 1)
    assert len(aug.source_edges) == 1 and len(aug.splits) == 1
    assert len(aug.edges) == 4 and len(aug.nodes) == 4


@pytest.mark.parametrize("name", FIXTURES)
def test_strip_round_trip(name):
    from conftest import fixture_network

    net = fixture_network(name)
    for size in range(min(3, len(net.edges)) + 1):
        for F in list(itertools.combinations(net.edge_ids, size))[:20]:
            assert strip(augment(net, F, 1)) == net


def test_example_flow_plan(fig1):
    aug = augment(fig1, [0, 6], 2)
    a, b = (s.imaginary for _, s in aug.splits)
    p1 = build_flow_plan(aug, "t1")
    assert p1.m == 2
    nodes = sorted(path_nodes(aug, p)[1:] for p in p1.imaginary_paths)
    assert nodes == [["~v0", "1", "t1"], ["~v6", "5", "8", "t1"]]
    p2 = build_flow_plan(aug, "t2")
    assert p2.m == 1
    assert len(p1.message_paths) == 2 and len(p2.message_paths) == 2


def test_example_message_paths_are_valid(fig1):
    """Tie-breaking picks one valid message-path pair; (s,3,6,9,t1),(s,4,7,10,t1) is another."""
    aug = augment(fig1, [0, 6], 2)
    plan = build_flow_plan(aug, "t1")
    assert _disjoint(plan.paths)
    for p in plan.message_paths:
        assert p[0] in aug.source_edges
        assert path_nodes(aug, p)[-1] == "t1"
    # (s,3,6,9,t1) and (s,4,7,10,t1) also avoid the imaginary paths
    alt = [(2, 9, 13, 16), (3, 11, 14, 17)]
    used = {e for p in plan.imaginary_paths for e in p}
    assert _disjoint(alt) and not used & {e for p in alt for e in p}


def _oracle_m(aug, sink):
    g = nx.DiGraph()
    src = "__src"
    for e in aug.edges:
        if e.id in aug.source_edges:
            continue
        mid = ("e", e.id)
        g.add_edge(e.tail, mid, capacity=1)
        g.add_edge(mid, e.head, capacity=1)
    g.add_edge(src, aug.imaginary_source, capacity=len(aug.pattern))
    return nx.maximum_flow_value(g, src, sink) if g.has_node(sink) else 0


@pytest.mark.parametrize("name", FIXTURES)
def test_plans_match_max_flow_oracle(name):
    from conftest import fixture_network

    net = fixture_network(name)
    n = net.n
    rnd = random.Random(name)
    for k in range(1, n + 1):
        for size in range(0, n - k + 1):
            pats = list(itertools.combinations(net.edge_ids, size))
            for F in rnd.sample(pats, min(len(pats), 25)):
                aug = augment(net, F, k)
                for t in net.sinks:
                    plan = build_flow_plan(aug, t)
                    assert plan.m == _oracle_m(aug, t) == len(imaginary_paths(aug, t))
                    assert len(plan.message_paths) == k
                    assert _disjoint(plan.paths)
                    assert all(path_nodes(aug, p)[-1] == t for p in plan.paths)
                    assert all(p[0] in aug.imaginary_edges for p in plan.imaginary_paths)
