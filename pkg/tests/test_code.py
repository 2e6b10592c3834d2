import math
from fractions import Fraction

import pytest

from netecc.code import (
    ConstructionReport,
    NetworkCode,
    construct_deterministic,
    construct_random,
    construct_refined,
    enumerate_patterns,
    format_code,
    global_table,
    parse_code,
    refined_singleton_max_messages,
    required_field_order,
    singleton_max_messages,
)
from netecc.errors import ConstructionError, InfeasibleError, ParseError
from netecc.field import FieldSpec, is_independent, unit, vec_add
from netecc.graph import cached_augment, cached_plan


def test_singleton_examples():
    assert singleton_max_messages(4, 1, 5) == 25
    assert singleton_max_messages(3, 0, 2) == 8
    assert singleton_max_messages(2, 1, 7) == 1
    with pytest.raises(ValueError):
        singleton_max_messages(1, 1, 5)


def test_refined_singleton_examples():
    assert refined_singleton_max_messages(4, 1, 3) == 9
    assert refined_singleton_max_messages(5, 2, 2) == 2
    assert refined_singleton_max_messages(3, 1, 4) == 4


def test_required_field_order_examples(diamond, fig1):
    assert required_field_order(diamond, 1, "deterministic") == 17
    assert required_field_order(fig1, 1, "deterministic") == 421
    assert required_field_order(diamond, 1, "random", delta=Fraction(1, 2)) == 181
    with pytest.raises(ValueError):
        required_field_order(diamond, 1, "random")


def test_enumerate_patterns_examples(threenode, diamond):
    assert enumerate_patterns(threenode, 2) == [(0, 1), (0, 2), (1, 2)]
    assert enumerate_patterns(threenode, 0) == [()]
    assert len(enumerate_patterns(diamond, 2)) == 15
    with pytest.raises(ValueError):
        enumerate_patterns(threenode, 4)


def test_deterministic_diamond(diamond_built, diamond):
    code, report = diamond_built
    assert report.success and not report.failures
    assert report.pattern_count == 15 and report.tracker_count == 15
    for F in enumerate_patterns(diamond, 2):
        plan = cached_plan(diamond, F, 1, "t")
        table = global_table(code, F).vectors
        basis = [table[e] for e in plan.final_edges]
        assert len(basis) == 1 + plan.m
        assert is_independent(basis, 17)


def test_deterministic_fig1_example_entries(fig1_built):
    _, report = fig1_built
    assert report.success
    assert report.m("t1", (0, 6)) == 2
    assert report.m("t2", (0, 6)) == 1
    assert report.n == 4 and report.n_t == {"t1": 4, "t2": 4}


def test_deterministic_infeasible(diamond):
    with pytest.raises(InfeasibleError):
        construct_deterministic(diamond, 2, 1, FieldSpec(17))


def test_tiny_field_exhausts_or_succeeds(diamond):
    # q=2 is far below the sufficient size; the greedy either finds a code or says so
    try:
        _, report = construct_deterministic(diamond, 1, 1, FieldSpec(2))
    except ConstructionError as exc:
        assert "field too small" in str(exc)
    else:
        assert report.success


def test_refined_two_sink(two_sink):
    code, report = construct_refined(two_sink, 2, FieldSpec(required_field_order(two_sink, None, "refined", k=2)))
    assert report.sink_alpha == {"t1": 1, "t2": 0}
    assert report.alpha_max == 1
    assert report.success
    assert report.m("t1", (0, 1)) == 2
    assert report.m("t2", ()) == 0
    assert report.skipped_pairs == math.comb(6, 2)


def test_refined_matches_deterministic_on_single_sink(diamond, diamond_built):
    code, report = construct_refined(diamond, 1, FieldSpec(17))
    det_code, det_report = diamond_built
    assert format_code(code) == format_code(det_code)
    assert report.m_table == det_report.m_table
    assert report.sink_alpha == det_report.sink_alpha


def test_refined_fig1_tolerance(fig1):
    q = required_field_order(fig1, None, "refined", k=2)
    assert q == 421
    _, report = construct_refined(fig1, 2, FieldSpec(q))
    assert report.sink_alpha == {"t1": 1, "t2": 1}
    assert report.success


def test_random_is_reproducible(diamond):
    a, ra = construct_random(diamond, 1, 1, FieldSpec(181), 7)
    b, rb = construct_random(diamond, 1, 1, FieldSpec(181), 7)
    assert format_code(a) == format_code(b)
    assert ra.success == rb.success


def test_random_tiny_field_fails_often(diamond):
    fails = sum(not construct_random(diamond, 1, 1, FieldSpec(2), s)[1].success for s in range(50))
    assert fails > 25


def test_global_table_invariants(diamond_built, diamond):
    code, _ = diamond_built
    empty = global_table(code, ())
    aug = cached_augment(diamond, (), 1)
    assert empty.vectors[aug.source_edges[0]] == unit(0, 1)
    assert all(len(v) == 1 for v in empty.vectors.values())
    for F in enumerate_patterns(diamond, 2):
        aug = cached_augment(diamond, F, 1)
        table = global_table(code, F).vectors
        for j, (_, s) in enumerate(aug.splits):
            assert table[s.out_half] == vec_add(table[s.in_half], unit(1 + j, 3), 17)


def test_construction_keeps_no_privileged_state(fig1_built, fig1):
    code, _ = fig1_built
    reloaded = parse_code(format_code(code), fig1)
    assert reloaded == code
    for F in [(0, 6), (3, 20), (10, 11)]:
        assert global_table(reloaded, F).vectors == global_table(code, F).vectors


def test_zero_coefficients_are_dropped(diamond):
    code = NetworkCode(FieldSpec(5), 1, diamond)
    code.set_coefficients(3, {0: 5})
    assert code.coefficients(3) == {}
    code.set_coefficients(3, {0: 7})
    assert code.coefficients(3) == {0: 2}


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "empty"),
        ("local 3 0:1\n", "header"),
        ("netcode q=6 k=1\n", "bad header"),
        ("netcode q=5 k=1\nlocal 3 9:1\n", "not a valid predecessor"),
        ("netcode q=5 k=1\nlocal 0 0:1\n", "source_local"),
        ("netcode q=5 k=1\nsource_local 0 0:7\n", "residue"),
        ("netcode q=5 k=1\nlocal 3 0:1\nlocal 3 0:1\n", "twice"),
        ("netcode q=5 k=1\nlocal 99 0:1\n", "unknown edge"),
    ],
)
def test_code_parse_errors(diamond, text, message):
    with pytest.raises(ParseError, match=message):
        parse_code(text, diamond)


def test_report_kv_round_trip(diamond_built):
    _, report = diamond_built
    again = ConstructionReport.from_kv(report.to_kv())
    assert again == report
