import pytest

from netecc.code import NetworkCode, format_code, parse_code
from netecc.field import FieldSpec
from netecc.verify import verify_code


def test_constructed_code_passes(diamond_built):
    code, _ = diamond_built
    report = verify_code(code, 1)
    assert report.passed and len(report.checks) == 15
    assert all(c.decodable for c in report.checks)


def test_all_zero_code_fails_everywhere(diamond):
    code = NetworkCode(FieldSpec(17), 1, diamond)
    report = verify_code(code, 1)
    assert len(report.failures) == len(report.checks) == 15
    assert all(c.dim_v2 == 0 for c in report.checks)


def test_sum_code_failure_vs_error_verdicts(sum_code):
    for edge in (0, 1):
        assert verify_code(sum_code, patterns=[[edge]], failures=True).passed
    report = verify_code(sum_code, 1)
    assert not report.passed
    assert not any(c.decodable for c in report.checks)


def test_sum_code_erasure_on_one_relay_edge_is_not_decodable(sum_code):
    # the sink sees 2x + e, so a single known-location error still hides x
    report = verify_code(sum_code, patterns=[[0]])
    assert not report.checks[0].decodable


def test_refined_tolerance(two_sink):
    from netecc.code import construct_refined

    code, _ = construct_refined(two_sink, 2, FieldSpec(17))
    report = verify_code(code, pattern_sizes={"t1": 2, "t2": 0})
    assert report.passed
    assert {c.sink for c in report.checks} == {"t1", "t2"}


def test_exactly_one_tolerance(diamond_built):
    code, _ = diamond_built
    with pytest.raises(ValueError):
        verify_code(code)
    with pytest.raises(ValueError):
        verify_code(code, 1, patterns=[[0]])
    with pytest.raises(ValueError):
        verify_code(code, 1, failures=True)


def test_serialized_code_gives_same_verdict(fig1_built, fig1):
    code, _ = fig1_built
    a = verify_code(code, 1)
    b = verify_code(parse_code(format_code(code), fig1), 1)
    assert a.passed and b.passed
    assert a.to_kv() == b.to_kv()
