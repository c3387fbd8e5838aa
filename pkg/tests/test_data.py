import json
from fractions import Fraction

import pytest

from ellipse_caustics.billiard import trace_orbit
from ellipse_caustics.cayley import (
    caustic_roots,
    cayley_polynomial,
    degree_report,
    forbidden_values,
)
from ellipse_caustics.conics import ProjPoint, ellipse_point
from ellipse_caustics.data import (
    DataError,
    caustics_to_dict,
    family_from_dict,
    parse_complex,
    parse_point,
    parse_rational,
    polynomial_from_list,
    polynomial_to_list,
    recheck_trace_payload,
    trace_to_dict,
)


@pytest.mark.parametrize(
    ("literal", "expected"),
    [("1.5", Fraction(3, 2)), ("3/4", Fraction(3, 4)), (" 2 ", Fraction(2)), (7, Fraction(7))],
)
def test_parse_rational(literal, expected):
    assert parse_rational(literal) == expected


def test_parse_rational_is_literal_for_long_decimals():
    assert parse_rational("1.4142135623730951") == Fraction(14142135623730951, 10**16)


@pytest.mark.parametrize("literal", ["abc", "1/0", True, 1.5, None])
def test_parse_rational_rejects(literal):
    with pytest.raises(DataError, match="Not a rational"):
        parse_rational(literal)


def test_parse_complex():
    assert parse_complex("0.3-1i") == 0.3 - 1j
    assert parse_complex("-2 + 0.5j") == -2 + 0.5j
    assert parse_complex("4") == 4
    with pytest.raises(DataError):
        parse_complex("")
    with pytest.raises(DataError):
        parse_complex("x")


def test_parse_point():
    assert parse_point("-2,0").same_as(ProjPoint.affine(-2, 0))
    assert parse_point("1,1i,0").same_as(ProjPoint((1, 1j, 0)))
    with pytest.raises(DataError, match="2 or 3"):
        parse_point("1,2,3,4")
    with pytest.raises(DataError, match="Invalid point"):
        parse_point("0,0,0")


def test_polynomial_serialization(family):
    poly = cayley_polynomial(family, 4).Bn
    values = polynomial_to_list(poly)
    assert all(isinstance(value, str) for value in values)
    assert polynomial_from_list(values) == poly


def test_family_from_dict_requires_a_family():
    with pytest.raises(DataError, match="no family"):
        family_from_dict({"n": 3})
    with pytest.raises(DataError, match="Invalid family"):
        family_from_dict({"family": {"a2": "-1", "b2": "1"}})


def test_caustics_payload(family):
    poly = cayley_polynomial(family, 4).Bn
    roots = caustic_roots(family, 4)
    payload = caustics_to_dict(
        family, 4, poly, roots, degree_report(family, 4), forbidden_values(family, 4), True
    )
    assert payload["family"] == {"a2": "4", "b2": "1"}
    assert payload["N"] == 3
    assert [root["exact"] for root in payload["roots"]] == ["-4/3", "-4/5", "4/3"]
    assert [root["kind"] for root in payload["roots"]] == ["hyperbola", "ellipse", "ellipse"]
    assert (payload["degree"], payload["expected_generic"], payload["bound"]) == (3, 3, 4)
    json.dumps(payload)


def test_trace_payload_can_be_rechecked(family):
    root = caustic_roots(family, 3)[0]
    trace = trace_orbit(family, root.lam, ellipse_point(family, 0.3), steps=3)
    payload = json.loads(json.dumps(trace_to_dict(trace)))
    assert payload["n"] == 3
    assert len(payload["vertices"]) == 4
    recheck = recheck_trace_payload(payload)
    assert recheck["closure_residual"] == pytest.approx(trace.closure_residual, abs=1e-12)
    assert max(recheck["tangency"]) <= 1e-9
    assert len(recheck["P_values"]) == len(recheck["reported_P_values"])
    for found, reported in zip(recheck["P_values"], recheck["reported_P_values"]):
        assert abs(found - reported) <= 1e-9


def test_recheck_rejects_short_traces(family):
    with pytest.raises(DataError, match="two vertices"):
        recheck_trace_payload(
            {"family": {"a2": "4", "b2": "1"}, "lambda": {"re": 1, "im": 0}, "vertices": []}
        )


def test_trace_payload_flags_are_plain_json(family):
    trace = trace_orbit(family, Fraction(4, 3), ProjPoint.affine(-2, 0), steps=4)
    payload = trace_to_dict(trace)
    assert all(type(flag) is bool for flag in payload["isotropic_sides"])
    json.dumps(payload)


def test_recheck_rejects_a_zero_vertex(family):
    zero = [[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
    one = [[1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
    payload = {"family": {"a2": "4", "b2": "1"}, "lambda": {"re": 1, "im": 0}, "vertices": [one, zero]}
    with pytest.raises(DataError, match="cannot be rechecked"):
        recheck_trace_payload(payload)


def test_recheck_requires_lambda():
    with pytest.raises(DataError, match="no lambda"):
        recheck_trace_payload({"family": {"a2": "4", "b2": "1"}, "vertices": []})
