import logging
import math
from fractions import Fraction

import pytest
import sympy as sp

from ellipse_caustics.algebra import PolyQ
from ellipse_caustics.cayley import (
    KIND_COMPLEX,
    KIND_ELLIPSE,
    KIND_HYPERBOLA,
    CayleyError,
    caustic_roots,
    cayley_B,
    cayley_B_series,
    cayley_polynomial,
    classify_caustic,
    closed_form_B3,
    closed_form_B4,
    degree_report,
    forbidden_values,
    leading_hankel,
    quad_caustic_parameters,
)
from ellipse_caustics.conics import ConfocalFamily

LAM = PolyQ.monomial()


def _sympy_cayley(a2: int, b2: int, n: int) -> list[Fraction]:
    """Independent 𝓑ⁿ coefficients (ascending) from a symbolic series expansion."""
    lam, t = sp.symbols("lam t")
    x, y = 1 + lam / a2, 1 + lam / b2
    size, offset = ((n - 1) // 2, 0) if n % 2 else (n // 2 - 1, 1)
    order = 2 * size + offset + 1
    expansion = sp.series(sp.sqrt((1 + x * t) * (1 + y * t) * (1 + t)), t, 0, order).removeO()
    B = [sp.expand(expansion.coeff(t, k)) for k in range(order)]
    matrix = sp.Matrix(size, size, lambda i, j: B[i + j + 2 + offset])
    poly = sp.Poly(sp.expand(matrix.det()), lam)
    return [Fraction(int(c.p), int(c.q)) for c in reversed(poly.all_coeffs())]


def test_B3_at_the_reference_family(family):
    assert cayley_B(family, 3) == PolyQ((-64, -80, 36, 45)) * Fraction(1, 1024)
    assert cayley_B(family, 0) == PolyQ.constant(1)


def test_B_k_agrees_with_the_series_construction(family):
    series = cayley_B_series(family, 8)
    assert [cayley_B(family, k) for k in range(9)] == series


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_cayley_polynomial_matches_sympy(family, n):
    assert list(cayley_polynomial(family, n).Bn.coeffs) == _sympy_cayley(4, 1, n)


def test_cayley_polynomial_matches_closed_forms():
    for a2, b2 in [(4, 1), (Fraction(7, 3), Fraction(1, 2)), (5, 9)]:
        fam = ConfocalFamily(Fraction(a2), Fraction(b2))
        assert cayley_polynomial(fam, 3).Bn == closed_form_B3(fam)
        assert cayley_polynomial(fam, 4).Bn.monic() == closed_form_B4(fam).monic()


def test_cayley_polynomial_needs_n_at_least_three(family):
    with pytest.raises(CayleyError, match="n >= 3"):
        cayley_polynomial(family, 2)


def test_triangle_caustics(family):
    roots = caustic_roots(family, 3)
    expected = [(20 - 8 * math.sqrt(13)) / 9, (20 + 8 * math.sqrt(13)) / 9]
    assert [round(r.lam.real, 4) for r in roots] == [-0.9827, 5.4272]
    assert all(abs(r.lam - e) <= 1e-10 for r, e in zip(roots, expected))
    assert all(r.admissible and r.multiplicity == 1 for r in roots)
    assert [r.kind for r in roots] == [KIND_ELLIPSE, KIND_ELLIPSE]
    assert all(r.exact is None for r in roots)


def test_quad_caustics_are_rational(family):
    roots = caustic_roots(family, 4)
    assert [r.exact for r in roots] == [Fraction(-4, 3), Fraction(-4, 5), Fraction(4, 3)]
    assert [r.kind for r in roots] == [KIND_HYPERBOLA, KIND_ELLIPSE, KIND_ELLIPSE]
    assert quad_caustic_parameters(family) == (Fraction(-4, 3), Fraction(-4, 5), Fraction(4, 3))


def test_forbidden_root_is_not_admissible(critical_family):
    roots = caustic_roots(critical_family, 4)
    assert [r.exact for r in roots] == [Fraction(-2), Fraction(-2, 3), Fraction(2)]
    assert [r.admissible for r in roots] == [False, True, True]
    assert not forbidden_values(critical_family, 4).both_nonzero


def test_forbidden_values(family):
    values = forbidden_values(family, 3)
    assert values.at_minus_a2 == -2
    assert values.both_nonzero


@pytest.mark.parametrize(
    ("n", "degree", "bound"), [(3, 2, 2), (4, 3, 4), (5, 6, 6), (6, 8, 9), (7, 12, 12)]
)
def test_generic_degree(family, n, degree, bound):
    report = degree_report(family, n)
    assert (report.degree, report.expected_generic, report.bound) == (degree, degree, bound)
    assert report.generic and report.within_bound
    assert report.leading == leading_hankel(family, n)


@pytest.mark.parametrize(("n", "degree"), [(3, 1), (4, 1), (5, 2), (6, 2), (7, 3)])
def test_circle_degree(circle, n, degree):
    report = degree_report(circle, n)
    assert report.circle
    assert report.degree == report.circle_expected == degree


def test_classify_caustic(family):
    assert classify_caustic(family, Fraction(4, 3)) == KIND_ELLIPSE
    assert classify_caustic(family, Fraction(-4, 3)) == KIND_HYPERBOLA
    assert classify_caustic(family, -5) == KIND_COMPLEX
    assert classify_caustic(family, 1j) == KIND_COMPLEX


def test_quad_parameters_need_foci(circle):
    with pytest.raises(CayleyError, match="non-circular"):
        quad_caustic_parameters(circle)


def test_quad_chain_for_random_families():
    for a2, b2 in [(9, 1), (3, 2), (Fraction(11, 4), Fraction(5, 3))]:
        fam = ConfocalFamily(Fraction(a2), Fraction(b2))
        lam1, lam2, lam3 = quad_caustic_parameters(fam)
        assert lam1 < -fam.b2 < lam2 < 0 < lam3
        assert all(cayley_polynomial(fam, 4).Bn(lam) == 0 for lam in (lam1, lam2, lam3))


def test_high_order_roots_match_the_exact_multiplicities(family, caplog):
    with caplog.at_level(logging.WARNING, logger="ellipse_caustics.cayley"):
        roots = caustic_roots(family, 8)
    assert sum(root.multiplicity for root in roots) == degree_report(family, 8).degree
    assert "disagree" not in caplog.text
