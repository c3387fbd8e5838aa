import math
from fractions import Fraction

import numpy as np
import pytest

from ellipse_caustics.billiard import (
    BilliardError,
    Direction,
    ForbiddenValueError,
    IsotropicDegenerationError,
    IsotropicDirectionError,
    IsotropicMirrorError,
    OffEllipseError,
    OrbitError,
    degenerate_triangles,
    directions_with_invariant,
    focal_chord_map,
    focal_reflection_check,
    joachimsthal,
    lambda_from_trace,
    reflect_direction,
    reflect_line_isotropic,
    special_quad_orbits,
    trace_from_side,
    trace_orbit,
)
from ellipse_caustics.cayley import caustic_roots
from ellipse_caustics.conics import (
    CYCLIC_I,
    ConfocalFamily,
    ProjLine,
    ProjPoint,
    ellipse_point,
    foci,
    isotropic_tangency_points,
)


def test_reflection_across_a_diagonal_mirror():
    reflected = reflect_direction(Direction(1, 0), Direction(1, 1))
    assert reflected.parallel_residual(Direction(0, 1)) < 1e-15


def test_reflection_preserves_q():
    v, mirror = Direction(1 + 2j, 0.5), Direction(2, -1j)
    assert abs(reflect_direction(v, mirror).q() - v.q()) < 1e-12


def test_isotropic_mirror_is_refused():
    with pytest.raises(IsotropicMirrorError):
        reflect_direction(Direction(1, 0), Direction(1, 1j))


def test_zero_direction_is_refused():
    with pytest.raises(BilliardError, match="zero vector"):
        Direction(0, 0)


def test_isotropic_direction_has_no_unit():
    with pytest.raises(IsotropicDirectionError):
        Direction(1, -1j).unit()
    assert Direction(3, 4).unit().q() == pytest.approx(1)


def test_isotropic_limit_reflection():
    point = ProjPoint.affine(1, 2)
    mirror = ProjLine.through(point, CYCLIC_I)
    other = ProjLine.through(point, ProjPoint.affine(0, 0))
    assert reflect_line_isotropic(mirror, mirror, point).indeterminate
    result = reflect_line_isotropic(other, mirror, point)
    assert not result.indeterminate
    assert result.line.same_as(mirror)
    with pytest.raises(BilliardError, match="not isotropic"):
        reflect_line_isotropic(mirror, other, point)


def test_joachimsthal_invariant(family):
    value = joachimsthal(family, ProjPoint.affine(2, 0), Direction(1, 1))
    assert value == pytest.approx(1 / 8)
    assert lambda_from_trace(family, value) == pytest.approx(-0.5)


def test_joachimsthal_rejects_bad_input(family):
    with pytest.raises(OffEllipseError):
        joachimsthal(family, ProjPoint.affine(1, 1), Direction(1, 0))
    with pytest.raises(IsotropicDirectionError):
        joachimsthal(family, ProjPoint.affine(2, 0), Direction(1, 1j))


def test_focal_values_are_forbidden(family):
    with pytest.raises(ForbiddenValueError):
        lambda_from_trace(family, 0.25)
    with pytest.raises(ForbiddenValueError):
        lambda_from_trace(family, 1.0)


def test_invariant_on_focal_lines(family):
    f1, _, g1, _ = foci(family)
    point = ellipse_point(family, 0.9 + 0.2j)
    to_real = Direction.of_line(ProjLine.through(point, f1))
    to_complex = Direction.of_line(ProjLine.through(point, g1))
    assert abs(joachimsthal(family, point, to_real) - 0.25) < 1e-10
    assert abs(joachimsthal(family, point, to_complex) - 1.0) < 1e-10


@pytest.mark.parametrize("theta", [0.3, 2.0, 1.1 + 0.4j])
def test_triangle_orbits_close(family, theta):
    start = ellipse_point(family, theta)
    for root in caustic_roots(family, 3):
        trace = trace_orbit(family, root.lam, start, branch=0, steps=3)
        assert trace.closed()
        assert trace.closure_residual <= 1e-7
        assert trace.max_tangency_residual <= 1e-9
        assert trace.P_spread <= 1e-9
        assert trace.lambda_residual <= 1e-8
        assert not any(trace.isotropic_sides)


def test_both_branches_close(family):
    start = ellipse_point(family, 0.7)
    lam = caustic_roots(family, 4)[2].lam
    for branch in (0, 1):
        assert trace_orbit(family, lam, start, branch=branch, steps=4).closed()


def test_non_root_does_not_close(family):
    trace = trace_orbit(family, 10, ProjPoint.affine(-2, 0), steps=3)
    assert trace.closure_residual >= 1e-3
    assert not trace.closed()


def test_trace_rejects_bad_input(family):
    with pytest.raises(OffEllipseError):
        trace_orbit(family, 1, ProjPoint.affine(0, 0))
    with pytest.raises(OrbitError, match="branch"):
        trace_orbit(family, 1, ProjPoint.affine(2, 0), branch=2)
    with pytest.raises(OrbitError, match="ellipse itself"):
        trace_orbit(family, 0, ProjPoint.affine(2, 0))


def test_trace_from_side_needs_incidence(family):
    with pytest.raises(OrbitError, match="does not pass"):
        trace_from_side(family, 1, ProjPoint.affine(2, 0), ProjLine((0, 1, 0.5)), 3)


def test_rhombus(family):
    start = ProjPoint.affine(-2, 0)
    side = ProjLine.through(start, ProjPoint.affine(0, 1))
    trace = trace_from_side(family, Fraction(-4, 5), start, side, 4)
    expected = [(-2, 0), (0, 1), (2, 0), (0, -1), (-2, 0)]
    assert all(
        v.same_as(ProjPoint.affine(*xy), 1e-10) for v, xy in zip(trace.vertices, expected)
    )
    assert trace.closed()


def test_special_quad_orbits(family):
    catalog = special_quad_orbits(family)
    assert [orbit.index for orbit in catalog.orbits] == [1, 2, 3]
    assert not catalog.notes
    lams = [orbit.lambda_from_direction for orbit in catalog.orbits]
    assert [round(lam.real, 10) for lam in lams] == [round(-4 / 3, 10), -0.8, round(4 / 3, 10)]
    assert all(orbit.trace.closed() for orbit in catalog.orbits)
    t1 = catalog.orbits[0].trace
    assert t1.infinite_vertices
    t3 = catalog.orbits[2].trace
    n_plus, n_minus = (
        ProjPoint.affine(-8 / 3, sign * 1j * math.sqrt(7) / 3) for sign in (1, -1)
    )
    first, second = t3.vertices[1], t3.vertices[3]
    assert min(
        max(first.distance(n_plus), second.distance(n_minus)),
        max(first.distance(n_minus), second.distance(n_plus)),
    ) <= 1e-10


def test_near_critical_family_reports_degeneration():
    near = ConfocalFamily(Fraction(665857, 470832) ** 2, Fraction(1))
    catalog = special_quad_orbits(near)
    assert catalog.notes
    assert [orbit.index for orbit in catalog.orbits] == [2, 3]


def test_special_quads_need_foci(circle):
    with pytest.raises(BilliardError):
        special_quad_orbits(circle)


def test_eight_degenerate_triangles(family):
    triangles = degenerate_triangles(family)
    assert len(triangles) == 8
    assert all(triangle.valid() for triangle in triangles)
    assert sorted({t.caustic_index for t in triangles}) == [1, 2]


@pytest.mark.parametrize("theta", [0.4, 2.5, 1.3 - 0.3j])
def test_focal_reflection(family, theta):
    assert focal_reflection_check(family, ellipse_point(family, theta)).passes(1e-10)


def test_focal_reflection_needs_a_point_of_the_ellipse(family):
    with pytest.raises(OffEllipseError):
        focal_reflection_check(family, ProjPoint.affine(0, 0))


def test_directions_with_invariant(family):
    point = ellipse_point(family, 0.6)
    known = Direction(1, 0.3)
    found = directions_with_invariant(family, point, joachimsthal(family, point, known))
    assert len(found) == 2
    assert min(d.parallel_residual(known) for d, _ in found) < 1e-9


def test_focal_chord_map_fixes_the_vertices(family):
    vertex = ProjPoint.affine(2, 0)
    assert focal_chord_map(family, vertex).same_as(vertex, 1e-9)
    with pytest.raises(BilliardError, match="real or complex"):
        focal_chord_map(family, vertex, "dual")


@pytest.mark.parametrize("seed", range(5))
def test_reflection_is_an_involution(seed):
    rng = np.random.default_rng(seed)
    vx, vy, tx, ty = rng.normal(size=4) + 1j * rng.normal(size=4)
    v, mirror = Direction(vx, vy), Direction(tx, ty)
    twice = reflect_direction(reflect_direction(v, mirror), mirror)
    assert abs(twice.vx - v.vx) < 1e-9 and abs(twice.vy - v.vy) < 1e-9


@pytest.mark.parametrize("theta", [0.3, 1.1 + 0.4j])
def test_closed_orbits_obey_the_reflection_law(family, theta):
    for root in caustic_roots(family, 4):
        trace = trace_orbit(family, root.lam, ellipse_point(family, theta), steps=4)
        assert len(trace.reflection_residuals) == 4
        assert trace.max_reflection_residual <= 1e-9


@pytest.mark.parametrize("branch", [0, 1])
def test_start_with_an_isotropic_tangent_degenerates(family, branch):
    start = isotropic_tangency_points(family)[0]
    with pytest.raises(IsotropicDegenerationError, match="Vertex 0"):
        trace_orbit(family, 1, start, branch=branch)
