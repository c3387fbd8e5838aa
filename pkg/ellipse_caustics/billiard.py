"""Complex billiard in the ellipse: reflection law, invariant, orbit tracing and catalogs."""
from __future__ import annotations

import cmath
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

from .algebra import as_cx, solve_binary_quadratic
from .cayley import CayleyError, caustic_roots, quad_caustic_parameters
from .conics import (
    Conic,
    ConfocalFamily,
    ProjLine,
    ProjPoint,
    conic_of,
    foci,
    incidence_residual,
    intersection_candidates,
    is_isotropic,
    isotropic_tangency_points,
    polar_line,
    tangency_residual,
    tangent_candidates,
)
from .const import (
    CLOSURE_TOL,
    NEAR_DEGENERATE_TOL,
    ON_CONIC_TOL,
    SELF_REFLECTION_TOL,
    STEP_TOL,
)

_LOGGER = logging.getLogger(__name__)


class BilliardError(Exception):
    """Billiard construction error."""


class IsotropicDirectionError(BilliardError):
    """Direction with q(v) = 0 where a non-isotropic one is required."""


class IsotropicMirrorError(IsotropicDirectionError):
    """Reflection across an isotropic mirror is not an involution."""


class OffEllipseError(BilliardError):
    """Point is not on the ellipse."""


class ForbiddenValueError(BilliardError):
    """Invariant value that belongs to a focal line."""


class OrbitError(BilliardError):
    """Orbit cannot be traced from the given data."""


class IsotropicDegenerationError(OrbitError):
    """Orbit hits a vertex whose ellipse tangent is isotropic."""


@dataclass(frozen=True)
class Direction:
    """Direction (v_x, v_y), meaningful up to complex scale."""

    vx: complex
    vy: complex

    def __post_init__(self) -> None:
        vx, vy = as_cx(self.vx), as_cx(self.vy)
        if vx == 0 and vy == 0:
            raise BilliardError("A direction cannot be the zero vector")
        object.__setattr__(self, "vx", vx)
        object.__setattr__(self, "vy", vy)

    @classmethod
    def of_line(cls, line: ProjLine) -> Direction:
        return cls(*line.direction())

    @property
    def norm2(self) -> float:
        return abs(self.vx) ** 2 + abs(self.vy) ** 2

    def q(self) -> complex:
        return self.vx * self.vx + self.vy * self.vy

    def bilinear(self, other: Direction) -> complex:
        return self.vx * other.vx + self.vy * other.vy

    def is_isotropic(self, tol: float = STEP_TOL) -> bool:
        return abs(self.q()) <= tol * self.norm2

    def unit(self) -> Direction:
        """Scaled so that q(v) = 1 (principal square root)."""
        if self.is_isotropic():
            raise IsotropicDirectionError(f"{self} is isotropic and has no unit representative")
        root = cmath.sqrt(self.q())
        return Direction(self.vx / root, self.vy / root)

    def parallel_residual(self, other: Direction) -> float:
        """Scale-free |v × u|; 0 when both span the same complex line."""
        cross = self.vx * other.vy - self.vy * other.vx
        return abs(cross) / (self.norm2 * other.norm2) ** 0.5


def reflect_direction(v: Direction, mirror: Direction) -> Direction:
    """v' = 2 b(v, t)/q(t) t - v."""
    if mirror.is_isotropic():
        raise IsotropicMirrorError(f"Mirror {mirror} is isotropic")
    factor = 2 * v.bilinear(mirror) / mirror.q()
    return Direction(factor * mirror.vx - v.vx, factor * mirror.vy - v.vy)


@dataclass(frozen=True)
class IsotropicReflection:
    """Reflected line at an isotropic mirror; indeterminate when the incoming line is the mirror."""

    line: ProjLine
    indeterminate: bool


def reflect_line_isotropic(
    incoming: ProjLine, mirror: ProjLine, point: ProjPoint, tol: float = STEP_TOL
) -> IsotropicReflection:
    """Limit reflection law at an isotropic mirror through a finite point."""
    if not is_isotropic(mirror, tol):
        raise BilliardError(f"{mirror!r} is not isotropic; use reflect_direction")
    if not point.is_finite():
        raise BilliardError("Isotropic reflection needs a finite point")
    for line, name in ((incoming, "incoming line"), (mirror, "mirror")):
        if incidence_residual(point, line) > tol:
            raise BilliardError(f"The {name} does not pass through {point!r}")
    if incoming.same_as(mirror, tol):
        return IsotropicReflection(line=incoming, indeterminate=True)
    return IsotropicReflection(line=mirror, indeterminate=False)


def invariant_at(fam: ConfocalFamily, point: ProjPoint, v: Direction) -> complex:
    x, y = point.to_affine()
    return (x * v.vx / float(fam.a2) + y * v.vy / float(fam.b2)) ** 2 / v.q()


def joachimsthal(
    fam: ConfocalFamily, point: ProjPoint, v: Direction, tol: float = ON_CONIC_TOL
) -> complex:
    """P(M, v) = (x v_x/a² + y v_y/b²)² / q(v) at a finite point of 𝓔."""
    if v.is_isotropic():
        raise IsotropicDirectionError(f"{v} is isotropic; P is undefined")
    if not point.is_finite():
        raise OffEllipseError(f"{point!r} is at infinity")
    if fam.ellipse.equation_residual(point) > tol:
        raise OffEllipseError(f"{point!r} is not on the ellipse")
    return invariant_at(fam, point, v)


def lambda_from_trace(fam: ConfocalFamily, p_value: Any, tol: float = STEP_TOL) -> complex:
    """λ = -a²b² P."""
    p_value = as_cx(p_value)
    for focal in (1 / float(fam.a2), 1 / float(fam.b2)):
        if abs(p_value - focal) <= tol * max(1.0, focal):
            raise ForbiddenValueError(f"P={p_value:.6g} is a focal value; no caustic exists")
    return -float(fam.a2 * fam.b2) * p_value


@dataclass(frozen=True)
class OrbitTrace:
    """Vertices, sides and residuals of a traced billiard polygon."""

    fam: ConfocalFamily
    lam: complex
    vertices: tuple[ProjPoint, ...]
    sides: tuple[ProjLine, ...]
    invariants_P: tuple[complex, ...]
    closure_residual: float
    reflection_residuals: tuple[float, ...]
    tangency_residuals: tuple[float, ...]
    self_reflections: tuple[int, ...] = ()
    infinite_vertices: tuple[int, ...] = ()
    isotropic_sides: tuple[bool, ...] = ()
    branch: int = 0

    @property
    def steps(self) -> int:
        return len(self.sides)

    @property
    def P_value(self) -> complex:
        if not self.invariants_P:
            raise OrbitError("The trace has no finite vertex with a non-isotropic side")
        return sum(self.invariants_P) / len(self.invariants_P)

    @property
    def P_spread(self) -> float:
        return max(
            (abs(p - q) for p, q in itertools.combinations(self.invariants_P, 2)), default=0.0
        )

    @property
    def lambda_residual(self) -> float:
        return abs(self.lam + float(self.fam.a2 * self.fam.b2) * self.P_value)

    def closed(self, tol: float = CLOSURE_TOL) -> bool:
        return self.closure_residual <= tol

    @property
    def max_reflection_residual(self) -> float:
        return max(self.reflection_residuals, default=0.0)

    @property
    def max_tangency_residual(self) -> float:
        return max(self.tangency_residuals, default=0.0)


def _farther(candidates: tuple[Any, Any], reference: Any) -> Any:
    first, second = candidates
    return first if first.distance(reference) >= second.distance(reference) else second


def _second_intersection(fam: ConfocalFamily, line: ProjLine, point: ProjPoint) -> ProjPoint:
    first, second, _ = intersection_candidates(fam.ellipse, line)
    return _farther((first, second), point)


def _mirror_at(fam: ConfocalFamily, vertex: ProjPoint, index: int) -> ProjLine:
    mirror = polar_line(fam.ellipse, vertex)
    if is_isotropic(mirror):
        raise IsotropicDegenerationError(
            f"Vertex {index} {vertex!r} has an isotropic ellipse tangent"
        )
    return mirror


def _reflection_residual(
    fam: ConfocalFamily,
    vertex: ProjPoint,
    incoming: ProjLine,
    outgoing: ProjLine,
    before: ProjPoint,
    after: ProjPoint,
    index: int,
) -> float:
    if not vertex.is_finite():
        # Ellipse tangent at infinity goes through the centre: M_out = -M_in.
        return after.distance(before.negated())
    mirror = Direction.of_line(_mirror_at(fam, vertex, index))
    reflected = reflect_direction(Direction.of_line(incoming), mirror)
    return reflected.parallel_residual(Direction.of_line(outgoing))


def _validate_start(fam: ConfocalFamily, lam: Any, start: ProjPoint) -> None:
    if abs(complex(lam)) <= STEP_TOL:
        raise OrbitError("λ=0 is the ellipse itself; it is no caustic")
    if fam.ellipse.equation_residual(start) > ON_CONIC_TOL:
        raise OffEllipseError(f"Start {start!r} is not on the ellipse")
    _mirror_at(fam, start, 0)


def _propagate(
    fam: ConfocalFamily, lam: Any, start: ProjPoint, first_side: ProjLine, steps: int, branch: int
) -> OrbitTrace:
    if steps < 1:
        raise OrbitError("An orbit needs at least one side")
    caustic = conic_of(fam, lam)
    vertices = [start]
    sides = [first_side]
    self_reflections: list[int] = []
    current, line = start, first_side
    for k in range(1, steps + 1):
        nxt = _second_intersection(fam, line, current)
        if nxt.same_as(current, STEP_TOL):
            raise OrbitError(f"Side {k - 1} is tangent to the ellipse; vertices coincide")
        vertices.append(nxt)
        if k == steps:
            break
        _mirror_at(fam, nxt, k)
        first, second, _ = tangent_candidates(nxt, caustic)
        if max(first.distance(line), second.distance(line)) <= SELF_REFLECTION_TOL:
            self_reflections.append(k)
            _LOGGER.debug("Self-reflection at vertex %d", k)
        else:
            line = _farther((first, second), line)
        sides.append(line)
        current = nxt
    closure = vertices[-1].distance(vertices[0])
    closed = closure <= CLOSURE_TOL

    reflection_residuals = [
        _reflection_residual(
            fam, vertices[k], sides[k - 1], sides[k], vertices[k - 1], vertices[k + 1], k
        )
        for k in range(1, steps)
    ]
    if closed and steps > 1:
        reflection_residuals.insert(
            0,
            _reflection_residual(
                fam, vertices[0], sides[-1], sides[0], vertices[-2], vertices[1], 0
            ),
        )

    invariants: list[complex] = []
    for k, side in enumerate(sides):
        direction = Direction.of_line(side)
        if direction.is_isotropic():
            continue
        for vertex in (vertices[k], vertices[k + 1]):
            if vertex.is_finite():
                invariants.append(invariant_at(fam, vertex, direction))

    trace = OrbitTrace(
        fam=fam,
        lam=complex(lam),
        vertices=tuple(vertices),
        sides=tuple(sides),
        invariants_P=tuple(invariants),
        closure_residual=closure,
        reflection_residuals=tuple(reflection_residuals),
        tangency_residuals=tuple(tangency_residual(side, caustic) for side in sides),
        self_reflections=tuple(self_reflections),
        infinite_vertices=tuple(i for i, v in enumerate(vertices) if not v.is_finite()),
        isotropic_sides=tuple(is_isotropic(side) for side in sides),
        branch=branch,
    )
    _LOGGER.debug(
        "Traced %d sides at λ=%s: closure %.3g, tangency %.3g",
        steps,
        lam,
        closure,
        trace.max_tangency_residual,
    )
    return trace


def trace_orbit(
    fam: ConfocalFamily, lam: Any, start: ProjPoint, branch: int = 0, steps: int = 3
) -> OrbitTrace:
    """Trace `steps` sides tangent to 𝓒_λ from a start point of 𝓔.

    Each side is continued by the other tangent to 𝓒_λ through its far end;
    branch picks the first side among the two sorted tangents from start.
    """
    if branch not in (0, 1):
        raise OrbitError(f"branch must be 0 or 1, got {branch}")
    _validate_start(fam, lam, start)
    caustic = conic_of(fam, lam)
    first, second, ratio = tangent_candidates(start, caustic)
    if ratio <= NEAR_DEGENERATE_TOL:
        raise OrbitError(f"Start {start!r} lies on the caustic; its tangents coincide")
    ordered = sorted((first, second), key=lambda line: line.sort_key())
    return _propagate(fam, lam, start, ordered[branch], steps, branch)


def trace_from_side(
    fam: ConfocalFamily, lam: Any, start: ProjPoint, first_side: ProjLine, steps: int
) -> OrbitTrace:
    """Trace an orbit whose first side is given explicitly."""
    _validate_start(fam, lam, start)
    if incidence_residual(start, first_side) > STEP_TOL:
        raise OrbitError("The first side does not pass through the start point")
    return _propagate(fam, lam, start, first_side, steps, branch=0)


@dataclass(frozen=True)
class SpecialOrbit:
    """One of the explicit 4-periodic orbits starting at S = (-a, 0)."""

    index: int
    lam: Fraction
    direction: Direction
    trace: OrbitTrace

    @property
    def lambda_from_direction(self) -> complex:
        """-b² v_x²/q(v), i.e. -b² v_x² for a unit direction."""
        unit = self.direction.unit()
        return -float(self.trace.fam.b2) * unit.vx**2


@dataclass(frozen=True)
class SpecialQuadCatalog:
    """Special 4-periodic orbits, with notes on the ones that degenerate."""

    orbits: tuple[SpecialOrbit, ...]
    notes: tuple[str, ...] = ()


def special_quad_orbits(fam: ConfocalFamily) -> SpecialQuadCatalog:
    """T₁⁴ with vertices at infinity, the rhombus T₂⁴ and the self-reflecting T₃⁴."""
    try:
        lams = quad_caustic_parameters(fam)
    except CayleyError as err:
        raise BilliardError(str(err)) from err
    a, b = fam.a, fam.b
    a2, b2, c2 = float(fam.a2), float(fam.b2), float(fam.c2)
    start = ProjPoint.affine(-a, 0)
    n_plus = ProjPoint.affine(-a * a2 / c2, 1j * b2 * cmath.sqrt(2 * a2 - b2) / c2)
    first_sides = {
        1: ProjLine.through(start, ProjPoint((a, 1j * b, 0))),
        2: ProjLine.through(start, ProjPoint.affine(0, b)),
        3: ProjLine.through(start, n_plus),
    }
    orbits: list[SpecialOrbit] = []
    notes: list[str] = []
    for index, lam in enumerate(lams, start=1):
        gap = abs(lam + fam.a2) / fam.a2
        if index == 1 and gap <= NEAR_DEGENERATE_TOL:
            notes.append(
                f"T1 skipped: λ₁={float(lam):.12g} is within {float(gap):.3g} (relative) of -a²;"
                " its caustic degenerates when a = √2·b"
            )
            _LOGGER.info("Special orbit T1 degenerates for %s", fam)
            continue
        trace = trace_from_side(fam, lam, start, first_sides[index], 4)
        orbits.append(
            SpecialOrbit(
                index=index,
                lam=lam,
                direction=Direction.of_line(first_sides[index]),
                trace=trace,
            )
        )
    return SpecialQuadCatalog(orbits=tuple(orbits), notes=tuple(notes))


@dataclass(frozen=True)
class DegenerateTriangle:
    """Limit triangle: isotropic side A tangent to 𝓔 at alpha, doubled side B through beta."""

    alpha: ProjPoint
    beta: ProjPoint
    side_A: ProjLine
    side_B: ProjLine
    caustic_index: int
    lam: complex
    ellipse: Conic = field(repr=False, compare=False)
    caustic: Conic = field(repr=False, compare=False)

    def residuals(self) -> dict[str, float]:
        return {
            "alpha_on_A": incidence_residual(self.alpha, self.side_A),
            "A_tangent_ellipse": tangency_residual(self.side_A, self.ellipse),
            "B_through_alpha": incidence_residual(self.alpha, self.side_B),
            "B_through_beta": incidence_residual(self.beta, self.side_B),
            "B_tangent_caustic": tangency_residual(self.side_B, self.caustic),
            "beta_on_ellipse": self.ellipse.equation_residual(self.beta),
        }

    def valid(self, tol: float = STEP_TOL) -> bool:
        if not is_isotropic(self.side_A) or is_isotropic(self.side_B):
            return False
        return max(self.residuals().values()) <= tol


def _isotropy(line: ProjLine) -> float:
    w1, w2, _ = line.coords
    return min(abs(w1 + 1j * w2), abs(w1 - 1j * w2))


def degenerate_triangles(fam: ConfocalFamily) -> list[DegenerateTriangle]:
    """The eight degenerate triangular orbits (4 isotropic tangency points x 2 caustics)."""
    lams = [root.lam for root in caustic_roots(fam, 3) if root.admissible]
    triangles: list[DegenerateTriangle] = []
    for alpha in isotropic_tangency_points(fam):
        side_a = polar_line(fam.ellipse, alpha)
        for index, lam in enumerate(lams, start=1):
            caustic = conic_of(fam, lam)
            first, second, _ = tangent_candidates(alpha, caustic)
            side_b = max((first, second), key=_isotropy)
            beta = _second_intersection(fam, side_b, alpha)
            triangles.append(
                DegenerateTriangle(
                    alpha=alpha,
                    beta=beta,
                    side_A=side_a,
                    side_B=side_b,
                    caustic_index=index,
                    lam=lam,
                    ellipse=fam.ellipse,
                    caustic=caustic,
                )
            )
    return triangles


@dataclass(frozen=True)
class FocalCheck:
    """Incidence residuals of focal reflections for the real and the complex foci pair."""

    real: float
    complex: float

    def passes(self, tol: float = STEP_TOL) -> bool:
        return self.real <= tol and self.complex <= tol


def _reflected_through(
    fam: ConfocalFamily, point: ProjPoint, source: ProjPoint, target: ProjPoint
) -> float:
    mirror = Direction.of_line(polar_line(fam.ellipse, point))
    incoming = Direction.of_line(ProjLine.through(point, source))
    reflected = reflect_direction(incoming, mirror)
    outgoing = ProjLine.from_point_direction(point, reflected.vx, reflected.vy)
    return incidence_residual(target, outgoing)


def focal_reflection_check(fam: ConfocalFamily, point: ProjPoint) -> FocalCheck:
    """Reflect M->F₁ (resp. M->G₁) at M and measure incidence with F₂ (resp. G₂)."""
    if not point.is_finite() or fam.ellipse.equation_residual(point) > ON_CONIC_TOL:
        raise OffEllipseError(f"{point!r} is not a finite point of the ellipse")
    if is_isotropic(polar_line(fam.ellipse, point)):
        raise IsotropicMirrorError(f"The ellipse tangent at {point!r} is isotropic")
    f1, f2, g1, g2 = foci(fam)
    return FocalCheck(
        real=_reflected_through(fam, point, f1, f2),
        complex=_reflected_through(fam, point, g1, g2),
    )


def directions_with_invariant(
    fam: ConfocalFamily, point: ProjPoint, p_value: Any, tol: float = NEAR_DEGENERATE_TOL
) -> list[tuple[Direction, int]]:
    """Directions v at a finite point of 𝓔 with P(M, v) = p_value; doubled at a self-reflection."""
    x, y = point.to_affine()
    alpha, beta = x / float(fam.a2), y / float(fam.b2)
    p_value = as_cx(p_value)
    (s1, t1), (s2, t2), ratio = solve_binary_quadratic(
        alpha * alpha - p_value, 2 * alpha * beta, beta * beta - p_value
    )
    if ratio <= tol:
        return [(Direction(s1, t1), 2)]
    return [(Direction(s1, t1), 1), (Direction(s2, t2), 1)]


def focal_chord_map(fam: ConfocalFamily, point: ProjPoint, pair: str = "real") -> ProjPoint:
    """M -> second point of the chord through F₁, then of the chord through F₂."""
    f1, f2, g1, g2 = foci(fam)
    pairs = {"real": (f1, f2), "complex": (g1, g2)}
    if pair not in pairs:
        raise BilliardError(f"pair must be real or complex, got {pair!r}")
    first, second = pairs[pair]
    middle = _second_intersection(fam, ProjLine.through(point, first), point)
    return _second_intersection(fam, ProjLine.through(middle, second), middle)
