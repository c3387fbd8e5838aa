"""Complex projective geometry of a confocal family of conics."""
from __future__ import annotations

import cmath
import itertools
import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .algebra import AlgebraError, as_cx, as_rational, solve_binary_quadratic
from .const import (
    CONSTRUCTION_TOL,
    FORBIDDEN_LAMBDA_TOL,
    INFINITY_TOL,
    NEAR_DEGENERATE_TOL,
    ON_CONIC_TOL,
    STEP_TOL,
)

_LOGGER = logging.getLogger(__name__)

# Two coordinates count as tied for the largest modulus within this ratio.
_PIVOT_SLACK = 1e-9
_SORT_DIGITS = 9


class ConicError(Exception):
    """Conic geometry error."""


class DegenerateFamilyError(ConicError):
    """λ hits a forbidden value of the confocal family."""


class NoFociError(ConicError):
    """The ellipse is a circle and has no foci structure."""


class IsotropicLineError(ConicError):
    """Operation undefined on an isotropic line."""


class FocalLineError(ConicError):
    """Line through a focus; it is tangent to no conic of the family."""


class IncidenceError(ConicError):
    """A point is not where the construction requires it to be."""


def _pivot_index(coords: np.ndarray) -> int:
    moduli = np.abs(coords)
    top = float(moduli.max())
    return int(np.argmax(moduli >= top * (1.0 - _PIVOT_SLACK)))


def _normalized(coords: Sequence[Any]) -> np.ndarray:
    array = np.array([as_cx(c) for c in coords], dtype=complex)
    if array.shape != (3,):
        raise ConicError("Homogeneous coordinates need exactly three entries")
    if float(np.abs(array).max()) == 0.0:
        raise ConicError("Homogeneous coordinates cannot all vanish")
    return array / array[_pivot_index(array)]


@dataclass(frozen=True, eq=False)
class _Homogeneous:
    """Complex homogeneous triple, scaled so its largest coordinate is 1."""

    coords: np.ndarray

    def __post_init__(self) -> None:
        normalized = _normalized(self.coords)
        normalized.setflags(write=False)
        object.__setattr__(self, "coords", normalized)

    def __iter__(self):
        return iter(self.coords)

    def distance(self, other: _Homogeneous) -> float:
        """Fubini-Study sine distance: 0 for the same projective object, at most 1."""
        inner = np.vdot(self.coords, other.coords)
        norms = np.vdot(self.coords, self.coords).real * np.vdot(other.coords, other.coords).real
        return math.sqrt(max(0.0, 1.0 - abs(inner) ** 2 / norms))

    def same_as(self, other: _Homogeneous, tol: float = STEP_TOL) -> bool:
        return self.distance(other) <= tol

    def sort_key(self) -> tuple[float, ...]:
        return tuple(
            itertools.chain.from_iterable(
                (round(c.real, _SORT_DIGITS) + 0.0, round(c.imag, _SORT_DIGITS) + 0.0)
                for c in self.coords
            )
        )

    def __repr__(self) -> str:
        body = ", ".join(f"{c.real:.6g}{c.imag:+.6g}j" for c in self.coords)
        return f"{type(self).__name__}({body})"


@dataclass(frozen=True, eq=False, repr=False)
class ProjPoint(_Homogeneous):
    """Point (x:y:z) of the complex projective plane."""

    @classmethod
    def affine(cls, x: Any, y: Any) -> ProjPoint:
        return cls((x, y, 1))

    def is_finite(self, tol: float = INFINITY_TOL) -> bool:
        return abs(self.coords[2]) > tol

    def to_affine(self) -> tuple[complex, complex]:
        if not self.is_finite():
            raise ConicError(f"{self!r} lies on the line at infinity")
        x, y, z = self.coords
        return complex(x / z), complex(y / z)

    def negated(self) -> ProjPoint:
        """Image under the central symmetry (x, y) -> (-x, -y)."""
        x, y, z = self.coords
        return ProjPoint((x, y, -z))


@dataclass(frozen=True, eq=False, repr=False)
class ProjLine(_Homogeneous):
    """Line {w₁x + w₂y + w₃z = 0} given by its dual coordinates."""

    @classmethod
    def through(cls, first: ProjPoint, second: ProjPoint) -> ProjLine:
        cross = np.cross(first.coords, second.coords)
        if float(np.abs(cross).max()) <= CONSTRUCTION_TOL:
            raise IncidenceError("Two distinct points are needed to span a line")
        return cls(cross)

    @classmethod
    def from_point_direction(cls, point: ProjPoint, vx: Any, vy: Any) -> ProjLine:
        return cls.through(point, ProjPoint((vx, vy, 0)))

    def direction(self) -> tuple[complex, complex]:
        """Direction vector (v_x, v_y) of the line, defined up to scale."""
        w1, w2, _ = self.coords
        return complex(-w2), complex(w1)

    def meet(self, other: ProjLine) -> ProjPoint:
        cross = np.cross(self.coords, other.coords)
        if float(np.abs(cross).max()) <= CONSTRUCTION_TOL:
            raise IncidenceError("Coincident lines have no single common point")
        return ProjPoint(cross)


CYCLIC_I = ProjPoint((1, 1j, 0))
CYCLIC_J = ProjPoint((1, -1j, 0))
INFINITY_LINE = ProjLine((0, 0, 1))


def incidence_residual(point: ProjPoint, line: ProjLine) -> float:
    """|w·P| on normalized representatives."""
    return float(abs(np.dot(line.coords, point.coords)))


def _scaled(matrix: np.ndarray) -> np.ndarray:
    return matrix / float(np.abs(matrix).max())


@dataclass(frozen=True, eq=False)
class Conic:
    """Conic {ᵗX A X = 0}; keeps its dual matrix and, when known, an exact Rational matrix."""

    matrix: np.ndarray
    dual: np.ndarray | None = None
    exact: tuple[tuple[Fraction, ...], ...] | None = None

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (3, 3):
            raise ConicError("A conic needs a 3x3 matrix")
        if float(np.abs(matrix - matrix.T).max()) > CONSTRUCTION_TOL * float(np.abs(matrix).max()):
            raise ConicError("Conic matrix is not symmetric")
        object.__setattr__(self, "matrix", matrix)
        if self.dual is not None:
            object.__setattr__(self, "dual", np.array(self.dual, dtype=complex))

    @property
    def is_regular(self) -> bool:
        return abs(np.linalg.det(_scaled(self.matrix))) > CONSTRUCTION_TOL

    def dual_matrix(self) -> np.ndarray:
        """A matrix of the dual conic (any nonzero multiple of A⁻¹)."""
        if self.dual is not None:
            return self.dual
        if not self.is_regular:
            raise ConicError("Singular conic has no dual conic")
        return np.linalg.inv(self.matrix)

    def equation_residual(self, point: ProjPoint) -> float:
        return float(abs(point.coords @ _scaled(self.matrix) @ point.coords))

    def contains(self, point: ProjPoint, tol: float = ON_CONIC_TOL) -> bool:
        return self.equation_residual(point) <= tol


@dataclass(frozen=True)
class ConfocalFamily:
    """Confocal family x²/(a²+λ) + y²/(b²+λ) = 1 generated by exact a², b²."""

    a2: Fraction
    b2: Fraction
    _ellipse: Conic | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        try:
            a2, b2 = as_rational(self.a2), as_rational(self.b2)
        except AlgebraError as err:
            raise ConicError(f"Family parameters must be exact: {err}") from err
        if a2 <= 0 or b2 <= 0:
            raise ConicError(f"a2 and b2 must be positive, got {a2} and {b2}")
        object.__setattr__(self, "a2", a2)
        object.__setattr__(self, "b2", b2)

    @classmethod
    def from_axes(cls, a: Fraction | int, b: Fraction | int) -> ConfocalFamily:
        return cls(as_rational(a) ** 2, as_rational(b) ** 2)

    @property
    def c2(self) -> Fraction:
        return self.a2 - self.b2

    @property
    def is_circle(self) -> bool:
        return self.a2 == self.b2

    @property
    def a(self) -> float:
        return math.sqrt(self.a2)

    @property
    def b(self) -> float:
        return math.sqrt(self.b2)

    @property
    def ellipse(self) -> Conic:
        if self._ellipse is None:
            object.__setattr__(self, "_ellipse", conic_of(self, 0))
        return self._ellipse

    def __str__(self) -> str:
        return f"a²={self.a2}, b²={self.b2}"


def forbidden_distance(fam: ConfocalFamily, lam: Any) -> float:
    if isinstance(lam, (Fraction, int)):
        lam = Fraction(lam)
        if lam in (-fam.a2, -fam.b2):
            return 0.0
    value = as_cx(lam)
    scale = max(1.0, float(fam.a2), float(fam.b2))
    return min(abs(value + float(fam.a2)), abs(value + float(fam.b2))) / scale


def conic_of(fam: ConfocalFamily, lam: Any) -> Conic:
    """Conic 𝓒_λ = diag(1/(a²+λ), 1/(b²+λ), -1), dual diag(a²+λ, b²+λ, -1)."""
    if forbidden_distance(fam, lam) <= FORBIDDEN_LAMBDA_TOL:
        raise DegenerateFamilyError(f"λ={lam} is a forbidden value (-a² or -b²) for {fam}")
    if isinstance(lam, (Fraction, int)):
        pa, pb = fam.a2 + lam, fam.b2 + lam
        exact = ((1 / pa, Fraction(0), Fraction(0)), (Fraction(0), 1 / pb, Fraction(0)),
                 (Fraction(0), Fraction(0), Fraction(-1)))
        diag = (complex(pa), complex(pb))
    else:
        lam = as_cx(lam)
        exact = None
        diag = (float(fam.a2) + lam, float(fam.b2) + lam)
    return Conic(
        matrix=np.diag([1 / diag[0], 1 / diag[1], -1]),
        dual=np.diag([diag[0], diag[1], -1]),
        exact=exact,
    )


def _require_foci(fam: ConfocalFamily) -> complex:
    if fam.is_circle:
        raise NoFociError("A circle has no foci in the confocal sense")
    return cmath.sqrt(complex(fam.c2))


def foci(fam: ConfocalFamily) -> tuple[ProjPoint, ProjPoint, ProjPoint, ProjPoint]:
    """Real foci (±c, 0) then complex foci (0, ±ic)."""
    c = _require_foci(fam)
    return (
        ProjPoint.affine(c, 0),
        ProjPoint.affine(-c, 0),
        ProjPoint.affine(0, 1j * c),
        ProjPoint.affine(0, -1j * c),
    )


def isotropic_tangency_points(fam: ConfocalFamily) -> list[ProjPoint]:
    """Points of 𝓔 whose tangent passes through a cyclic point."""
    c = _require_foci(fam)
    return [
        ProjPoint.affine(sx * float(fam.a2) / c, sy * 1j * float(fam.b2) / c)
        for sx, sy in itertools.product((1, -1), repeat=2)
    ]


def is_isotropic(line: ProjLine, tol: float = STEP_TOL) -> bool:
    """True when the line contains I or J (the line at infinity contains both)."""
    w1, w2, _ = line.coords
    return bool(abs(w1 + 1j * w2) <= tol or abs(w1 - 1j * w2) <= tol)


def tangency_residual(line: ProjLine, conic: Conic) -> float:
    """|ŵᵀ D̂ ŵ| with D the dual matrix scaled to unit max entry."""
    return float(abs(line.coords @ _scaled(conic.dual_matrix()) @ line.coords))


def is_tangent(line: ProjLine, conic: Conic, tol: float = STEP_TOL) -> bool:
    return tangency_residual(line, conic) <= tol


def polar_line(conic: Conic, point: ProjPoint) -> ProjLine:
    """Polar of the point; the tangent line when the point is on the conic."""
    coords = _scaled(conic.matrix) @ point.coords
    if float(np.abs(coords).max()) <= CONSTRUCTION_TOL:
        raise ConicError("Point is a singular point of the conic")
    return ProjLine(coords)


def _pencil_basis(coords: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Two independent elements of the pencil of objects incident to coords."""
    pivot = _pivot_index(coords)
    others = [i for i in range(3) if i != pivot]
    basis = np.eye(3, dtype=complex)
    return np.cross(coords, basis[others[0]]), np.cross(coords, basis[others[1]])


def _solve_pencil(
    coords: np.ndarray, form: np.ndarray
) -> tuple[np.ndarray, np.ndarray, float]:
    u, v = _pencil_basis(coords)
    form = _scaled(form)
    (s1, t1), (s2, t2), ratio = solve_binary_quadratic(
        complex(u @ form @ u), complex(2 * (u @ form @ v)), complex(v @ form @ v)
    )
    return s1 * u + t1 * v, s2 * u + t2 * v, ratio


def tangent_candidates(point: ProjPoint, conic: Conic) -> tuple[ProjLine, ProjLine, float]:
    """Both tangents from a point, unsorted, plus the relative discriminant."""
    first, second, ratio = _solve_pencil(point.coords, conic.dual_matrix())
    return ProjLine(first), ProjLine(second), ratio


def intersection_candidates(conic: Conic, line: ProjLine) -> tuple[ProjPoint, ProjPoint, float]:
    """Both intersections of a line with a conic, unsorted, plus the relative discriminant."""
    first, second, ratio = _solve_pencil(line.coords, conic.matrix)
    return ProjPoint(first), ProjPoint(second), ratio


def _with_multiplicity(
    first: _Homogeneous, second: _Homogeneous, ratio: float, tol: float
) -> list[tuple[Any, int]]:
    if ratio <= tol:
        return [(first, 2)]
    return sorted([(first, 1), (second, 1)], key=lambda item: item[0].sort_key())


def tangent_lines_through(
    point: ProjPoint, conic: Conic, tol: float = NEAR_DEGENERATE_TOL
) -> list[tuple[ProjLine, int]]:
    """Tangents from a point, sorted by normalized dual coordinates; doubled when on the conic."""
    if not conic.is_regular:
        raise ConicError("Tangents need a regular conic")
    return _with_multiplicity(*tangent_candidates(point, conic), tol)


def conic_line_intersection(
    conic: Conic, line: ProjLine, tol: float = NEAR_DEGENERATE_TOL
) -> list[tuple[ProjPoint, int]]:
    """Intersection points with multiplicity; a tangent line meets the conic in a doubled point."""
    if not conic.is_regular:
        raise ConicError("Intersections need a regular conic")
    return _with_multiplicity(*intersection_candidates(conic, line), tol)


def common_points(fam: ConfocalFamily, lam: Any) -> list[ProjPoint]:
    """The four points shared by 𝓔 and 𝓒_λ."""
    if lam == 0:
        raise ConicError("λ=0 gives the ellipse itself; the conics are identical")
    conic_of(fam, lam)
    _require_foci(fam)
    lam = complex(lam)
    a2, b2, c2 = float(fam.a2), float(fam.b2), float(fam.c2)
    x = cmath.sqrt(a2 * (a2 + lam) / c2)
    y = cmath.sqrt(b2 * (b2 + lam) / -c2)
    return [ProjPoint.affine(sx * x, sy * y) for sx, sy in itertools.product((1, -1), repeat=2)]


def caustic_parameter_of_line(fam: ConfocalFamily, line: ProjLine, tol: float = STEP_TOL) -> complex:
    """The unique λ with the line tangent to 𝓒_λ."""
    if is_isotropic(line, tol):
        raise IsotropicLineError(f"{line!r} is isotropic; it has no caustic parameter")
    w1, w2, w3 = line.coords
    a2, b2 = float(fam.a2), float(fam.b2)
    lam = complex((w3 * w3 - a2 * w1 * w1 - b2 * w2 * w2) / (w1 * w1 + w2 * w2))
    if forbidden_distance(fam, lam) <= tol:
        raise FocalLineError(f"{line!r} passes through a focus (λ={lam:.6g})")
    return lam


def ellipse_point(fam: ConfocalFamily, theta: Any) -> ProjPoint:
    """Point (a cos θ, b sin θ) of 𝓔 for complex θ."""
    theta = as_cx(theta)
    return ProjPoint.affine(fam.a * cmath.cos(theta), fam.b * cmath.sin(theta))
