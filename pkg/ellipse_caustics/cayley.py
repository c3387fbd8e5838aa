"""Exact Cayley polynomials of the confocal family and their caustic roots."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

from .algebra import (
    PolyQ,
    SeriesQ,
    cluster_roots,
    hankel_det,
    poly_roots,
    rational_roots,
    series_sqrt,
    squarefree_decomposition,
    taylor_c,
)
from .conics import ConfocalFamily, forbidden_distance
from .const import ROOT_CLUSTER_RATIO, ROOT_TOL, STEP_TOL

_LOGGER = logging.getLogger(__name__)

KIND_ELLIPSE = "ellipse"
KIND_HYPERBOLA = "hyperbola"
KIND_COMPLEX = "complex"


class CayleyError(Exception):
    """Cayley polynomial error."""


def _check_n(n: int) -> None:
    if n < 3:
        raise CayleyError(f"Periodic orbits need n >= 3, got {n}")


def _axis_factors(fam: ConfocalFamily) -> tuple[PolyQ, PolyQ]:
    """X = 1 + λ/a² and Y = 1 + λ/b²."""
    return PolyQ((1, 1 / fam.a2)), PolyQ((1, 1 / fam.b2))


def cayley_B(fam: ConfocalFamily, k: int) -> PolyQ:
    """B_k(λ) = Σ_{u+v+w=k} c_u c_v c_w X^u Y^v."""
    if k < 0:
        raise CayleyError("cayley_B expects k >= 0")
    x, y = _axis_factors(fam)
    x_pow = [x**i for i in range(k + 1)]
    y_pow = [y**i for i in range(k + 1)]
    c = [taylor_c(i) for i in range(k + 1)]
    total = PolyQ()
    for u in range(k + 1):
        for v in range(k + 1 - u):
            total = total + (c[u] * c[v] * c[k - u - v]) * (x_pow[u] * y_pow[v])
    return total


def cayley_B_series(fam: ConfocalFamily, kmax: int) -> list[PolyQ]:
    """B_0..B_kmax as coefficients of the square root of (1 + Xt)(1 + Yt)(1 + t)."""
    x, y = _axis_factors(fam)
    one = PolyQ.constant(1)
    cubic = SeriesQ((one, x + y + 1, x * y + x + y, x * y), kmax)
    return list(series_sqrt(cubic).coeffs)


def _bound(n: int) -> int:
    return (n * n - 1) // 4 if n % 2 else n * n // 4


def _hankel_shape(n: int) -> tuple[int, int, int]:
    """(m, size, offset) of the determinant for n-periodic orbits."""
    if n % 2:
        m = (n - 1) // 2
        return m, m, 0
    m = n // 2
    return m, m - 1, 1


@dataclass(frozen=True)
class CayleyTable:
    """B_k coefficients and the resulting Cayley polynomial for one (family, n)."""

    fam: ConfocalFamily
    n: int
    m: int
    size: int
    B: tuple[PolyQ, ...]
    Bn: PolyQ

    def __post_init__(self) -> None:
        for k, poly in enumerate(self.B):
            if poly.degree > k:
                raise CayleyError(f"B_{k} has degree {poly.degree} > {k}")

    @property
    def degree(self) -> int:
        return self.Bn.degree


def cayley_polynomial(fam: ConfocalFamily, n: int) -> CayleyTable:
    """𝓑ⁿ: det(B_{i+j}) of size m for n = 2m+1, det(B_{i+j+1}) of size m-1 for n = 2m."""
    _check_n(n)
    m, size, offset = _hankel_shape(n)
    B = tuple(cayley_B(fam, k) for k in range(2 * size + offset + 1))
    Bn = hankel_det(B, size, offset)
    _LOGGER.debug("𝓑^%d for %s has degree %d", n, fam, Bn.degree)
    return CayleyTable(fam=fam, n=n, m=m, size=size, B=B, Bn=Bn)


def leading_B(fam: ConfocalFamily, k: int) -> Fraction:
    """Coefficient d(B_k) of λ^k in B_k."""
    c = [taylor_c(i) for i in range(k + 1)]
    return sum(
        (c[u] * c[k - u] / (fam.a2**u * fam.b2 ** (k - u)) for u in range(k + 1)),
        Fraction(0),
    )


def leading_hankel(fam: ConfocalFamily, n: int) -> Fraction:
    """Determinant of the d(B_k); the top coefficient of 𝓑ⁿ when it has generic degree."""
    _check_n(n)
    _, size, offset = _hankel_shape(n)
    return hankel_det([leading_B(fam, k) for k in range(2 * size + offset + 1)], size, offset)


@dataclass(frozen=True)
class DegreeReport:
    """Degree facts about 𝓑ⁿ for one family."""

    n: int
    degree: int
    expected_generic: int
    bound: int
    leading: Fraction
    circle: bool
    circle_expected: int | None

    @property
    def generic(self) -> bool:
        return self.degree == self.expected_generic

    @property
    def within_bound(self) -> bool:
        return self.degree <= self.bound


def degree_report(fam: ConfocalFamily, n: int) -> DegreeReport:
    """Degree of 𝓑ⁿ against the generic value m(m+1) (odd) / m²-1 (even)."""
    table = cayley_polynomial(fam, n)
    m, size = table.m, table.size
    expected = m * (m + 1) if n % 2 else m * m - 1
    return DegreeReport(
        n=n,
        degree=table.degree,
        expected_generic=expected,
        bound=_bound(n),
        leading=table.Bn.leading,
        circle=fam.is_circle,
        circle_expected=size if fam.is_circle else None,
    )


@dataclass(frozen=True)
class ForbiddenValues:
    """Exact values of 𝓑ⁿ at the forbidden parameters."""

    at_minus_a2: Fraction
    at_minus_b2: Fraction

    @property
    def both_nonzero(self) -> bool:
        return self.at_minus_a2 != 0 and self.at_minus_b2 != 0


def forbidden_values(fam: ConfocalFamily, n: int) -> ForbiddenValues:
    """𝓑ⁿ(-a²) and 𝓑ⁿ(-b²), exact."""
    Bn = cayley_polynomial(fam, n).Bn
    return ForbiddenValues(at_minus_a2=Bn(-fam.a2), at_minus_b2=Bn(-fam.b2))


def classify_caustic(fam: ConfocalFamily, lam: complex | Fraction, tol: float = STEP_TOL) -> str:
    """Ellipse, hyperbola or complex conic (no real points or non-real λ)."""
    value = complex(lam)
    if abs(value.imag) > tol * max(1.0, abs(value)):
        return KIND_COMPLEX
    pa, pb = float(fam.a2) + value.real, float(fam.b2) + value.real
    if pa > 0 and pb > 0:
        return KIND_ELLIPSE
    if pa * pb < 0:
        return KIND_HYPERBOLA
    return KIND_COMPLEX


@dataclass(frozen=True)
class CausticRoot:
    """Root of 𝓑ⁿ with its exact multiplicity and admissibility verdict."""

    lam: complex
    multiplicity: int
    admissible: bool
    kind: str
    exact: Fraction | None = None


def _exact_match(value: complex, candidates: list[Fraction], tol: float) -> Fraction | None:
    for candidate in candidates:
        if abs(value - float(candidate)) <= tol * max(1.0, abs(value)):
            return candidate
    return None


def caustic_roots(fam: ConfocalFamily, n: int, tol: float = STEP_TOL) -> list[CausticRoot]:
    """Roots of 𝓑ⁿ sorted by real then imaginary part.

    Multiplicities come from the exact square-free decomposition; roots of each
    square-free factor are found numerically and snapped to exact rational
    roots where those exist.
    """
    Bn = cayley_polynomial(fam, n).Bn
    if Bn.degree < 1:
        _LOGGER.warning("𝓑^%d is constant for %s; no caustics", n, fam)
        return []
    roots: list[CausticRoot] = []
    for factor, multiplicity in squarefree_decomposition(Bn):
        exact_roots = rational_roots(factor)
        for value in poly_roots(factor, ROOT_TOL):
            exact = _exact_match(value, exact_roots, tol)
            if exact is not None:
                value = complex(exact)
                forbidden = exact in (-fam.a2, -fam.b2)
            else:
                forbidden = forbidden_distance(fam, value) <= tol
            roots.append(
                CausticRoot(
                    lam=value,
                    multiplicity=multiplicity,
                    admissible=multiplicity == 1 and not forbidden,
                    kind=classify_caustic(fam, value, tol),
                    exact=exact,
                )
            )
    roots.sort(key=lambda root: (root.lam.real, root.lam.imag))
    _cross_check_multiplicities(Bn, roots)
    return roots


def _cross_check_multiplicities(Bn: PolyQ, roots: list[CausticRoot]) -> None:
    clusters = cluster_roots(poly_roots(Bn, ROOT_TOL), ROOT_CLUSTER_RATIO, relative=True)
    numeric = sorted(mult for _, mult in clusters)
    exact = sorted(root.multiplicity for root in roots)
    if numeric != exact:
        _LOGGER.warning(
            "Clustered multiplicities %s disagree with the exact decomposition %s", numeric, exact
        )


def closed_form_B3(fam: ConfocalFamily) -> PolyQ:
    """-(1/(8a⁴b⁴))((a²-b²)²λ² - 2(a⁴b² + a²b⁴)λ - 3a⁴b⁴)."""
    a2, b2 = fam.a2, fam.b2
    inner = PolyQ((-3 * a2**2 * b2**2, -2 * (a2**2 * b2 + a2 * b2**2), (a2 - b2) ** 2))
    return inner * Fraction(-1, 8 * a2**2 * b2**2)


def closed_form_B4(fam: ConfocalFamily) -> PolyQ:
    """(1/(16a⁶b⁶))((a²-b²)²(a²+b²)λ³ + a²b²(a²-b²)²λ² - (a⁶b⁴ + a⁴b⁶)λ - a⁶b⁶)."""
    a2, b2 = fam.a2, fam.b2
    inner = PolyQ(
        (
            -(a2**3) * b2**3,
            -(a2**3 * b2**2 + a2**2 * b2**3),
            a2 * b2 * (a2 - b2) ** 2,
            (a2 - b2) ** 2 * (a2 + b2),
        )
    )
    return inner * (1 / (16 * a2**3 * b2**3))


def quad_caustic_parameters(fam: ConfocalFamily) -> tuple[Fraction, Fraction, Fraction]:
    """Exact λ₁, λ₂, λ₃ of the 4-periodic caustics: -a²b²/(a²-b²), -a²b²/(a²+b²), a²b²/(a²-b²)."""
    if fam.is_circle:
        raise CayleyError("4-periodic caustic parameters need a non-circular ellipse")
    a2, b2 = fam.a2, fam.b2
    product = a2 * b2
    return -product / (a2 - b2), -product / (a2 + b2), product / (a2 - b2)
