"""Exact rational/polynomial arithmetic and a simultaneous-iteration root finder."""
from __future__ import annotations

import cmath
import logging
import math
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np
from numpy.polynomial import polynomial as npoly

from .const import (
    ROOT_ANGLE_OFFSET,
    ROOT_MAX_ITERATIONS,
    ROOT_POLISH_STEPS,
    ROOT_TOL,
)

_LOGGER = logging.getLogger(__name__)

Rational = Fraction
Cx = complex


class AlgebraError(Exception):
    """Algebra error."""


class RootFindingError(AlgebraError):
    """Simultaneous iteration did not reach the residual target."""

    def __init__(self, message: str, best: list[complex], residuals: list[float]) -> None:
        super().__init__(message)
        self.best = best
        self.residuals = residuals


def as_cx(value: Any) -> complex:
    """Return value as a finite complex number."""
    try:
        number = complex(value)
    except (TypeError, ValueError) as err:
        raise AlgebraError(f"Not a complex number: {value!r}") from err
    if not cmath.isfinite(number):
        raise AlgebraError(f"Non-finite complex value: {number!r}")
    return number


def as_rational(value: Any) -> Fraction:
    """Return an exact Fraction for an int or Fraction (floats are refused)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return Fraction(value)
    raise AlgebraError(f"Exact rational expected, got {type(value).__name__}")


@dataclass(frozen=True)
class PolyQ:
    """Dense polynomial in λ with Fraction coefficients; index = power of λ."""

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        coeffs = [as_rational(c) for c in self.coeffs]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    @classmethod
    def constant(cls, value: Fraction | int) -> PolyQ:
        return cls((value,))

    @classmethod
    def monomial(cls, power: int = 1, coeff: Fraction | int = 1) -> PolyQ:
        return cls((0,) * power + (coeff,))

    @property
    def degree(self) -> int:
        """Degree, -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __getitem__(self, power: int) -> Fraction:
        if 0 <= power < len(self.coeffs):
            return self.coeffs[power]
        return Fraction(0)

    @staticmethod
    def _coerce(other: Any) -> PolyQ | None:
        if isinstance(other, PolyQ):
            return other
        if isinstance(other, Fraction) or (isinstance(other, int) and not isinstance(other, bool)):
            return PolyQ((other,))
        return None

    def __add__(self, other: Any) -> PolyQ:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        size = max(len(self.coeffs), len(rhs.coeffs))
        return PolyQ(tuple(self[i] + rhs[i] for i in range(size)))

    __radd__ = __add__

    def __neg__(self) -> PolyQ:
        return PolyQ(tuple(-c for c in self.coeffs))

    def __sub__(self, other: Any) -> PolyQ:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: Any) -> PolyQ:
        return (-self) + other

    def __mul__(self, other: Any) -> PolyQ:
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        if not self or not rhs:
            return PolyQ()
        out = [Fraction(0)] * (len(self.coeffs) + len(rhs.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(rhs.coeffs):
                out[i + j] += a * b
        return PolyQ(tuple(out))

    __rmul__ = __mul__

    def __pow__(self, exponent: int) -> PolyQ:
        if exponent < 0:
            raise AlgebraError("Negative powers are not polynomials")
        result = PolyQ.constant(1)
        base = self
        while exponent:
            if exponent & 1:
                result = result * base
            base = base * base
            exponent >>= 1
        return result

    def __call__(self, x: Any) -> Any:
        """Evaluate by Horner's rule; exact for Fraction/int arguments."""
        acc: Any = Fraction(0) if not isinstance(x, (complex, float)) else 0j
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> PolyQ:
        return PolyQ(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def __divmod__(self, other: Any) -> tuple[PolyQ, PolyQ]:
        divisor = self._coerce(other)
        if divisor is None:
            return NotImplemented
        if not divisor:
            raise AlgebraError("Polynomial division by zero")
        remainder = list(self.coeffs)
        shift = len(remainder) - len(divisor.coeffs)
        if shift < 0:
            return PolyQ(), self
        quotient = [Fraction(0)] * (shift + 1)
        lead = divisor.leading
        for k in range(shift, -1, -1):
            factor = remainder[k + divisor.degree] / lead
            quotient[k] = factor
            if factor:
                for i, c in enumerate(divisor.coeffs):
                    remainder[k + i] -= factor * c
        return PolyQ(tuple(quotient)), PolyQ(tuple(remainder[: divisor.degree]))

    def exact_div(self, other: Any) -> PolyQ:
        """Quotient of an exact division; a nonzero remainder is an error."""
        quotient, remainder = divmod(self, other)
        if remainder:
            raise AlgebraError("Division is not exact")
        return quotient

    def monic(self) -> PolyQ:
        if not self:
            return self
        lead = self.leading
        return PolyQ(tuple(c / lead for c in self.coeffs))

    def to_complex(self) -> np.ndarray:
        """Ascending complex coefficient array."""
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def __str__(self) -> str:
        if not self:
            return "0"
        terms = []
        for power in range(self.degree, -1, -1):
            c = self.coeffs[power]
            if c == 0:
                continue
            body = {0: f"{abs(c)}", 1: f"{abs(c)}*λ"}.get(power, f"{abs(c)}*λ^{power}")
            terms.append(("-" if c < 0 else "+", body))
        sign, body = terms[0]
        text = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


def poly_gcd(p: PolyQ, q: PolyQ) -> PolyQ:
    """Monic greatest common divisor over the rationals."""
    a, b = p, q
    while b:
        a, b = b, divmod(a, b)[1]
    return a.monic()


def squarefree_decomposition(p: PolyQ) -> list[tuple[PolyQ, int]]:
    """Yun's decomposition: monic square-free factors fᵢ with p ∝ Π fᵢ**i."""
    if p.degree < 1:
        return []
    f = p.monic()
    df = f.derivative()
    common = poly_gcd(f, df)
    b = f.exact_div(common)
    d = df.exact_div(common) - b.derivative()
    factors: list[tuple[PolyQ, int]] = []
    multiplicity = 1
    while b.degree > 0:
        a = poly_gcd(b, d)
        b = b.exact_div(a)
        d = d.exact_div(a) - b.derivative()
        if a.degree > 0:
            factors.append((a, multiplicity))
        multiplicity += 1
    return factors


def is_squarefree(p: PolyQ) -> bool:
    """True when p has only simple roots (gcd(p, p') is constant)."""
    return poly_gcd(p, p.derivative()).degree <= 0


def _sign_changes(values: Iterable[Fraction]) -> int:
    signs = [v > 0 for v in values if v != 0]
    return sum(1 for prev, cur in zip(signs, signs[1:]) if prev != cur)


def sturm_count(p: PolyQ, lo: Fraction | int | None = None, hi: Fraction | int | None = None) -> int:
    """Number of distinct real roots of p in (lo, hi]; None stands for -inf / +inf."""
    if p.degree < 1:
        return 0
    base = p.exact_div(poly_gcd(p, p.derivative()))
    chain = [base, base.derivative()]
    while chain[-1].degree > 0:
        remainder = divmod(chain[-2], chain[-1])[1]
        if not remainder:
            break
        chain.append(-remainder)

    def _values(x: Fraction | int | None, side: int) -> list[Fraction]:
        if x is None:
            return [c.leading * (side**c.degree) for c in chain]
        return [c(Fraction(x)) for c in chain]

    return _sign_changes(_values(lo, -1)) - _sign_changes(_values(hi, 1))


@dataclass(frozen=True)
class SeriesQ:
    """Power series in t truncated after t**order, coefficients in a Rational algebra."""

    coeffs: tuple[Any, ...]
    order: int

    def __post_init__(self) -> None:
        if self.order < 0:
            raise AlgebraError("Truncation order must be non-negative")
        if not self.coeffs:
            raise AlgebraError("SeriesQ needs at least its constant coefficient")
        zero = self.coeffs[0] * 0
        padded = list(self.coeffs[: self.order + 1])
        padded += [zero] * (self.order + 1 - len(padded))
        object.__setattr__(self, "coeffs", tuple(padded))

    def __getitem__(self, k: int) -> Any:
        return self.coeffs[k]

    def __add__(self, other: SeriesQ) -> SeriesQ:
        order = min(self.order, other.order)
        return SeriesQ(tuple(self[k] + other[k] for k in range(order + 1)), order)

    def __mul__(self, other: SeriesQ) -> SeriesQ:
        order = min(self.order, other.order)
        out = []
        for k in range(order + 1):
            acc = self[0] * other[k]
            for i in range(1, k + 1):
                acc = acc + self[i] * other[k - i]
            out.append(acc)
        return SeriesQ(tuple(out), order)


def _is_one(value: Any) -> bool:
    if isinstance(value, PolyQ):
        return value.coeffs == (Fraction(1),)
    return value == 1


def series_sqrt(series: SeriesQ, order: int | None = None) -> SeriesQ:
    """Square root of a series with constant term 1, by the r·r = s coefficient recurrence."""
    order = series.order if order is None else min(order, series.order)
    if not _is_one(series[0]):
        raise AlgebraError("series_sqrt expects a series with constant term 1")
    half = Fraction(1, 2)
    root = [series[0]]
    for k in range(1, order + 1):
        acc = series[k]
        for i in range(1, k):
            acc = acc - root[i] * root[k - i]
        root.append(acc * half)
    return SeriesQ(tuple(root), order)


def catalan(k: int) -> Fraction:
    """k-th Catalan number."""
    if k < 0:
        raise AlgebraError("catalan expects k >= 0")
    return Fraction(math.comb(2 * k, k), k + 1)


def taylor_c(k: int) -> Fraction:
    """k-th Taylor coefficient of sqrt(1 + t)."""
    if k < 0:
        raise AlgebraError("taylor_c expects k >= 0")
    return Fraction((-1) ** (k + 1) * math.comb(2 * k, k), 4**k * (2 * k - 1))


def _exact_quotient(value: Any, divisor: Any) -> Any:
    if isinstance(value, PolyQ):
        return value.exact_div(divisor)
    return value / divisor


def bareiss_det(matrix: Sequence[Sequence[Any]]) -> Any:
    """Fraction-free determinant over an exact commutative ring (Fraction or PolyQ entries)."""
    rows = [list(row) for row in matrix]
    size = len(rows)
    if size == 0 or any(len(row) != size for row in rows):
        raise AlgebraError("bareiss_det expects a non-empty square matrix")
    sign = 1
    previous = None
    for k in range(size - 1):
        if not rows[k][k]:
            swap = next((i for i in range(k + 1, size) if rows[i][k]), None)
            if swap is None:
                return rows[k][k] * 0
            rows[k], rows[swap] = rows[swap], rows[k]
            sign = -sign
        pivot = rows[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                value = rows[i][j] * pivot - rows[i][k] * rows[k][j]
                rows[i][j] = value if previous is None else _exact_quotient(value, previous)
        previous = pivot
    det = rows[-1][-1]
    return det if sign > 0 else -det


def hankel_det(seq: Sequence[Any], m: int, offset: int = 0) -> Any:
    """Exact det of the m×m Hankel matrix with entry (i, j) = seq[i + j + offset], 1 ≤ i, j ≤ m."""
    if m < 1:
        raise AlgebraError("hankel_det expects m >= 1")
    first, last = 2 + offset, 2 * m + offset
    if first < 0 or last >= len(seq):
        raise AlgebraError(
            f"Sequence of length {len(seq)} cannot fill a {m}x{m} Hankel matrix at offset {offset}"
        )
    return bareiss_det(
        [[seq[i + j + offset] for j in range(1, m + 1)] for i in range(1, m + 1)]
    )


def _complex_coeffs(poly: PolyQ | Sequence[complex]) -> np.ndarray:
    coeffs = poly.to_complex() if isinstance(poly, PolyQ) else np.array(
        [as_cx(c) for c in poly], dtype=complex
    )
    coeffs = np.trim_zeros(coeffs, "b")
    if not np.all(np.isfinite(coeffs)):
        raise AlgebraError("Non-finite polynomial coefficient")
    return coeffs


def cauchy_bound(poly: PolyQ | Sequence[complex]) -> float:
    """Cauchy bound 1 + max|aᵢ/aₙ| on the moduli of the roots."""
    coeffs = _complex_coeffs(poly)
    if len(coeffs) < 2:
        raise AlgebraError("cauchy_bound needs degree >= 1")
    return 1.0 + float(np.max(np.abs(coeffs[:-1] / coeffs[-1])))


def _aberth_step(z: np.ndarray, monic: np.ndarray, slope: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ratio = npoly.polyval(z, monic) / npoly.polyval(z, slope)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inverse = 1.0 / diff
        np.fill_diagonal(inverse, 0.0)
        step = ratio / (1.0 - ratio * inverse.sum(axis=1))
    return np.where(np.isfinite(step), step, 0.0)


def _residuals(z: np.ndarray, monic: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    values = np.abs(npoly.polyval(z, monic))
    scale = npoly.polyval(np.abs(z), np.abs(monic))
    return values, scale


def _aberth(coeffs: np.ndarray, tol: float, max_iterations: int) -> list[complex]:
    degree = len(coeffs) - 1
    monic = coeffs / coeffs[-1]
    slope = npoly.polyder(monic)
    radius = 1.0 + float(np.max(np.abs(monic[:-1])))
    angles = 2.0 * np.pi * np.arange(degree) / degree + ROOT_ANGLE_OFFSET
    z = radius * np.exp(1j * angles)
    values, scale = _residuals(z, monic)
    for iteration in range(max_iterations):
        if np.all(values <= tol * scale):
            for _ in range(ROOT_POLISH_STEPS):
                candidate = z - _aberth_step(z, monic, slope)
                new_values, _ = _residuals(candidate, monic)
                z = np.where(new_values <= values, candidate, z)
                values = np.minimum(new_values, values)
            _LOGGER.debug("Aberth iteration converged after %d steps (degree %d)", iteration, degree)
            return [complex(v) for v in z]
        z = z - _aberth_step(z, monic, slope)
        values, scale = _residuals(z, monic)
    raise RootFindingError(
        f"Root finder did not converge after {max_iterations} iterations",
        best=[complex(v) for v in z],
        residuals=[float(r / s) if s else float(r) for r, s in zip(values, scale)],
    )


def _root_key(z: complex) -> tuple[float, float]:
    return (z.real, z.imag)


def poly_roots(
    poly: PolyQ | Sequence[complex],
    tol: float = ROOT_TOL,
    max_iterations: int = ROOT_MAX_ITERATIONS,
) -> list[complex]:
    """All roots with multiplicity, sorted by real then imaginary part.

    Aberth-Ehrlich simultaneous iteration started on a circle of radius equal to
    the Cauchy bound. A root is accepted when |p(z)| <= tol * sum|aᵢ||z|^i.
    """
    if tol <= 0:
        raise AlgebraError("tol must be positive")
    coeffs = _complex_coeffs(poly)
    if len(coeffs) < 2:
        raise AlgebraError("poly_roots needs a polynomial of degree >= 1")
    zeros = int(np.argmax(coeffs != 0))
    roots = [0j] * zeros
    reduced = coeffs[zeros:]
    if len(reduced) == 2:
        roots.append(complex(-reduced[0] / reduced[1]))
    elif len(reduced) > 2:
        roots.extend(_aberth(reduced, tol, max_iterations))
    return sorted(roots, key=_root_key)


def cluster_roots(
    roots: Iterable[complex], radius: float, relative: bool = False
) -> list[tuple[complex, int]]:
    """Group roots closer than radius; returns (centre, multiplicity) pairs.

    With relative=True the radius is scaled by max(1, |centre|) of each cluster.
    """
    clusters: list[list[complex]] = []
    for z in roots:
        for cluster in clusters:
            scale = max(1.0, abs(cluster[0])) if relative else 1.0
            if abs(z - cluster[0]) <= radius * scale:
                cluster.append(z)
                break
        else:
            clusters.append([z])
    return [(complex(np.mean(cluster)), len(cluster)) for cluster in clusters]


def rational_roots(p: PolyQ, tol: float = ROOT_TOL) -> list[Fraction]:
    """Distinct rational roots of p, ascending; every root is verified exactly."""
    if p.degree < 1:
        return []
    found: set[Fraction] = set()
    for root in poly_roots(p, tol):
        if abs(root.imag) > 1e-6 * max(1.0, abs(root)):
            continue
        for digits in range(1, 13):
            candidate = Fraction(root.real).limit_denominator(10**digits)
            if p(candidate) == 0:
                found.add(candidate)
                break
    return sorted(found)


def solve_binary_quadratic(
    alpha: complex, beta: complex, gamma: complex
) -> tuple[tuple[complex, complex], tuple[complex, complex], float]:
    """Solve α s² + β s t + γ t² = 0 for the ratio (s : t).

    Returns both solutions and the relative discriminant
    |β² - 4αγ| / (|β|² + 4|αγ|), which vanishes for a doubled solution.
    """
    scale = max(abs(alpha), abs(beta), abs(gamma))
    if scale == 0:
        raise AlgebraError("Binary quadratic vanishes identically")
    alpha, beta, gamma = alpha / scale, beta / scale, gamma / scale
    disc = beta * beta - 4 * alpha * gamma
    denom = abs(beta) ** 2 + 4 * abs(alpha * gamma)
    ratio = abs(disc) / denom if denom else 0.0
    if alpha == 0 and gamma == 0:
        return (1 + 0j, 0j), (0j, 1 + 0j), ratio
    root = cmath.sqrt(disc)
    if (beta.conjugate() * root).real < 0:
        root = -root
    q = -(beta + root) / 2
    if abs(alpha) >= abs(gamma):
        if q == 0:
            return (0j, 1 + 0j), (0j, 1 + 0j), ratio
        return (q / alpha, 1 + 0j), (gamma / q, 1 + 0j), ratio
    if q == 0:
        return (1 + 0j, 0j), (1 + 0j, 0j), ratio
    return (1 + 0j, q / gamma), (1 + 0j, alpha / q), ratio
