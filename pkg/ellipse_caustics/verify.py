"""Acceptance suites run concurrently against the library."""
from __future__ import annotations

import asyncio
import logging
import math
import time
from collections.abc import Callable, Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .algebra import (
    PolyQ,
    SeriesQ,
    catalan,
    hankel_det,
    poly_roots,
    rational_roots,
    series_sqrt,
    sturm_count,
    taylor_c,
)
from .billiard import (
    BilliardError,
    Direction,
    degenerate_triangles,
    focal_reflection_check,
    joachimsthal,
    special_quad_orbits,
    trace_orbit,
)
from .cayley import (
    cayley_B,
    cayley_B_series,
    cayley_polynomial,
    caustic_roots,
    closed_form_B3,
    closed_form_B4,
    degree_report,
    forbidden_values,
    quad_caustic_parameters,
)
from .config import RunConfig
from .conics import ConfocalFamily, ConicError, ProjLine, ProjPoint, ellipse_point, foci
from .const import CLOSURE_TOL, NEGATIVE_CONTROL_MIN_RESIDUAL, STEP_TOL

_LOGGER = logging.getLogger(__name__)

REFERENCE_FAMILY = ConfocalFamily(Fraction(4), Fraction(1))
NEAR_SQRT2 = Fraction(665857, 470832)


@dataclass(frozen=True)
class CheckResult:
    """One pass/fail assertion inside a suite."""

    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class SuiteResult:
    """Outcome of one suite; duration is informational and not part of reports."""

    key: str
    name: str
    checks: tuple[CheckResult, ...]
    duration: float = field(default=0.0, compare=False)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def as_dict(self) -> dict[str, Any]:
        return {
            "key": self.key,
            "name": self.name,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks
            ],
        }


@dataclass(frozen=True)
class SuiteDescription:
    """Describe a verification suite."""

    key: str
    name: str
    run_fn: Callable[[RunConfig], list[CheckResult]]


def _check(name: str, passed: bool, detail: str = "") -> CheckResult:
    return CheckResult(name=name, passed=bool(passed), detail=detail)


def _rng(config: RunConfig, salt: int) -> np.random.Generator:
    return np.random.default_rng([config.seed, salt])


def _random_fraction(rng: np.random.Generator, top: int = 30, den: int = 9) -> Fraction:
    return Fraction(int(rng.integers(1, top + 1)), int(rng.integers(1, den + 1)))


def _random_families(config: RunConfig, salt: int) -> Iterable[ConfocalFamily]:
    """Random exact families with a > b."""
    rng = _rng(config, salt)
    for _ in range(config.samples):
        b2 = _random_fraction(rng, 20)
        yield ConfocalFamily(b2 + _random_fraction(rng), b2)


def _monic_equal(left: PolyQ, right: PolyQ) -> bool:
    return left.monic() == right.monic()


def algebra_suite(config: RunConfig) -> list[CheckResult]:
    rng = _rng(config, 1)
    checks: list[CheckResult] = []
    for order in range(1, 13):
        coeffs = (1, *(_random_fraction(rng) * int(rng.choice([-1, 1])) for _ in range(order)))
        series = SeriesQ(tuple(Fraction(c) for c in coeffs), order)
        root = series_sqrt(series)
        checks.append(_check(f"series_sqrt order {order}", (root * root).coeffs == series.coeffs))
    sqrt_one_plus_t = series_sqrt(SeriesQ((Fraction(1), Fraction(1)), 24))
    checks.append(
        _check(
            "taylor_c matches series_sqrt(1+t) up to 24",
            all(taylor_c(k) == sqrt_one_plus_t[k] for k in range(25)),
        )
    )
    cat = [catalan(k) for k in range(18)]
    checks.append(
        _check(
            "Catalan Hankel determinants are 1 for m=1..8",
            all(hankel_det(cat, m, -1) == 1 for m in range(1, 9)),
        )
    )
    worst = 0.0
    for _ in range(config.samples):
        degree = int(rng.integers(1, 9))
        known = sorted(int(r) for r in rng.choice(np.arange(-6, 7), size=degree, replace=False))
        poly = PolyQ.constant(1)
        for r in known:
            poly = poly * PolyQ((-r, 1))
        found = sorted(poly_roots(poly), key=lambda z: z.real)
        worst = max(worst, max(abs(z - r) for z, r in zip(found, known)))
    checks.append(_check("poly_roots recovers integer roots", worst <= 1e-9, f"max error {worst:.3g}"))
    exact = True
    for _ in range(config.samples):
        x, y = _random_fraction(rng), _random_fraction(rng)
        exact &= (x + y) - y == x and (x * y) / y == x
    checks.append(_check("rational arithmetic is exact", exact))
    return checks


def closed_form_suite(config: RunConfig) -> list[CheckResult]:
    checks: list[CheckResult] = []
    families = list(_random_families(config, 2))
    checks.append(
        _check(
            "𝓑³ equals the closed form",
            all(cayley_polynomial(fam, 3).Bn == closed_form_B3(fam) for fam in families),
        )
    )
    checks.append(
        _check(
            "𝓑⁴ equals the closed form",
            all(_monic_equal(cayley_polynomial(fam, 4).Bn, closed_form_B4(fam)) for fam in families),
        )
    )
    fam = families[0]
    series = cayley_B_series(fam, 12)
    checks.append(
        _check(
            "B_k triple sum equals the series coefficient, k <= 12",
            all(cayley_B(fam, k) == series[k] for k in range(13)),
        )
    )
    return checks


def reference_examples_suite(config: RunConfig) -> list[CheckResult]:
    fam = REFERENCE_FAMILY
    checks: list[CheckResult] = []
    expected = sorted([(20 - 8 * math.sqrt(13)) / 9, (20 + 8 * math.sqrt(13)) / 9])
    roots = sorted(root.lam.real for root in caustic_roots(fam, 3, config.tol))
    checks.append(
        _check(
            "n=3 roots (20±8√13)/9",
            len(roots) == 2 and all(abs(r - e) <= 1e-10 for r, e in zip(roots, expected)),
            f"{roots}",
        )
    )
    quad = rational_roots(cayley_polynomial(fam, 4).Bn)
    checks.append(
        _check(
            "n=4 rational roots {-4/3, -4/5, 4/3}",
            quad == [Fraction(-4, 3), Fraction(-4, 5), Fraction(4, 3)],
            ", ".join(map(str, quad)),
        )
    )
    checks.append(
        _check("𝓑³(-a²) = -2", forbidden_values(fam, 3).at_minus_a2 == -2)
    )
    return checks


def degree_table_suite(config: RunConfig) -> list[CheckResult]:
    checks: list[CheckResult] = []
    circle = ConfocalFamily(Fraction(1), Fraction(1))
    for n in range(3, config.nmax + 1):
        report = degree_report(REFERENCE_FAMILY, n)
        checks.append(
            _check(
                f"n={n} generic degree",
                report.generic and report.within_bound,
                f"degree {report.degree}, expected {report.expected_generic}, bound {report.bound}",
            )
        )
        circle_report = degree_report(circle, n)
        checks.append(
            _check(
                f"n={n} circle degree",
                circle_report.degree == circle_report.circle_expected,
                f"degree {circle_report.degree}, expected {circle_report.circle_expected}",
            )
        )
    return checks


def root_location_suite(config: RunConfig) -> list[CheckResult]:
    triangle_ok, quad_ok, trichotomy_ok = True, True, True
    failures: list[str] = []
    for fam in _random_families(config, 3):
        b3 = cayley_polynomial(fam, 3).Bn
        located = (
            sturm_count(b3, 0, None) == 1
            and sturm_count(b3, -fam.b2, 0) == 1
            and b3(-fam.b2) != 0
            and sturm_count(b3) == 2
        )
        triangle_ok &= located
        b4 = cayley_polynomial(fam, 4).Bn
        lam1, lam2, lam3 = quad_caustic_parameters(fam)
        chain = (
            all(b4(lam) == 0 for lam in (lam1, lam2, lam3))
            and lam1 < -fam.b2 < lam2 < 0 < lam3
        )
        quad_ok &= chain
        gap, margin = lam1 + fam.a2, fam.a2 - 2 * fam.b2
        trichotomy_ok &= (gap > 0) == (margin > 0) and (gap == 0) == (margin == 0)
        if not (located and chain):
            failures.append(str(fam))
    detail = "; ".join(failures)
    return [
        _check("λ₊ > 0 and -b² < λ₋ < 0 for n=3", triangle_ok, detail),
        _check("λ₁ < -b² < λ₂ < 0 < λ₃ for n=4", quad_ok, detail),
        _check("λ₁ vs -a² follows sign(a - √2 b)", trichotomy_ok),
    ]


def _start_points(fam: ConfocalFamily, rng: np.random.Generator, count: int) -> list[ProjPoint]:
    real = rng.uniform(0, 2 * math.pi, count)
    imag = rng.uniform(-1, 1, count)
    points = [ellipse_point(fam, theta) for theta in real]
    points += [ellipse_point(fam, complex(t, s)) for t, s in zip(real[::-1], imag)]
    return points


def closure_grid_suite(config: RunConfig) -> list[CheckResult]:
    fam = REFERENCE_FAMILY
    rng = _rng(config, 4)
    checks: list[CheckResult] = []
    for n in range(3, min(6, config.nmax) + 1):
        starts = _start_points(fam, rng, 5)
        worst = {
            "closure": 0.0,
            "tangency": 0.0,
            "reflection": 0.0,
            "P_spread": 0.0,
            "lambda": 0.0,
        }
        errors: list[str] = []
        isotropic_odd = False
        for root in caustic_roots(fam, n, config.tol):
            if not root.admissible:
                continue
            for start in starts:
                try:
                    trace = trace_orbit(fam, root.lam, start, 0, n)
                except (BilliardError, ConicError) as err:
                    errors.append(f"λ={root.lam:.6g}: {err}")
                    continue
                worst["closure"] = max(worst["closure"], trace.closure_residual)
                worst["tangency"] = max(worst["tangency"], trace.max_tangency_residual)
                worst["reflection"] = max(worst["reflection"], trace.max_reflection_residual)
                worst["P_spread"] = max(worst["P_spread"], trace.P_spread)
                worst["lambda"] = max(worst["lambda"], trace.lambda_residual)
                isotropic_odd |= n % 2 == 1 and any(trace.isotropic_sides)
        detail = ", ".join(f"{key} {value:.3g}" for key, value in worst.items())
        passed = (
            not errors
            and worst["closure"] <= CLOSURE_TOL
            and worst["tangency"] <= STEP_TOL
            and worst["reflection"] <= STEP_TOL
            and worst["P_spread"] <= STEP_TOL
            and worst["lambda"] <= 1e-8
            and not isotropic_odd
        )
        checks.append(_check(f"n={n} Poncelet closure grid", passed, "; ".join(errors) or detail))
    return checks


def negative_control_suite(config: RunConfig) -> list[CheckResult]:
    fam = REFERENCE_FAMILY
    rng = _rng(config, 5)
    roots = [root.lam for root in caustic_roots(fam, 3, config.tol)]
    start = ProjPoint.affine(-fam.a, 0)
    residuals: list[float] = []
    while len(residuals) < 10:
        lam = float(rng.uniform(-0.85, -0.3) if rng.random() < 0.5 else rng.uniform(0.5, 5.0))
        if min(abs(lam - r) for r in roots) < 0.1:
            continue
        residuals.append(trace_orbit(fam, lam, start, 0, 3).closure_residual)
    smallest = min(residuals)
    return [
        _check(
            "non-root λ does not close",
            smallest >= NEGATIVE_CONTROL_MIN_RESIDUAL,
            f"smallest closure residual {smallest:.3g}",
        )
    ]


def degenerate_triangle_suite(config: RunConfig) -> list[CheckResult]:
    triangles = degenerate_triangles(REFERENCE_FAMILY)
    return [
        _check("eight degenerate triangles", len(triangles) == 8, f"found {len(triangles)}"),
        _check("degenerate triangle shape", all(t.valid(STEP_TOL) for t in triangles)),
    ]


def special_quad_suite(config: RunConfig) -> list[CheckResult]:
    fam = REFERENCE_FAMILY
    catalog = special_quad_orbits(fam)
    roots = sorted(root.lam.real for root in caustic_roots(fam, 4, config.tol))
    from_directions = sorted(orbit.lambda_from_direction.real for orbit in catalog.orbits)
    t3 = next(orbit for orbit in catalog.orbits if orbit.index == 3)
    n_pair = [
        ProjPoint.affine(-8 / 3, 1j * math.sqrt(7) / 3),
        ProjPoint.affine(-8 / 3, -1j * math.sqrt(7) / 3),
    ]
    t3_vertices = [t3.trace.vertices[1], t3.trace.vertices[3]]
    pair_ok = min(
        max(t3_vertices[0].distance(n_pair[0]), t3_vertices[1].distance(n_pair[1])),
        max(t3_vertices[0].distance(n_pair[1]), t3_vertices[1].distance(n_pair[0])),
    ) <= 1e-10
    near = special_quad_orbits(ConfocalFamily(NEAR_SQRT2**2, Fraction(1)))
    return [
        _check(
            "λᵢ = -b² v_x² matches the roots of 𝓑⁴",
            len(from_directions) == 3
            and all(abs(x - r) <= 1e-10 for x, r in zip(from_directions, roots)),
            f"{from_directions}",
        ),
        _check("T₃ vertices are (-8/3, ±i√7/3)", pair_ok),
        _check(
            "special orbits close",
            all(orbit.trace.closed() for orbit in catalog.orbits),
        ),
        _check(
            "near a = √2 b the first orbit is reported degenerate",
            bool(near.notes) and all(orbit.index != 1 for orbit in near.orbits),
            "; ".join(near.notes),
        ),
    ]


def focal_suite(config: RunConfig) -> list[CheckResult]:
    fam = REFERENCE_FAMILY
    rng = _rng(config, 6)
    f1, _, g1, _ = foci(fam)
    worst_p, worst_reflection = 0.0, 0.0
    for theta in rng.uniform(0.1, 2 * math.pi - 0.1, config.samples):
        theta = complex(theta, float(rng.uniform(-0.5, 0.5)))
        point = ellipse_point(fam, theta)
        to_real = Direction.of_line(ProjLine.through(point, f1))
        to_complex = Direction.of_line(ProjLine.through(point, g1))
        worst_p = max(
            worst_p,
            abs(joachimsthal(fam, point, to_real) - 1 / float(fam.a2)),
            abs(joachimsthal(fam, point, to_complex) - 1 / float(fam.b2)),
        )
        check = focal_reflection_check(fam, point)
        worst_reflection = max(worst_reflection, check.real, check.complex)
    return [
        _check("P = a⁻² and b⁻² on focal lines", worst_p <= 1e-10, f"max error {worst_p:.3g}"),
        _check(
            "focal lines reflect through the other focus",
            worst_reflection <= 1e-10,
            f"max residual {worst_reflection:.3g}",
        ),
    ]


def family_report_suite(config: RunConfig) -> list[CheckResult]:
    fam = ConfocalFamily(config.a2, config.b2)
    report = degree_report(fam, config.n)
    roots = caustic_roots(fam, config.n, config.tol)
    admissible = sum(1 for root in roots if root.admissible)
    flagged = [f"{root.lam:.6g}" for root in roots if not root.admissible]
    return [
        _check(
            f"N={admissible} <= deg 𝓑^{config.n}={report.degree} <= {report.bound}",
            admissible <= report.degree <= report.bound,
            f"N={admissible}; inadmissible: {', '.join(flagged) or 'none'}",
        )
    ]


SUITE_DESCRIPTIONS: tuple[SuiteDescription, ...] = (
    SuiteDescription(key="algebra", name="Algebra identities", run_fn=algebra_suite),
    SuiteDescription(key="closed_forms", name="Cayley closed forms", run_fn=closed_form_suite),
    SuiteDescription(key="examples", name="Reference examples", run_fn=reference_examples_suite),
    SuiteDescription(key="degree_table", name="Degree table", run_fn=degree_table_suite),
    SuiteDescription(key="root_location", name="Root location", run_fn=root_location_suite),
    SuiteDescription(key="closure_grid", name="Poncelet closure grid", run_fn=closure_grid_suite),
    SuiteDescription(key="negative_control", name="Negative control", run_fn=negative_control_suite),
    SuiteDescription(
        key="degenerate_triangles", name="Degenerate triangles", run_fn=degenerate_triangle_suite
    ),
    SuiteDescription(key="special_quads", name="Special 4-periodic orbits", run_fn=special_quad_suite),
    SuiteDescription(key="focal", name="Focal properties", run_fn=focal_suite),
    SuiteDescription(key="family", name="Family report", run_fn=family_report_suite),
)


def _run_suite(description: SuiteDescription, config: RunConfig) -> SuiteResult:
    started = time.perf_counter()
    try:
        checks = description.run_fn(config)
    except Exception as err:  # noqa: BLE001 - reported as a failed suite
        _LOGGER.exception("Suite %s raised", description.key)
        checks = [_check("suite completed", False, f"{type(err).__name__}: {err}")]
    duration = time.perf_counter() - started
    _LOGGER.debug("Suite %s finished in %.3fs", description.key, duration)
    return SuiteResult(
        key=description.key, name=description.name, checks=tuple(checks), duration=duration
    )


async def async_run_suites(
    config: RunConfig,
    descriptions: tuple[SuiteDescription, ...] = SUITE_DESCRIPTIONS,
    keys: Iterable[str] | None = None,
) -> list[SuiteResult]:
    """Run the selected suites concurrently, results in registration order."""
    wanted = None if keys is None else set(keys)
    selected = [d for d in descriptions if wanted is None or d.key in wanted]
    results = await asyncio.gather(
        *(asyncio.to_thread(_run_suite, description, config) for description in selected)
    )
    failed = [result.key for result in results if not result.passed]
    if failed:
        _LOGGER.warning("Failed suites: %s", ", ".join(failed))
    return list(results)


def summary_payload(results: list[SuiteResult]) -> dict[str, Any]:
    return {
        "passed": all(result.passed for result in results),
        "suites": [result.as_dict() for result in results],
    }