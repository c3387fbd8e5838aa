"""Literal parsing and JSON payload helpers."""
from __future__ import annotations

from fractions import Fraction
from typing import Any

from .algebra import AlgebraError, PolyQ
from .billiard import Direction, OrbitTrace, invariant_at
from .cayley import CausticRoot, DegreeReport, ForbiddenValues
from .conics import (
    ConfocalFamily,
    ConicError,
    ProjLine,
    ProjPoint,
    conic_of,
    tangency_residual,
)


class DataError(Exception):
    """Unparsable literal or malformed payload."""


def _require(payload: Any, key: str, expected: type) -> Any:
    value = payload.get(key) if isinstance(payload, dict) else None
    if not isinstance(value, expected):
        raise DataError(f"Payload has no {key}")
    return value


def parse_rational(value: Any) -> Fraction:
    """Exact Fraction from an int, Fraction, or decimal/fraction literal ("1.5" -> 3/2)."""
    if isinstance(value, bool):
        raise DataError(f"Not a rational literal: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        stripped = value.strip()
        try:
            return Fraction(stripped)
        except (ValueError, ZeroDivisionError) as err:
            raise DataError(f"Not a rational literal: {value!r}") from err
    raise DataError(f"Not a rational literal: {value!r}")


def parse_complex(value: Any) -> complex:
    """Complex number from a literal such as "1.5", "-2+0.5j" or "0.3-1i"."""
    if isinstance(value, bool):
        raise DataError(f"Not a complex literal: {value!r}")
    if isinstance(value, (int, float, complex, Fraction)):
        return complex(value)
    if isinstance(value, str):
        stripped = value.strip().replace(" ", "").replace("i", "j")
        if stripped == "":
            raise DataError("Empty complex literal")
        try:
            return complex(stripped)
        except ValueError as err:
            raise DataError(f"Not a complex literal: {value!r}") from err
    raise DataError(f"Not a complex literal: {value!r}")


def parse_point(value: str) -> ProjPoint:
    """Point from "x,y" (affine) or "x,y,z" (homogeneous) complex literals."""
    parts = [parse_complex(part) for part in value.split(",")]
    try:
        if len(parts) == 2:
            return ProjPoint.affine(*parts)
        if len(parts) == 3:
            return ProjPoint(parts)
    except ConicError as err:
        raise DataError(f"Invalid point {value!r}: {err}") from err
    raise DataError(f"A point needs 2 or 3 coordinates, got {value!r}")


def fraction_to_str(value: Fraction) -> str:
    return str(Fraction(value))


def complex_to_dict(value: complex) -> dict[str, float]:
    value = complex(value)
    return {"re": value.real + 0.0, "im": value.imag + 0.0}


def _coords(obj: ProjPoint | ProjLine) -> list[list[float]]:
    return [[c.real + 0.0, c.imag + 0.0] for c in obj.coords]


def _from_coords(pairs: Any) -> list[complex]:
    if not isinstance(pairs, list) or len(pairs) != 3:
        raise DataError(f"Homogeneous triple expected, got {pairs!r}")
    try:
        return [complex(float(re), float(im)) for re, im in pairs]
    except (TypeError, ValueError) as err:
        raise DataError(f"Malformed coordinates {pairs!r}") from err


def family_to_dict(fam: ConfocalFamily) -> dict[str, str]:
    return {"a2": fraction_to_str(fam.a2), "b2": fraction_to_str(fam.b2)}


def family_from_dict(payload: dict[str, Any]) -> ConfocalFamily:
    family = _require(payload, "family", dict)
    try:
        return ConfocalFamily(parse_rational(family.get("a2")), parse_rational(family.get("b2")))
    except ConicError as err:
        raise DataError(f"Invalid family: {err}") from err


def polynomial_to_list(poly: PolyQ) -> list[str]:
    return [fraction_to_str(c) for c in poly.coeffs]


def polynomial_from_list(values: list[Any]) -> PolyQ:
    try:
        return PolyQ(tuple(parse_rational(v) for v in values))
    except AlgebraError as err:
        raise DataError(f"Invalid polynomial: {err}") from err


def root_to_dict(root: CausticRoot) -> dict[str, Any]:
    payload: dict[str, Any] = {
        **complex_to_dict(root.lam),
        "multiplicity": root.multiplicity,
        "admissible": root.admissible,
        "kind": root.kind,
    }
    if root.exact is not None:
        payload["exact"] = fraction_to_str(root.exact)
    return payload


def caustics_to_dict(
    fam: ConfocalFamily,
    n: int,
    poly: PolyQ,
    roots: list[CausticRoot],
    report: DegreeReport,
    forbidden: ForbiddenValues,
    squarefree: bool,
) -> dict[str, Any]:
    """Caustics report with stable field names."""
    return {
        "family": family_to_dict(fam),
        "n": n,
        "polynomial": polynomial_to_list(poly),
        "roots": [root_to_dict(root) for root in roots],
        "N": sum(1 for root in roots if root.admissible),
        "degree": report.degree,
        "expected_generic": report.expected_generic,
        "bound": report.bound,
        "circle": report.circle,
        "squarefree": squarefree,
        "forbidden": {
            "at_minus_a2": fraction_to_str(forbidden.at_minus_a2),
            "at_minus_b2": fraction_to_str(forbidden.at_minus_b2),
        },
    }


def trace_to_dict(trace: OrbitTrace) -> dict[str, Any]:
    """Orbit trace with homogeneous coordinates as [re, im] pairs."""
    return {
        "family": family_to_dict(trace.fam),
        "lambda": complex_to_dict(trace.lam),
        "n": trace.steps,
        "branch": trace.branch,
        "vertices": [_coords(vertex) for vertex in trace.vertices],
        "sides": [_coords(side) for side in trace.sides],
        "P_values": [complex_to_dict(p) for p in trace.invariants_P],
        "closure_residual": trace.closure_residual,
        "residuals": {
            "reflection": list(trace.reflection_residuals),
            "tangency": list(trace.tangency_residuals),
            "P_spread": trace.P_spread,
            "lambda": trace.lambda_residual if trace.invariants_P else None,
        },
        "self_reflections": list(trace.self_reflections),
        "infinite_vertices": list(trace.infinite_vertices),
        "isotropic_sides": [bool(flag) for flag in trace.isotropic_sides],
    }


def recheck_trace_payload(payload: dict[str, Any]) -> dict[str, Any]:
    """Recompute sides, tangency residuals, P values and closure from emitted vertices."""
    fam = family_from_dict(payload)
    lam_payload = _require(payload, "lambda", dict)
    lam = complex(float(lam_payload.get("re", 0.0)), float(lam_payload.get("im", 0.0)))
    raw_vertices = _require(payload, "vertices", list)
    if len(raw_vertices) < 2:
        raise DataError("A trace needs at least two vertices")
    try:
        vertices = [ProjPoint(_from_coords(pairs)) for pairs in raw_vertices]
        caustic = conic_of(fam, lam)
        sides = []
        for k in range(len(vertices) - 1):
            sides.append(ProjLine.through(vertices[k], vertices[k + 1]))
    except ConicError as err:
        raise DataError(f"Trace cannot be rechecked: {err}") from err
    invariants = []
    for k, side in enumerate(sides):
        direction = Direction.of_line(side)
        if direction.is_isotropic():
            continue
        for vertex in (vertices[k], vertices[k + 1]):
            if vertex.is_finite():
                invariants.append(invariant_at(fam, vertex, direction))
    return {
        "closure_residual": vertices[-1].distance(vertices[0]),
        "tangency": [tangency_residual(side, caustic) for side in sides],
        "P_values": invariants,
        "reported_P_values": [complex(p["re"], p["im"]) for p in payload.get("P_values") or []],
        "reported_tangency": (payload.get("residuals") or {}).get("tangency") or [],
    }
