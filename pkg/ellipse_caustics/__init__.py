"""Caustics of periodic complex billiard orbits in an ellipse."""
from __future__ import annotations

from .billiard import OrbitTrace, trace_orbit
from .cayley import CausticRoot, caustic_roots, cayley_polynomial, degree_report
from .config import RunConfig
from .conics import ConfocalFamily, ProjLine, ProjPoint, conic_of

__all__ = [
    "CausticRoot",
    "ConfocalFamily",
    "OrbitTrace",
    "ProjLine",
    "ProjPoint",
    "RunConfig",
    "caustic_roots",
    "cayley_polynomial",
    "conic_of",
    "degree_report",
    "trace_orbit",
]
