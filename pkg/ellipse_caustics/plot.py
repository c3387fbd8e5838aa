"""SVG and CSV renderings of the real slice of the confocal family."""
from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .billiard import OrbitTrace  # noqa: E402
from .cayley import KIND_COMPLEX, KIND_ELLIPSE, CausticRoot, classify_caustic  # noqa: E402
from .conics import ConfocalFamily  # noqa: E402
from .const import PLOT_FIGSIZE, PLOT_SAMPLES, PLOT_SVG_HASH_SALT  # noqa: E402

_LOGGER = logging.getLogger(__name__)

PLOT_FORMATS = ("svg", "csv")
COMPLEX_NOTE = "complex vertices drawn by their real parts only"
# Hyperbola branches are drawn out to this multiple of the major semi-axis.
_HYPERBOLA_REACH = 1.6


class PlotError(Exception):
    """Nothing drawable or unsupported output format."""


@dataclass(frozen=True)
class Curve:
    """Polyline in the real plane."""

    label: str
    segment: int
    x: np.ndarray
    y: np.ndarray
    style: str = "-"


def _rounded(values: np.ndarray) -> np.ndarray:
    return np.round(values, 6) + 0.0


def conic_curves(fam: ConfocalFamily, lam: complex, label: str, samples: int = PLOT_SAMPLES) -> list[Curve]:
    """Real points of 𝓒_λ: one closed curve for an ellipse, two branches for a hyperbola."""
    kind = classify_caustic(fam, lam)
    if kind == KIND_COMPLEX:
        return []
    pa, pb = float(fam.a2) + complex(lam).real, float(fam.b2) + complex(lam).real
    if kind == KIND_ELLIPSE:
        t = np.linspace(0.0, 2 * math.pi, samples)
        return [Curve(label, 0, _rounded(math.sqrt(pa) * np.cos(t)), _rounded(math.sqrt(pb) * np.sin(t)))]
    reach = _HYPERBOLA_REACH * max(fam.a, fam.b)
    axis, other = (pa, -pb) if pa > 0 else (pb, -pa)
    s = np.linspace(-1.0, 1.0, samples) * math.acosh(max(reach / math.sqrt(axis), 1.0 + 1e-9))
    along, across = math.sqrt(axis) * np.cosh(s), math.sqrt(other) * np.sinh(s)
    curves = []
    for segment, sign in enumerate((1.0, -1.0)):
        x, y = (sign * along, across) if pa > 0 else (across, sign * along)
        curves.append(Curve(label, segment, _rounded(x), _rounded(y)))
    return curves


def caustic_curves(fam: ConfocalFamily, roots: list[CausticRoot]) -> list[Curve]:
    curves = conic_curves(fam, 0, "ellipse")
    for root in roots:
        if root.admissible:
            curves += conic_curves(fam, root.lam, f"λ={root.lam.real:.6f}")
    return curves


def orbit_curves(trace: OrbitTrace) -> tuple[list[Curve], list[str]]:
    """Ellipse, caustic and the orbit polygon; notes flag what the real slice hides."""
    notes: list[str] = []
    curves = conic_curves(trace.fam, 0, "ellipse")
    curves += conic_curves(trace.fam, trace.lam, f"λ={trace.lam.real:.6f}")
    finite = [v.to_affine() for v in trace.vertices if v.is_finite()]
    if any(abs(x.imag) > 1e-9 or abs(y.imag) > 1e-9 for x, y in finite):
        notes.append(COMPLEX_NOTE)
    if trace.infinite_vertices:
        notes.append(f"vertices at infinity omitted: {list(trace.infinite_vertices)}")
    if finite:
        xs = _rounded(np.array([x.real for x, _ in finite]))
        ys = _rounded(np.array([y.real for _, y in finite]))
        curves.append(Curve("orbit", 0, xs, ys, "o-"))
    return curves, notes


def render_csv(curves: list[Curve]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(("curve", "segment", "index", "x", "y"))
    for curve in curves:
        for index, (x, y) in enumerate(zip(curve.x, curve.y)):
            writer.writerow((curve.label, curve.segment, index, f"{x:.6f}", f"{y:.6f}"))
    return buffer.getvalue()


def render_svg(curves: list[Curve], title: str, notes: list[str] | None = None) -> str:
    """Deterministic SVG: fixed figure size, hash salt and no date metadata."""
    with matplotlib.rc_context({"svg.hashsalt": PLOT_SVG_HASH_SALT, "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=PLOT_FIGSIZE)
        seen: set[str] = set()
        for curve in curves:
            label = None if curve.label in seen else curve.label
            seen.add(curve.label)
            ax.plot(curve.x, curve.y, curve.style, linewidth=1, markersize=3, label=label)
        ax.set_aspect("equal", "datalim")
        ax.set_title(title)
        ax.legend(loc="upper right", fontsize="small")
        for offset, note in enumerate(notes or ()):
            fig.text(0.01, 0.01 + 0.04 * offset, note, fontsize="x-small")
        buffer = io.StringIO()
        fig.savefig(buffer, format="svg", metadata={"Date": None})
        plt.close(fig)
    return buffer.getvalue()


def render(curves: list[Curve], fmt: str, title: str, notes: list[str] | None = None) -> str:
    if fmt not in PLOT_FORMATS:
        raise PlotError(f"Plots are rendered as svg or csv, not {fmt!r}")
    if not curves:
        raise PlotError("Nothing real to draw")
    _LOGGER.debug("Rendering %d curves as %s", len(curves), fmt)
    if fmt == "csv":
        return render_csv(curves)
    return render_svg(curves, title, notes)
