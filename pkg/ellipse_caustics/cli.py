"""Command-line front end."""
from __future__ import annotations

import argparse
import asyncio
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any

from .algebra import AlgebraError, is_squarefree
from .billiard import BilliardError, IsotropicDegenerationError, OrbitTrace, trace_orbit
from .cayley import (
    CausticRoot,
    CayleyError,
    caustic_roots,
    cayley_polynomial,
    degree_report,
    forbidden_values,
)
from .config import ConfigError, RunConfig
from .conics import ConfocalFamily, ConicError, DegenerateFamilyError, ProjPoint, ellipse_point
from .const import (
    CLOSURE_TOL,
    DEFAULT_N,
    EXIT_CLOSURE_FAILURE,
    EXIT_ISOTROPIC_DEGENERATION,
    EXIT_NUMERIC_FAILURE,
    EXIT_OK,
    EXIT_SUITE_FAILURE,
    EXIT_USAGE,
    OUTPUT_FORMATS,
)
from .data import (
    DataError,
    caustics_to_dict,
    parse_complex,
    parse_point,
    parse_rational,
    root_to_dict,
    trace_to_dict,
)
from .plot import PlotError, caustic_curves, orbit_curves, render
from .verify import SUITE_DESCRIPTIONS, async_run_suites, summary_payload

_LOGGER = logging.getLogger(__name__)

DEFAULT_A = "2"
DEFAULT_B = "1"
PLOT_WHAT = ("caustics", "orbit")


class UsageError(Exception):
    """Flags that parse but do not fit together."""


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING
    if verbosity == 1:
        level = logging.INFO
    elif verbosity > 1:
        level = logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--a", default=DEFAULT_A, help="major semi-axis (decimal or fraction)")
    common.add_argument("--b", default=DEFAULT_B, help="minor semi-axis (decimal or fraction)")
    common.add_argument("--n", type=int, default=DEFAULT_N, help="period of the orbits")
    common.add_argument("--tol", type=float, default=None, help="residual tolerance")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--format", choices=OUTPUT_FORMATS, default=None)
    common.add_argument("--out", default=None, help="write the output to FILE")
    common.add_argument("-v", "--verbose", action="count", default=0)
    return common


def _add_orbit_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--lambda", dest="lam", default=None, help="caustic parameter (fraction, decimal or complex)"
    )
    parser.add_argument("--root", type=int, default=None, help="index into the sorted roots")
    parser.add_argument("--start", default=None, help='start point "x,y" or "x,y,z"')
    parser.add_argument("--theta", default=None, help="start parameter on the ellipse")
    parser.add_argument("--branch", type=int, choices=(0, 1), default=0)


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="ellipse-caustics",
        description="Caustics of periodic complex billiard orbits in an ellipse.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    caustics = commands.add_parser("caustics", parents=[common], help="roots of 𝓑ⁿ")
    caustics.set_defaults(handler=cmd_caustics)

    orbit = commands.add_parser("orbit", parents=[common], help="trace and check an orbit")
    _add_orbit_flags(orbit)
    orbit.set_defaults(handler=cmd_orbit)

    verify = commands.add_parser("verify", parents=[common], help="run the property suites")
    verify.add_argument("--nmax", type=int, default=None)
    verify.add_argument("--samples", type=int, default=None)
    verify.add_argument(
        "--suite",
        action="append",
        choices=[description.key for description in SUITE_DESCRIPTIONS],
        help="run only this suite (repeatable)",
    )
    verify.set_defaults(handler=cmd_verify)

    plot = commands.add_parser("plot", parents=[common], help="draw the real slice")
    _add_orbit_flags(plot)
    plot.add_argument("--what", choices=PLOT_WHAT, default="caustics")
    plot.set_defaults(handler=cmd_plot)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig.from_axes(
        args.a,
        args.b,
        n=args.n,
        tol=args.tol,
        seed=args.seed,
        output_format=args.format,
        nmax=getattr(args, "nmax", None),
        samples=getattr(args, "samples", None),
    )


def _family(config: RunConfig) -> ConfocalFamily:
    return ConfocalFamily(config.a2, config.b2)


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
        return
    Path(out).write_text(text, encoding="utf-8")
    _LOGGER.info("Wrote %s", out)


def _json(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, ensure_ascii=False)


def _csv(header: tuple[str, ...], rows: list[tuple[Any, ...]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _caustics_csv(roots: list[CausticRoot]) -> str:
    rows = []
    for index, root in enumerate(roots):
        payload = root_to_dict(root)
        rows.append(
            (
                index,
                f"{payload['re']:.12g}",
                f"{payload['im']:.12g}",
                root.multiplicity,
                root.admissible,
                root.kind,
                payload.get("exact", ""),
            )
        )
    return _csv(("index", "re", "im", "multiplicity", "admissible", "kind", "exact"), rows)


def cmd_caustics(config: RunConfig, args: argparse.Namespace) -> int:
    """Report 𝓑ⁿ, its roots and their admissibility."""
    if config.output_format not in ("json", "csv"):
        raise UsageError("caustics reports are json or csv")
    fam = _family(config)
    poly = cayley_polynomial(fam, config.n).Bn
    roots = caustic_roots(fam, config.n, config.tol)
    if config.output_format == "csv":
        _emit(_caustics_csv(roots), args.out)
        return EXIT_OK
    payload = caustics_to_dict(
        fam,
        config.n,
        poly,
        roots,
        degree_report(fam, config.n),
        forbidden_values(fam, config.n),
        is_squarefree(poly),
    )
    _emit(_json(payload), args.out)
    return EXIT_OK


def resolve_lambda(
    fam: ConfocalFamily, config: RunConfig, args: argparse.Namespace
) -> complex | Fraction:
    """λ from --lambda or from --root (index into roots sorted by real, then imaginary part)."""
    if (args.lam is None) == (args.root is None):
        raise UsageError("Give exactly one of --lambda and --root")
    if args.lam is not None:
        try:
            return parse_rational(args.lam)
        except DataError:
            return parse_complex(args.lam)
    roots = caustic_roots(fam, config.n, config.tol)
    if not 0 <= args.root < len(roots):
        raise UsageError(f"--root {args.root} is out of range; 𝓑^{config.n} has {len(roots)} roots")
    root = roots[args.root]
    if not root.admissible:
        raise UsageError(f"Root {args.root} (λ={root.lam:.6g}) is not admissible")
    return root.lam


def resolve_start(fam: ConfocalFamily, args: argparse.Namespace) -> ProjPoint:
    if args.start is not None and args.theta is not None:
        raise UsageError("Give at most one of --start and --theta")
    if args.start is not None:
        return parse_point(args.start)
    return ellipse_point(fam, parse_complex(args.theta) if args.theta is not None else 0)


def _trace(config: RunConfig, args: argparse.Namespace) -> OrbitTrace:
    fam = _family(config)
    lam = resolve_lambda(fam, config, args)
    start = resolve_start(fam, args)
    return trace_orbit(fam, lam, start, branch=args.branch, steps=config.n)


def _trace_csv(trace: OrbitTrace) -> str:
    rows = []
    for index, vertex in enumerate(trace.vertices):
        x, y, z = vertex.coords
        rows.append(
            (index, *(f"{value:.12g}" for value in (x.real, x.imag, y.real, y.imag, z.real, z.imag)))
        )
    return _csv(("index", "x_re", "x_im", "y_re", "y_im", "z_re", "z_im"), rows)


def cmd_orbit(config: RunConfig, args: argparse.Namespace) -> int:
    """Trace n sides and check closure and tangency."""
    if config.output_format == "svg":
        raise UsageError("orbit traces are json or csv; use the plot command for svg")
    trace = _trace(config, args)
    text = _trace_csv(trace) if config.output_format == "csv" else _json(trace_to_dict(trace))
    _emit(text, args.out)
    if not trace.closed(CLOSURE_TOL):
        _LOGGER.error("Orbit does not close: residual %.3g", trace.closure_residual)
        return EXIT_CLOSURE_FAILURE
    residuals = {
        "Side tangency": trace.max_tangency_residual,
        "Reflection": trace.max_reflection_residual,
        "Invariant spread": trace.P_spread,
    }
    for name, value in residuals.items():
        if value > config.tol:
            _LOGGER.error("%s residual %.3g exceeds %.3g", name, value, config.tol)
            return EXIT_CLOSURE_FAILURE
    return EXIT_OK


def _verify_csv(payload: dict[str, Any]) -> str:
    rows = [
        (suite["key"], check["name"], check["passed"], check["detail"])
        for suite in payload["suites"]
        for check in suite["checks"]
    ]
    return _csv(("suite", "check", "passed", "detail"), rows)


def cmd_verify(config: RunConfig, args: argparse.Namespace) -> int:
    """Run the property suites; JSON report on the output, summary on stderr."""
    if config.output_format == "svg":
        raise UsageError("verify reports are json or csv")
    results = asyncio.run(async_run_suites(config, keys=args.suite))
    payload = summary_payload(results)
    _emit(_verify_csv(payload) if config.output_format == "csv" else _json(payload), args.out)
    for result in results:
        failed = sum(1 for check in result.checks if not check.passed)
        status = "ok" if result.passed else f"FAILED ({failed})"
        print(f"{result.name}: {len(result.checks)} checks {status}", file=sys.stderr)
    return EXIT_OK if payload["passed"] else EXIT_SUITE_FAILURE


def cmd_plot(config: RunConfig, args: argparse.Namespace) -> int:
    """SVG or CSV of the ellipse with its caustics, or of one orbit."""
    fmt = args.format or "svg"
    fam = _family(config)
    title = f"a²={fam.a2}, b²={fam.b2}, n={config.n}"
    if args.what == "caustics":
        curves = caustic_curves(fam, caustic_roots(fam, config.n, config.tol))
        notes: list[str] = []
    else:
        curves, notes = orbit_curves(_trace(config, args))
    _emit(render(curves, fmt, title, notes), args.out)
    return EXIT_OK


def exit_code_for(err: Exception) -> int:
    if isinstance(err, IsotropicDegenerationError):
        return EXIT_ISOTROPIC_DEGENERATION
    if isinstance(
        err, (UsageError, ConfigError, DataError, PlotError, CayleyError, DegenerateFamilyError)
    ):
        return EXIT_USAGE
    return EXIT_NUMERIC_FAILURE


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose)
    try:
        config = config_from_args(args)
        return args.handler(config, args)
    except (
        UsageError,
        ConfigError,
        DataError,
        PlotError,
        AlgebraError,
        CayleyError,
        ConicError,
        BilliardError,
    ) as err:
        _LOGGER.error("%s: %s", type(err).__name__, err)
        return exit_code_for(err)
