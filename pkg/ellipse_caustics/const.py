"""Constants for the ellipse caustics toolkit."""
from __future__ import annotations

DOMAIN = "ellipse_caustics"

CONF_A2 = "a2"
CONF_B2 = "b2"
CONF_N = "n"
CONF_TOL = "tol"
CONF_SEED = "seed"
CONF_FORMAT = "output_format"
CONF_NMAX = "nmax"
CONF_SAMPLES = "samples"

DEFAULT_N = 3
DEFAULT_TOL = 1e-9
DEFAULT_SEED = 0
DEFAULT_FORMAT = "json"
DEFAULT_NMAX = 9
DEFAULT_SAMPLES = 20

OUTPUT_FORMATS: tuple[str, ...] = ("json", "csv", "svg")

# Tolerance ladder. Residuals are relative to canonically normalised objects.
CONSTRUCTION_TOL = 1e-12
STEP_TOL = 1e-9
CLOSURE_TOL = 1e-7
ON_CONIC_TOL = 1e-8
INFINITY_TOL = 1e-9
FORBIDDEN_LAMBDA_TOL = 1e-12
SELF_REFLECTION_TOL = 1e-6
NEAR_DEGENERATE_TOL = 1e-9
NEGATIVE_CONTROL_MIN_RESIDUAL = 1e-3

ROOT_TOL = 1e-12
ROOT_MAX_ITERATIONS = 500
ROOT_POLISH_STEPS = 2
ROOT_CLUSTER_RATIO = 1e-6
# Fixed angular offset of the initial circle of iterates (keeps the start
# off any symmetry axis of real polynomials).
ROOT_ANGLE_OFFSET = 0.4

PLOT_SAMPLES = 400
PLOT_SVG_HASH_SALT = DOMAIN
PLOT_FIGSIZE = (6.0, 4.5)

EXIT_OK = 0
EXIT_SUITE_FAILURE = 1
EXIT_USAGE = 2
EXIT_NUMERIC_FAILURE = 3
EXIT_CLOSURE_FAILURE = 4
EXIT_ISOTROPIC_DEGENERATION = 5
