"""Validated run configuration."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import voluptuous as vol

from .const import (
    CONF_A2,
    CONF_B2,
    CONF_FORMAT,
    CONF_N,
    CONF_NMAX,
    CONF_SAMPLES,
    CONF_SEED,
    CONF_TOL,
    DEFAULT_FORMAT,
    DEFAULT_N,
    DEFAULT_NMAX,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_TOL,
    OUTPUT_FORMATS,
)
from .data import DataError, parse_rational


class ConfigError(Exception):
    """Invalid run configuration."""


def _positive_rational(value: Any) -> Fraction:
    try:
        number = parse_rational(value)
    except DataError as err:
        raise vol.Invalid(str(err)) from err
    if number <= 0:
        raise vol.Invalid(f"must be positive, got {number}")
    return number


RUN_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_A2): _positive_rational,
        vol.Required(CONF_B2): _positive_rational,
        vol.Optional(CONF_N, default=DEFAULT_N): vol.All(vol.Coerce(int), vol.Range(min=3)),
        vol.Optional(CONF_TOL, default=DEFAULT_TOL): vol.All(
            vol.Coerce(float), vol.Range(min=0, min_included=False)
        ),
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): vol.Coerce(int),
        vol.Optional(CONF_FORMAT, default=DEFAULT_FORMAT): vol.In(OUTPUT_FORMATS),
        vol.Optional(CONF_NMAX, default=DEFAULT_NMAX): vol.All(vol.Coerce(int), vol.Range(min=3)),
        vol.Optional(CONF_SAMPLES, default=DEFAULT_SAMPLES): vol.All(
            vol.Coerce(int), vol.Range(min=1)
        ),
    }
)


@dataclass(frozen=True)
class RunConfig:
    """Parameters shared by the command-line subcommands."""

    a2: Fraction
    b2: Fraction
    n: int = DEFAULT_N
    tol: float = DEFAULT_TOL
    seed: int = DEFAULT_SEED
    output_format: str = DEFAULT_FORMAT
    nmax: int = DEFAULT_NMAX
    samples: int = DEFAULT_SAMPLES

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> RunConfig:
        """Validate and build; None values fall back to defaults."""
        cleaned = {key: value for key, value in data.items() if value is not None}
        try:
            valid = RUN_CONFIG_SCHEMA(cleaned)
        except vol.Invalid as err:
            raise ConfigError(f"Invalid configuration: {err}") from err
        return cls(
            a2=valid[CONF_A2],
            b2=valid[CONF_B2],
            n=valid[CONF_N],
            tol=valid[CONF_TOL],
            seed=valid[CONF_SEED],
            output_format=valid[CONF_FORMAT],
            nmax=valid[CONF_NMAX],
            samples=valid[CONF_SAMPLES],
        )

    @classmethod
    def from_axes(cls, a: Any, b: Any, **options: Any) -> RunConfig:
        """Build from semi-axis literals, squaring them exactly."""
        try:
            a_value, b_value = parse_rational(a), parse_rational(b)
        except DataError as err:
            raise ConfigError(f"Invalid semi-axis: {err}") from err
        if a_value <= 0 or b_value <= 0:
            raise ConfigError(f"Semi-axes must be positive, got {a_value} and {b_value}")
        return cls.from_mapping({CONF_A2: a_value * a_value, CONF_B2: b_value * b_value, **options})
