from __future__ import annotations

from fractions import Fraction

import pytest

from ellipse_caustics.conics import ConfocalFamily


@pytest.fixture
def family() -> ConfocalFamily:
    """a = 2, b = 1."""
    return ConfocalFamily(Fraction(4), Fraction(1))


@pytest.fixture
def circle() -> ConfocalFamily:
    return ConfocalFamily(Fraction(1), Fraction(1))


@pytest.fixture
def critical_family() -> ConfocalFamily:
    """a = √2·b: the first 4-periodic caustic sits at the forbidden value -a²."""
    return ConfocalFamily(Fraction(2), Fraction(1))
