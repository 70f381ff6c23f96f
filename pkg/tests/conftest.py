"""Shared fixtures: the built-in weights and symbol family, seeded point sets."""

import numpy as np
import pytest

from bhl.symbols import parse_symbol
from bhl.weights import RadialWeight


@pytest.fixture(scope="session")
def st0():
    return RadialWeight.parse("standard:eta=0")


@pytest.fixture(scope="session")
def st1():
    return RadialWeight.parse("standard:eta=1")


@pytest.fixture(scope="session")
def logpow():
    return RadialWeight.parse("logpow:alpha=-0.5,beta=0")


@pytest.fixture(scope="session")
def family():
    return [parse_symbol(s) for s in ("zbar", "zbar2", "absz2", "rez")]


def disc_points(count, r_max=0.9, seed=0):
    """Seeded, area-uniform sample of the disc of radius r_max."""
    rng = np.random.default_rng(seed)
    radii = r_max * np.sqrt(rng.random(count))
    angles = 2.0 * np.pi * rng.random(count)
    return radii * np.exp(1j * angles)
