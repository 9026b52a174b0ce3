"""
Shared fixtures: the wire scenario (line charge on the z-axis inside a
uniform axial B) and its variants, built in code and from scenarios/.
"""

import math
from pathlib import Path

import numpy as np
import pytest

from core.fieldlab import catalog_field, superpose, zero_field
from core.paths import circle, half_circle
from core.scenario import ParticleProperties, make_scenario

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"

LAMBDA = 2.0
B0 = 3.0
ALPHA = 1e-3
WIRE_PHASE = ALPHA * LAMBDA * B0          # 6e-3


def uniform(vector):
    """Uniform catalog field equal to `vector` everywhere (zero field for 0)."""
    vector = np.asarray(vector, dtype=float)
    magnitude = float(np.linalg.norm(vector))
    if magnitude == 0.0:
        return zero_field()
    return catalog_field("uniform", {"magnitude": magnitude}, axis_dir=vector / magnitude)


def wire_scenario(alpha=ALPHA, extra_E=(), arms=("upper", "lower"), loop=None, mass=1.0):
    E = superpose([catalog_field("line_charge_E", {"density": LAMBDA}), *extra_E])
    B = catalog_field("uniform", {"magnitude": B0})
    paths = [loop or circle("loop"), half_circle("upper", upper=True), half_circle("lower", upper=False)]
    return make_scenario(
        ParticleProperties(mass=mass, alpha=alpha),
        E, B, paths,
        arm_pairs=[arms] if arms else (),
    )


def uniform_scenario(E=(1.0, 0.0, 0.0), B=(0.0, 0.0, 3.0), alpha=ALPHA, chi=0.0, mass=1.0, paths=None):
    return make_scenario(
        ParticleProperties(mass=mass, alpha=alpha, chi=chi),
        uniform(E), uniform(B),
        paths if paths is not None else [circle("loop")],
    )


def dynamical_arm_phase(radius, alpha=ALPHA, speed=0.01, angle=math.pi):
    """1/2 alpha (lambda / 2 pi r)^2 integrated over an arc of the given angle at speed v0."""
    return 0.5 * alpha * (LAMBDA / (2.0 * math.pi * radius)) ** 2 * angle * radius / speed


@pytest.fixture
def wire():
    return wire_scenario()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def scenario_file():
    def _path(name):
        return SCENARIOS / f"{name}.json"
    return _path
