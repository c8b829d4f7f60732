import math

import numpy as np
import pytest

import quasiminimal as qm


@pytest.fixture
def rng():
    """
    Seeded random generator for reproducible test points.
    """
    return np.random.default_rng(42)


@pytest.fixture
def slope():
    return qm.flows.SlopeParam.from_alpha(math.sqrt(2.0))


@pytest.fixture
def linear_field(slope):
    return qm.flows.CompositeField(slope)


@pytest.fixture
def puncture_field(slope):
    """
    One puncture at the centre with a small slowing disk.
    """
    F = qm.flows.PunctureSet((qm.torus.TorusPoint(0.5, 0.5),), r0=0.01)
    return qm.flows.build_punctured_field(slope, F, 50)


@pytest.fixture
def two_puncture_field(slope):
    F = qm.flows.PunctureSet(
        (qm.torus.TorusPoint(0.0, 0.0), qm.torus.TorusPoint(0.0, 0.5)), r0=0.01
    )
    return qm.flows.build_punctured_field(slope, F, 50)
