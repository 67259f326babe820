import math

import pytest

from src.core import observable_from_angles
from src.models.quantum import QubitState
from src.noise import DisturbanceKernel
from src.simulate import ModelSpec, Protocol


@pytest.fixture
def obs_z():
    return observable_from_angles(0.0, 0.0, "A")


@pytest.fixture
def obs_x():
    return observable_from_angles(math.pi / 2, 0.0, "B")


@pytest.fixture
def orthogonal_protocol(obs_z, obs_x):
    return Protocol(obs_z, obs_x, dt=1.0, max_steps=22)


@pytest.fixture
def transmissive_protocol(obs_z, obs_x):
    return Protocol(obs_z, obs_x, dt=1.0, max_steps=22, mode="transmissive")


@pytest.fixture
def qm_model(obs_z):
    return ModelSpec.quantum(QubitState.eigenstate(obs_z))


@pytest.fixture
def hv_model():
    """Redraw noise with tau = 10 dt for dt = 1."""
    return ModelSpec.hidden_variable(10.0, DisturbanceKernel("redraw"))
