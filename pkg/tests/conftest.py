import numpy as np
import pytest

from takeover.scenario import build_scenario
from takeover.vehicle import VehicleParams, build_system_matrices


@pytest.fixture(scope="session")
def params():
    return VehicleParams()


@pytest.fixture(scope="session")
def model(params):
    return build_system_matrices(params)


@pytest.fixture(scope="session")
def lane_change(params):
    return build_scenario("lane_change", speed=params.speed)


@pytest.fixture(scope="session")
def double_lane_change(params):
    return build_scenario("double_lane_change", speed=params.speed)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
