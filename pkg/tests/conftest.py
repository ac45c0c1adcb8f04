import numpy as np
import pytest

from micropolar.config import RunConfig
from micropolar.profiles import build_composite
from micropolar.riemann import EndStates, solve_pattern
from micropolar.thermo import GasParams, ThermoState


@pytest.fixture(scope="session")
def params():
    return GasParams(R=1.0, gamma=5.0 / 3.0, kappa=1.0, A=1.0, B=1.0)


@pytest.fixture(scope="session")
def config():
    return RunConfig()


@pytest.fixture(scope="session")
def pattern(params, config):
    return solve_pattern(params, config.end_states.to_end_states())


@pytest.fixture(scope="session")
def composite(params, pattern):
    return build_composite(params, pattern)


@pytest.fixture(scope="session")
def strong_pattern(params, config):
    return solve_pattern(params, config.diagnostics.residual_end_states.to_end_states())


@pytest.fixture(scope="session")
def strong_composite(params, strong_pattern):
    return build_composite(params, strong_pattern)


@pytest.fixture(scope="session")
def flat_composite(params):
    """delta = 0 and no rarefactions: a constant state."""
    s = ThermoState(v=1.5, u=0.2, theta=1.2)
    return build_composite(params, solve_pattern(params, EndStates(s, s)))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
