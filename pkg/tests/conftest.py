import pytest

from tdot.domain.models import ModelParams


@pytest.fixture
def static_params():
    return ModelParams(h=0.5, eps_d=-1.0, g0=0.5, g1=0.0, omega=1.0)


@pytest.fixture
def driven_params():
    return ModelParams(h=0.5, eps_d=-1.0, g0=0.5, g1=0.25, omega=1.0)


@pytest.fixture
def weak_params():
    return ModelParams(h=0.5, eps_d=-1.0, g0=0.5, g1=0.01, omega=1.0)


@pytest.fixture
def inband_params():
    return ModelParams(h=0.5, eps_d=-0.25, g0=0.5, g1=0.1, omega=1.0)


@pytest.fixture
def free_params():
    return ModelParams(h=0.5, eps_d=-1.0, g0=0.0, g1=0.0, omega=1.0)
