import numpy as np
import pytest
from hypothesis import settings

from isacsim.arrays import ArrayGeometry
from isacsim.channels import ScenarioConfig

settings.register_profile("ci", deadline=None, max_examples=50)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def geom16():
    return ArrayGeometry.nominal(16)


@pytest.fixture(scope="session")
def default_cfg():
    return ScenarioConfig()


def relative_error(a, b):
    return np.abs(a - b) / max(np.abs(b), 1e-300)
