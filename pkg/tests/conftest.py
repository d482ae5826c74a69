import math

import pytest

from jcpm import BiasPoint, DeviceParams


@pytest.fixture(scope="session")
def device():
    return DeviceParams.default()


@pytest.fixture(scope="session")
def parity_points():
    return tuple(BiasPoint(ng1=a, ng2=b, phi_x=2 * math.pi)
                 for a in (0.0, 0.5) for b in (0.0, 0.5))
