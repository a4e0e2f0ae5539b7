import math

import pytest

from blochpath.classical import integrate_classical
from blochpath.core import SimConfig


@pytest.fixture(scope="session")
def traj_w5():
    """Exact classical path, omega = 5, 256 samples per drive period, t in [0, pi]."""
    return integrate_classical(SimConfig(omega=5.0, t_end=math.pi, samples_per_drive_period=256))
