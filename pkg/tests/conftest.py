import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from holotransit.domains import disk_region, unit_disk
from holotransit.geometry import ClosedPolyline
from holotransit.symbols import Composite, Mobius

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def square(center=0j, side=1.0, clockwise=False, per_edge=4):
    """Axis-aligned square with per_edge vertices on each side."""
    h = side / 2
    corners = [center + complex(-h, -h), center + complex(h, -h),
               center + complex(h, h), center + complex(-h, h)]
    pts = []
    for a, b in zip(corners, corners[1:] + corners[:1]):
        pts += [a + (b - a) * k / per_edge for k in range(per_edge)]
    v = np.array(pts)
    return ClosedPolyline(v[::-1] if clockwise else v)


PHI = Mobius(1, 0.5, 0.5, 1)


@pytest.fixture
def phi():
    return PHI


@pytest.fixture
def hyperbolic_pair():
    return [PHI, Composite((PHI, PHI))]


@pytest.fixture
def disk_domain():
    return unit_disk()


@pytest.fixture
def k_small():
    return disk_region(0, 0.3)
