"""Shared constructions for the test suite."""

import math

from radarnet.worldline import make_cloud


def track_fixture():
    """Five clouds along x(t) = (10 t, 0) seen from 30 m south, plus two far outliers."""
    clouds = []
    for k in range(5):
        t = 2.0 * k
        observer = (10.0 * t, -30.0, math.pi / 2)
        report = ((-math.radians(3), math.radians(3)), (27.0, 33.0), (t - 0.1, t + 0.1))
        clouds.append(make_cloud(report, observer, cloud_id=k))
    clouds.append(make_cloud(((-0.05, 0.05), (90, 110), (1.9, 2.1)), (500.0, 500.0, 0.0), cloud_id=5))
    clouds.append(make_cloud(((-0.05, 0.05), (90, 110), (5.9, 6.1)), (-400.0, 300.0, 1.0), cloud_id=6))
    return clouds
