import math

import numpy as np
import pytest

from thickknot import DiscreteCurve, resample, round_circle


@pytest.fixture
def unit_circle():
    return round_circle(1.0, 512)


@pytest.fixture
def coarse_circle():
    return round_circle(1.0, 64)


def make_clasp(n_per_hook=160, tube_radius=0.3):
    """Two interlocked unit semicircular hooks at waist distance 1.

    Hook A opens upward in the xz-plane with its lowest point at the
    origin (tangent along x there); hook B opens downward in the yz-plane
    with its apex at (0, 0, 1).  Two-strand open record; the waist chord is
    orthogonal to both tangents, so r2 is 1.
    """
    a = [(1.0, 0.0, z) for z in np.linspace(3.0, 1.0, 30, endpoint=False)]
    a += [
        (math.cos(t), 0.0, 1.0 - math.sin(t))
        for t in np.linspace(0.0, math.pi, 60)
    ]
    a += [(-1.0, 0.0, z) for z in np.linspace(1.0, 3.0, 30)[1:]]
    b = [(0.0, 1.0, z) for z in np.linspace(-2.0, 0.0, 30, endpoint=False)]
    b += [
        (0.0, math.cos(t), math.sin(t))
        for t in np.linspace(0.0, math.pi, 60)
    ]
    b += [(0.0, -1.0, z) for z in np.linspace(0.0, -2.0, 30)[1:]]
    pts = np.vstack([np.asarray(a), np.asarray(b)])
    curve = DiscreteCurve(pts, closed=False, tube_radius=tube_radius, breaks=(len(a),))
    return resample(curve, 2 * n_per_hook)


def make_peanut(waist=1.2, n=256, tube_radius=0.05):
    """Closed planar two-lobe curve whose waist chord has length ``waist``."""
    b = 0.9
    a = 0.5 * waist + b
    t = np.linspace(0.0, 2.0 * math.pi, 720, endpoint=False)
    r = a + b * np.cos(2.0 * t)
    pts = np.stack([r * np.cos(t), r * np.sin(t), np.zeros_like(t)], axis=1)
    return resample(DiscreteCurve(pts, closed=True, tube_radius=tube_radius), n)


@pytest.fixture
def clasp():
    return make_clasp()


@pytest.fixture
def peanut():
    return make_peanut()
