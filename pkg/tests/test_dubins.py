import math

import numpy as np
import pytest

from thickknot import Configuration, solve_dubins
from thickknot.errors import NonPlanarInput

from _oracles import dubins_grid_oracle


def cfg2d(x, y, theta, frame=None):
    """Planar configuration lifted into 3D, optionally through a rotation."""
    pos = np.array([x, y, 0.0])
    tan = np.array([math.cos(theta), math.sin(theta), 0.0])
    if frame is not None:
        pos = frame @ pos
        tan = frame @ tan
    return Configuration(pos, tan)


def test_identity_configuration():
    a = cfg2d(0, 0, 0.3)
    path = solve_dubins(a, a)
    assert path.total_length == 0.0
    assert path.segments == ()


def test_collinear_straight():
    path = solve_dubins(cfg2d(0, 0, 0), cfg2d(10, 0, 0))
    assert path.total_length == pytest.approx(10.0, abs=1e-12)
    assert [s.kind for s in path.segments] == ["S"]


def test_cap_configuration_is_ccc():
    start = Configuration((0, 0, 0), (0, 0, 1))
    end = Configuration((1, 0, 0), (0, 0, -1))
    path = solve_dubins(start, end)
    assert path.family == "CCC"
    oracle = dubins_grid_oracle((0, 0), 0.5 * math.pi, (1, 0), -0.5 * math.pi)
    assert path.total_length == pytest.approx(oracle, abs=1e-3)


def test_curvature_never_exceeds_one():
    rng = np.random.default_rng(0)
    for _ in range(25):
        a = cfg2d(0, 0, rng.uniform(0, 2 * math.pi))
        b = cfg2d(*rng.uniform(-4, 4, 2), rng.uniform(0, 2 * math.pi))
        path = solve_dubins(a, b)
        for seg in path.segments:
            assert abs(seg.signed_curvature) <= 1
        pts = path.sample(0.05)
        # discrete check along the samples
        d = np.diff(pts, axis=0)
        ld = np.linalg.norm(d, axis=1)
        cosphi = np.einsum("ij,ij->i", d[:-1], d[1:]) / (ld[:-1] * ld[1:])
        kappa = np.sqrt(np.clip(2 * (1 - np.clip(cosphi, -1, 1)), 0, None)) / (
            0.5 * (ld[:-1] + ld[1:])
        )
        assert kappa.max() <= 1.0 + 1e-6


def test_endpoints_and_tangents_met():
    rng = np.random.default_rng(1)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    for _ in range(20):
        a = cfg2d(0, 0, rng.uniform(0, 2 * math.pi), frame=q)
        b = cfg2d(*rng.uniform(-5, 5, 2), rng.uniform(0, 2 * math.pi), frame=q)
        path = solve_dubins(a, b)
        pts = path.sample(0.1)
        assert np.linalg.norm(pts[0] - a.position) < 1e-9
        assert np.linalg.norm(pts[-1] - b.position) < 1e-9
        t0, t1 = path.end_tangents()
        assert np.linalg.norm(t0 - a.tangent) < 1e-9
        assert np.linalg.norm(t1 - b.tangent) < 1e-9


def test_optimality_against_grid_oracle():
    rng = np.random.default_rng(42)
    for _ in range(60):
        x, y = rng.uniform(-4, 4, 2)
        th0 = rng.uniform(0, 2 * math.pi)
        th1 = rng.uniform(0, 2 * math.pi)
        got = solve_dubins(cfg2d(0, 0, th0), cfg2d(x, y, th1)).total_length
        want = dubins_grid_oracle((0, 0), th0, (x, y), th1, grid=20000)
        assert got == pytest.approx(want, abs=1e-3), (x, y, th0, th1)


def test_reversal_symmetry():
    rng = np.random.default_rng(9)
    for _ in range(30):
        a = cfg2d(0, 0, rng.uniform(0, 2 * math.pi))
        b = cfg2d(*rng.uniform(-4, 4, 2), rng.uniform(0, 2 * math.pi))
        l1 = solve_dubins(a, b).total_length
        l2 = solve_dubins(b.reversed(), a.reversed()).total_length
        assert l1 == pytest.approx(l2, abs=1e-9)


def test_non_planar_rejected():
    a = Configuration((0, 0, 0), (1, 0, 0))
    b = Configuration((3, 2, 1), (0, 0, 1))
    with pytest.raises(NonPlanarInput):
        solve_dubins(a, b)
