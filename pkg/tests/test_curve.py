import math

import numpy as np
import pytest

from thickknot import (
    DiscreteCurve,
    diameter,
    discrete_curvature,
    length,
    perturb,
    resample,
    round_circle,
)
from thickknot.errors import DegenerateCurve


def test_circle_length_and_diameter(unit_circle):
    assert length(unit_circle) == pytest.approx(2.0 * math.pi, rel=1e-3)
    assert diameter(unit_circle) == pytest.approx(2.0, abs=1e-3)


def test_segment_length_and_diameter():
    seg = DiscreteCurve([[0, 0, 0], [0, 0, 3]], closed=False)
    assert length(seg) == 3.0
    assert diameter(seg) == 3.0


def test_resample_circle_preserves_length(unit_circle):
    out = resample(unit_circle, 256)
    assert out.n == 256
    assert length(out) == pytest.approx(2.0 * math.pi, rel=1e-3)
    assert out.closed and out.tube_radius == unit_circle.tube_radius


def test_resample_straight_segment():
    seg = DiscreteCurve([[0, 0, 0], [1, 0, 0]], closed=False)
    out = resample(seg, 11)
    assert out.n == 11
    np.testing.assert_allclose(out.points[:, 0], np.linspace(0, 1, 11), atol=1e-12)
    np.testing.assert_allclose(out.points[:, 1:], 0.0, atol=1e-12)


def test_resample_uniformises_spacing():
    theta = np.sort(np.random.default_rng(0).uniform(0, 2 * math.pi, 300))
    pts = np.stack([np.cos(theta), np.sin(theta), 0 * theta], axis=1)
    curve = DiscreteCurve(pts, closed=True)
    out = resample(curve, 256)
    seg = out.segment_lengths()
    assert seg.std() / seg.mean() < 0.01


def test_resample_idempotent(unit_circle):
    once = resample(unit_circle, 300)
    twice = resample(once, 300)
    assert np.abs(twice.points - once.points).max() < 1e-9


def test_resample_hausdorff_bound():
    rng = np.random.default_rng(3)
    pts = np.cumsum(rng.normal(size=(40, 3)), axis=0)
    curve = DiscreteCurve(pts, closed=False)
    old_max_seg = curve.segment_lengths().max()
    out = resample(curve, 200)
    # resampled vertices lie on the input polyline
    from thickknot.thickness import distance_to_centerline

    d = distance_to_centerline(curve, out.points)
    assert d.max() <= 2.0 * old_max_seg


def test_resample_degenerate():
    with pytest.raises((DegenerateCurve, ValueError)):
        resample(DiscreteCurve([[0, 0, 0], [0, 0, 0]], closed=False), 5)


@pytest.mark.parametrize("radius,expect", [(1.0, 1.0), (2.0, 0.5)])
def test_curvature_circle(radius, expect):
    c = round_circle(radius, 512, tube_radius=min(1.0, radius))
    kappa = discrete_curvature(c)
    np.testing.assert_allclose(kappa, expect, atol=1e-3)


def test_curvature_straight_chain():
    pts = np.stack([np.linspace(0, 5, 30), np.zeros(30), np.zeros(30)], axis=1)
    chain = DiscreteCurve(pts, closed=False)
    np.testing.assert_allclose(discrete_curvature(chain), 0.0, atol=1e-12)


@pytest.mark.parametrize("radius", [1.0, 2.0, 5.0])
def test_curvature_second_order_convergence(radius):
    for n in (64, 128, 256):
        c = round_circle(radius, n, tube_radius=1.0)
        h = c.h
        err = np.abs(discrete_curvature(c) - 1.0 / radius).max()
        assert err <= 0.5 * h * h


def test_diameter_rigid_motion_invariance(coarse_circle):
    rng = np.random.default_rng(11)
    base = diameter(coarse_circle)
    for _ in range(5):
        q = rng.normal(size=(3, 3))
        rot, _ = np.linalg.qr(q)
        if np.linalg.det(rot) < 0:
            rot[:, 0] *= -1
        moved = coarse_circle.with_points(coarse_circle.points @ rot.T + rng.normal(size=3))
        assert abs(diameter(moved) - base) < 1e-9


def test_perturb_identity_and_determinism(unit_circle):
    assert perturb(unit_circle, 0.0, seed=1) is unit_circle
    a = perturb(unit_circle, 0.05, seed=7)
    b = perturb(unit_circle, 0.05, seed=7)
    np.testing.assert_array_equal(a.points, b.points)


def test_perturb_bounded_displacement(unit_circle):
    from thickknot.thickness import distance_to_centerline

    out = perturb(unit_circle, 0.05, seed=3)
    d = distance_to_centerline(unit_circle, out.points)
    assert d.max() <= 0.05 + 1e-12


def test_curve_validation():
    with pytest.raises(ValueError):
        DiscreteCurve(np.zeros((4, 3)) + np.arange(4)[:, None], closed=True)  # too few
    with pytest.raises(ValueError):
        DiscreteCurve([[0, 0, 0], [1, 0, 0]], closed=False, tube_radius=1.5)
    with pytest.raises(ValueError):
        DiscreteCurve([[0, 0, 0], [0, 0, 0], [1, 0, 0]], closed=False)


def test_components_roundtrip():
    a = np.stack([np.linspace(0, 1, 10), np.zeros(10), np.zeros(10)], axis=1)
    b = a + [0, 1, 0]
    two = DiscreteCurve(np.vstack([a, b]), closed=False, breaks=(10,))
    comps = two.components()
    assert len(comps) == 2
    np.testing.assert_array_equal(comps[1].points, b)
    out = resample(two, 40)
    assert len(out.components()) == 2
    assert out.n == 40
