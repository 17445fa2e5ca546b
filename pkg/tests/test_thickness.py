import math

import numpy as np
import pytest

from thickknot import (
    DiscreteCurve,
    check_membership,
    doubly_critical_pairs,
    geometric_report,
    r2,
    reach_at,
    round_circle,
    thickness,
)
from thickknot.errors import NotAKnot

from _oracles import brute_doubly_critical, brute_r2


def test_circle_pairs_antipodal(unit_circle):
    pairs = doubly_critical_pairs(unit_circle)
    assert pairs
    total = 2.0 * math.pi
    s = unit_circle.arc_positions()
    for p in pairs:
        assert p.chord_length == pytest.approx(2.0, abs=1e-3)
        sep = abs(s[p.index_a] - s[p.index_b])
        sep = min(sep, total - sep)
        assert sep == pytest.approx(total / 2, rel=0.02)


def test_straight_segment_no_pairs():
    pts = np.stack([np.linspace(0, 4, 40), np.zeros(40), np.zeros(40)], axis=1)
    seg = DiscreteCurve(pts, closed=False, tube_radius=0.5)
    assert doubly_critical_pairs(seg) == []
    assert r2(seg) == math.inf


def test_peanut_waist_matches_brute_force(peanut):
    pairs = doubly_critical_pairs(peanut)
    oracle = brute_doubly_critical(peanut.points, True, peanut.tube_radius)
    assert pairs and oracle
    assert pairs[0].chord_length == pytest.approx(oracle[0][2], abs=1e-12)
    assert {(p.index_a, p.index_b) for p in pairs} == {(i, j) for i, j, _ in oracle}
    # waist of the two-lobe fixture has width 1.2 by construction
    assert pairs[0].chord_length == pytest.approx(1.2, abs=2 * peanut.h)


def test_r2_values(unit_circle):
    assert r2(unit_circle) == pytest.approx(2.0, abs=1e-3)
    big = round_circle(3.0, 512, tube_radius=1.0)
    assert r2(big) == pytest.approx(6.0, abs=1e-2)
    assert thickness(big) == pytest.approx(2.0)


def test_thickness_clasp(clasp):
    assert thickness(clasp) == pytest.approx(1.0, abs=0.02)
    oracle = brute_r2(clasp.points, False, clasp.tube_radius)
    assert thickness(clasp) == pytest.approx(min(2.0, oracle), abs=1e-12)


def test_thickness_invariance_and_scaling():
    c = round_circle(1.5, 256, tube_radius=1.0)
    rng = np.random.default_rng(5)
    q, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    if np.linalg.det(q) < 0:
        q[:, 0] *= -1
    moved = c.with_points(c.points @ q.T + rng.normal(size=3))
    assert abs(r2(moved) - r2(c)) < 1e-9
    # r2 scales linearly when the tube radius scales with the curve
    # (exact for power-of-two scales)
    doubled = DiscreteCurve(2.0 * c.points, closed=True, tube_radius=1.0)
    assert r2(doubled) == pytest.approx(2.0 * r2(c), rel=1e-12)
    halved = DiscreteCurve(0.5 * c.points, closed=True, tube_radius=0.5)
    assert r2(halved) == pytest.approx(0.5 * r2(c), rel=1e-12)
    assert thickness(doubled) == 2.0


def test_reach_at(unit_circle):
    c = unit_circle.with_points(unit_circle.points)
    c = DiscreteCurve(unit_circle.points, closed=True, tube_radius=0.5)
    assert reach_at(c, (3.0 + 1.0, 0.0, 0.0)) == pytest.approx(2.5, abs=1e-3)
    assert reach_at(c, (0.0, 0.0, 0.0)) == pytest.approx(0.5, abs=1e-3)
    on_surface = (1.0 + 0.5, 0.0, 0.0)
    assert reach_at(c, on_surface) <= c.h


def test_membership_circle(unit_circle):
    for tau in (2.0, 1.0):
        verdict = check_membership(unit_circle, tau)
        assert verdict.is_member, verdict.reasons
    small = round_circle(0.5, 256, tube_radius=0.5)
    verdict = check_membership(small, 0.5)
    assert not verdict.is_member
    assert any("curvature" in r for r in verdict.reasons)


def test_membership_requires_closed(clasp):
    with pytest.raises(NotAKnot):
        check_membership(clasp, 1.0)


def test_membership_monotone(unit_circle, peanut):
    for curve in (unit_circle, peanut):
        taus = np.arange(0.0, 2.01, 0.25)
        flags = [check_membership(curve, t).is_member for t in taus]
        for lo, hi in zip(flags[:-1], flags[1:]):
            assert lo or not hi  # member at tau implies member at tau' < tau


def test_membership_records_unknot_checker(unit_circle):
    verdict = check_membership(unit_circle, 1.0, unknot_checker=lambda c: "unknotted")
    assert verdict.unknottedness == "checked-heuristically:unknotted"
    verdict = check_membership(unit_circle, 1.0, unknot_checker=lambda c: "nontrivial")
    assert not verdict.is_member


def test_geometric_report(unit_circle):
    rep = geometric_report(unit_circle)
    assert rep.thickness == min(2.0, rep.r2)
    assert rep.length == pytest.approx(2 * math.pi, rel=1e-3)
    assert rep.diameter == pytest.approx(2.0, abs=1e-3)
    assert rep.max_curvature == pytest.approx(1.0, abs=1e-3)


def test_window_boundary_flagged(unit_circle):
    pairs = doubly_critical_pairs(unit_circle)
    # on the circle the minima sit right at the window cutoff
    assert pairs[0].at_window_boundary
