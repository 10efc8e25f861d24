"""Recovery constructions and the exact double bubble."""

import math

import numpy as np
import pytest

from bubblegeom.cluster import (
    WeightMatrix,
    p_epsilon,
    rescaled_energy,
    triple_point_angle,
    validate_cluster,
    vertex_balance,
)
from bubblegeom.errors import ConstructionError, DomainError
from bubblegeom.recovery import (
    build_recovery,
    double_bubble_config,
    predicted_recovery_energy,
    recovery_plan,
    solve_double_bubble,
    structure_report,
)
from bubblegeom.sticky import DiskConfiguration, lattice_enumerate_max_contacts

TWO_DISKS = DiskConfiguration([(0.0, 0.0), (2.0, 0.0)], [1.0, 1.0])
CHAIN_121 = DiskConfiguration([(0.0, 0.0), (3.0, 0.0), (6.0, 0.0)], [1.0, 2.0, 1.0])


def fit_loglog_slope(xs, ys):
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


# ------------------------------ double bubble --------------------------------


def test_double_bubble_equal_areas_is_symmetric():
    s = solve_double_bubble(0.2, math.pi, math.pi)
    assert s.kappa_mid == pytest.approx(0.0, abs=1e-12)
    assert s.r1 == pytest.approx(s.r2, rel=1e-12)


def test_double_bubble_area_residuals():
    for eps, m1, m2 in [(0.5, math.pi, math.pi), (0.05, 1.0, 3.0), (0.9, 2.0, 0.4)]:
        s = solve_double_bubble(eps, m1, m2)
        assert s.cluster.chamber_area(1) == pytest.approx(m1, rel=1e-12)
        assert s.cluster.chamber_area(2) == pytest.approx(m2, rel=1e-12)


def test_double_bubble_energy_expansion():
    """(4 pi - P_eps)/eps^{3/2} climbs monotonically to 4/3."""
    ratios = []
    for eps in (0.1, 0.01, 0.001):
        s = solve_double_bubble(eps, math.pi, math.pi)
        ratios.append((4.0 * math.pi - s.p_eps) / eps**1.5)
    assert ratios[0] < ratios[1] < ratios[2] < 4.0 / 3.0
    assert ratios[2] == pytest.approx(4.0 / 3.0, rel=0.02)


def test_double_bubble_curvature_balance():
    for eps, m1, m2 in [(0.3, math.pi, math.pi), (0.1, 1.0, 2.0), (1.0, 2.0, 5.0)]:
        s = solve_double_bubble(eps, m1, m2)
        assert abs(s.curvature_balance_residual()) <= 1e-12


def test_double_bubble_vertex_balance_and_angles():
    eps = 0.05
    s = solve_double_bubble(eps, math.pi, 2.0)
    w = np.ones((3, 3))
    w[1, 2] = w[2, 1] = 2.0 - eps
    for v in s.vertices:
        res = vertex_balance(s.cluster, WeightMatrix(w), v)
        assert np.linalg.norm(res) <= 1e-9

    # sector angles at the top vertex: (2 theta, pi - theta, pi - theta)
    theta = triple_point_angle(eps)
    v = s.vertices[0]
    tol = s.cluster.vertex_tolerance()
    tangents = []
    for seg in s.cluster.segments:
        for p in (seg.start, seg.end):
            if math.hypot(p[0] - v[0], p[1] - v[1]) <= tol:
                tangents.append(seg.outgoing_tangent(v, tol))
                break
    assert len(tangents) == 3
    angles = sorted(math.atan2(t[1], t[0]) for t in tangents)
    gaps = sorted(
        [
            (angles[1] - angles[0]),
            (angles[2] - angles[1]),
            2.0 * math.pi - (angles[2] - angles[0]),
        ]
    )
    expected = sorted([2.0 * theta, math.pi - theta, math.pi - theta])
    for g, ex in zip(gaps, expected):
        assert g == pytest.approx(ex, abs=1e-9)


def test_double_bubble_interface_matches_cluster():
    s = solve_double_bubble(0.01, math.pi, math.pi)
    assert s.cluster.interface_length(1, 2) == pytest.approx(
        s.interface_length(), rel=1e-12
    )


def test_double_bubble_rescaled_energy_limit():
    s = solve_double_bubble(1e-3, math.pi, math.pi)
    r = rescaled_energy(s.cluster, 1e-3, [1.0, 1.0])
    assert r == pytest.approx(-1.0, abs=0.05)


def test_double_bubble_interface_chord_vs_structure_formula():
    eps = 1e-3
    s = solve_double_bubble(eps, math.pi, math.pi)
    expected = 2.0 * math.sqrt(eps) * 2.0 * 1.0 * 1.0 / (1.0 + 1.0)
    assert s.separation == pytest.approx(expected, rel=0.05)


def test_double_bubble_domain_errors():
    with pytest.raises(DomainError):
        solve_double_bubble(0.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        solve_double_bubble(2.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        solve_double_bubble(0.5, -1.0, 1.0)


def test_double_bubble_extreme_area_ratio():
    s = solve_double_bubble(0.1, math.pi, 1000.0 * math.pi)
    assert s.cluster.chamber_area(2) == pytest.approx(1000.0 * math.pi, rel=1e-12)


# ---------------------------- recovery clusters ------------------------------


def test_recovery_two_disks_energy():
    eps = 1e-4
    c = build_recovery(TWO_DISKS, eps)
    p = p_epsilon(c, eps)
    predicted = 4.0 * math.pi - (4.0 / 3.0) * eps**1.5
    assert p == pytest.approx(predicted, abs=2.0 * eps**2.5)
    assert rescaled_energy(c, eps, [1.0, 1.0]) == pytest.approx(-1.0, abs=0.02)


def test_recovery_areas_exact():
    for cfg in (TWO_DISKS, CHAIN_121):
        for eps in (1e-2, 1e-4):
            c = build_recovery(cfg, eps)
            for i in range(1, c.n_chambers + 1):
                assert c.chamber_area(i) == pytest.approx(
                    c.target_areas[i - 1], rel=1e-12
                )


def test_recovery_hausdorff_convergence():
    plan = recovery_plan(TWO_DISKS, 1e-6)
    for i in (1, 2):
        assert plan.max_radial_deviation(i) <= 1e-4


def test_recovery_chain_slope_coefficient():
    eps = 1e-4
    c = build_recovery(CHAIN_121, eps)
    p0 = 2.0 * math.pi * 4.0
    measured = (p0 - p_epsilon(c, eps)) / eps**1.5
    target = (4.0 / 3.0) * (8.0 / 3.0)
    assert measured == pytest.approx(target, rel=0.05)


def test_recovery_residual_slopes():
    eps_list = np.geomspace(1e-4, 1e-2, 6)
    for cfg in (TWO_DISKS, CHAIN_121):
        resid = []
        for e in eps_list:
            c = build_recovery(cfg, e)
            resid.append(abs(p_epsilon(c, e) - predicted_recovery_energy(cfg, e)))
        assert fit_loglog_slope(eps_list, resid) >= 2.3


def test_predicted_energy_no_contacts():
    cfg = DiskConfiguration([(0.0, 0.0), (5.0, 0.0)], [1.0, 1.5])
    for eps in (1e-3, 0.1):
        assert predicted_recovery_energy(cfg, eps) == pytest.approx(
            2.0 * math.pi * 2.5, rel=1e-15
        )


def test_predicted_energy_two_disks_value():
    assert predicted_recovery_energy(TWO_DISKS, 0.01) == pytest.approx(
        4.0 * math.pi - (4.0 / 3.0) * 0.001, rel=1e-15
    )


def test_recovery_equal_radii_dent_is_straight():
    plan = recovery_plan(TWO_DISKS, 1e-3)
    assert plan.dents[0].segment.curvature == 0.0


def test_recovery_stored_curvature_antisymmetry():
    plan = recovery_plan(CHAIN_121, 1e-4)
    for d in plan.dents:
        seg = d.segment
        ri = CHAIN_121.radii[d.i - 1]
        rj = CHAIN_121.radii[d.j - 1]
        assert seg.oriented(d.i).curvature == pytest.approx(
            0.5 * (1.0 / ri - 1.0 / rj), abs=1e-15
        )
        assert seg.oriented(d.j).curvature == pytest.approx(
            0.5 * (1.0 / rj - 1.0 / ri), abs=1e-15
        )


def test_recovery_relabeling_gives_same_geometry():
    flipped = DiskConfiguration([(6.0, 0.0), (3.0, 0.0), (0.0, 0.0)], [1.0, 2.0, 1.0])
    eps = 1e-3
    a = build_recovery(CHAIN_121, eps)
    b = build_recovery(flipped, eps)
    assert p_epsilon(a, eps) == pytest.approx(p_epsilon(b, eps), rel=1e-12)
    assert a.chamber_area(2) == pytest.approx(b.chamber_area(2), rel=1e-12)


def test_recovery_disconnected_chamber_is_exact_circle():
    cfg = DiskConfiguration([(0.0, 0.0), (2.0, 0.0), (10.0, 0.0)], [1.0, 1.0, 1.5])
    c = build_recovery(cfg, 1e-3)
    assert c.chamber_area(3) == pytest.approx(math.pi * 1.5**2, rel=1e-13)
    ext = [s for s in c.chamber_segments(3)]
    assert all(s.curvature == pytest.approx(1.0 / 1.5, rel=1e-15) for s in ext)


def test_recovery_feasibility_error_for_large_eps():
    cfg = lattice_enumerate_max_contacts(6).configurations[0]
    with pytest.raises(ConstructionError, match="chamber"):
        build_recovery(cfg, 0.5)


def test_recovery_validates():
    c = build_recovery(CHAIN_121, 1e-3)
    rep = validate_cluster(c, resolution=96)
    assert rep.ok
    assert max(abs(r) for r in rep.target_area_residuals.values()) <= 1e-12


# ----------------------------- structure report ------------------------------


def test_structure_report_recovery_exactness():
    eps = 1e-3
    plan = recovery_plan(CHAIN_121, eps)
    rep = structure_report(plan.cluster, CHAIN_121, eps)
    assert rep.ok
    for c in rep.contacts:
        assert abs(c.kappa_measured - c.kappa_expected) <= 1e-9
        assert abs(c.chord_measured - c.chord_expected) <= 1e-9
    for ch in rep.chambers:
        assert ch.connected
        r = CHAIN_121.radii[ch.chamber - 1]
        assert ch.exterior_curvature_deviation <= 0.05 / r


def test_structure_report_double_bubble_chord():
    eps = 1e-3
    s = solve_double_bubble(eps, math.pi, math.pi)
    rep = structure_report(s.cluster, double_bubble_config(math.pi, math.pi), eps)
    c = rep.contacts[0]
    assert c.chord_measured == pytest.approx(c.chord_expected, rel=0.05)
    assert all(v.ok for v in rep.vertices)


def test_structure_report_flags_interior_triple_point():
    # three chambers meeting at one vertex with no exterior: flagged
    from helpers import ArcSegment
    from bubblegeom.cluster import Cluster

    angles = [0.0, 2 * math.pi / 3, 4 * math.pi / 3]
    pairs = [(1, 3), (2, 1), (3, 2)]  # sector k+1 sits CCW of spoke k
    spokes = [
        ArcSegment((0.0, 0.0), (math.cos(a), math.sin(a)), 0.0, l, r)
        for a, (l, r) in zip(angles, pairs)
    ]
    hull = [
        ArcSegment(
            (math.cos(angles[k]), math.sin(angles[k])),
            (math.cos(angles[(k + 1) % 3]), math.sin(angles[(k + 1) % 3])),
            0.0,
            k + 1,
            0,
        )
        for k in range(3)
    ]
    cluster = Cluster(3, spokes + hull)
    cfg = DiskConfiguration(
        [(0.0, 0.0), (10.0, 0.0), (20.0, 0.0)], [1.0, 1.0, 1.0]
    )
    rep = structure_report(cluster, cfg, 0.1)
    center_vertices = [v for v in rep.vertices if abs(v.vertex[0]) < 0.5]
    assert any(not v.ok for v in center_vertices)


def test_recovery_n6_lattice_ground_state():
    cfg = lattice_enumerate_max_contacts(6).configurations[0]
    eps = 1e-3
    plan = recovery_plan(cfg, eps)
    assert len(plan.dents) == 9
    rep = structure_report(plan.cluster, cfg, eps)
    assert rep.ok
    measured = (
        2.0 * math.pi * 6.0 - p_epsilon(plan.cluster, eps)
    ) / eps**1.5
    assert measured == pytest.approx((4.0 / 3.0) * 9.0, rel=0.05)
