"""Explicit near-optimal clusters: recovery constructions and double bubbles.

Recovery construction: every tangency of a disk configuration is replaced by
a wall arc of curvature (1/2)(1/r_j - 1/r_i) whose chord has the optimal
length (4 r_i r_j / (r_i + r_j)) sqrt(eps).  Between consecutive walls each
chamber is bounded by constant-curvature arcs through the wall endpoints
whose single free radius is solved so the chamber keeps its disk area.  The
constant-curvature interpolation keeps the energy error at O(eps^{5/2}); a
radial piecewise-linear interpolation would leave an eps^2 excess and cannot
be represented with arc segments at all.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, root

from .arcs import arc_length, segment_area
from .cluster import ArcSegment, Cluster, Point, p_epsilon, triple_point_angle
from .errors import ConstructionError, DomainError, NumericError
from .sticky import DiskConfiguration, contact_graph, harmonic_weight

_TWO_PI = 2.0 * math.pi


def _wrap(a: float) -> float:
    """Wrap an angle into (-pi, pi]."""
    return a - _TWO_PI * math.floor((a + math.pi) / _TWO_PI)


# ------------------------------ recovery plan --------------------------------


@dataclass
class ContactDent:
    """Per-tangency data of a recovery construction."""

    i: int                      # chamber indices, 1-based, i < j
    j: int
    tangency: Point             # where the two disks touch
    chord: float                # wall chord: (4 r_i r_j/(r_i+r_j)) sqrt(eps)
    kappa: float                # wall curvature in the (i, j) convention:
                                # (1/2)(1/r_j - 1/r_i), positive = into chamber i
    half_angle_i: float         # angular half-width of the dent seen from c_i
    half_angle_j: float
    start: Point                # wall endpoints; start -> end has chamber i on the left
    end: Point
    segment: ArcSegment = field(repr=False, default=None)


@dataclass
class RecoveryPlan:
    config: DiskConfiguration
    eps: float
    dents: list[ContactDent]
    gap_radii: dict[int, float]      # solved exterior-arc radius per chamber
    cluster: Cluster = field(repr=False, default=None)

    def contact_weight_sum(self) -> float:
        r = self.config.radii
        return sum(harmonic_weight(r[d.i - 1], r[d.j - 1]) for d in self.dents)

    def max_radial_deviation(self, chamber: int) -> float:
        """max | |p - c_i| - r_i | over the chamber's built boundary."""
        c = self.config.centers[chamber - 1]
        r = self.config.radii[chamber - 1]
        worst = 0.0
        for seg in self.cluster.chamber_segments(chamber):
            for p in seg.polyline(0.02):
                worst = max(worst, abs(math.hypot(p[0] - c[0], p[1] - c[1]) - r))
        return worst


def predicted_recovery_energy(config: DiskConfiguration, eps: float) -> float:
    """First two orders of the construction energy:
    sum 2 pi r_i - (4/3) eps^{3/2} sum over tangent pairs of the harmonic mean."""
    g = contact_graph(config)
    p0 = 2.0 * math.pi * float(np.sum(config.radii))
    return p0 - (4.0 / 3.0) * eps**1.5 * g.total_weight()


def _wall_chord_position(ri: float, rj: float, D: float, ell: float) -> float:
    """Distance from the first center at which the wall chord crosses the
    tangency axis.

    The chord is perpendicular to the axis with endpoints at (x, +-ell/2); x
    is chosen so both chambers see the same relative radial offset of the
    wall endpoints: sqrt(x^2 + ell^2/4)/ri = sqrt((D-x)^2 + ell^2/4)/rj.
    For equal radii this is the midpoint.  Anchoring the triple points at
    matched relative offsets is what keeps the construction's energy error
    at O(eps^{5/2}); placing the wall through the tangency point itself
    leaves the dent endpoints O(eps) off the smaller chamber's circle and
    costs a visible O(eps^2) excess when a chamber has far-apart contacts."""

    def f(x: float) -> float:
        return rj * rj * (x * x + 0.25 * ell * ell) - ri * ri * (
            (D - x) ** 2 + 0.25 * ell * ell
        )

    if f(0.0) >= 0.0 or f(D) <= 0.0:
        raise ConstructionError("wall chord does not fit between the centers")
    return brentq(f, 0.0, D, xtol=1e-15 * D, rtol=8.9e-16)


def _split_arc(
    center: Point, radius: float, a0: float, sweep: float,
    first: Point, last: Point, kappa: float, left: int, right: int,
) -> list[ArcSegment]:
    """Arc about `center` from angle a0 through `sweep` (CCW if positive),
    split into pieces of at most a quarter turn; endpoints are pinned to the
    given points exactly so shared vertices match bit for bit."""
    n = max(1, int(math.ceil(abs(sweep) / (0.5 * math.pi))))
    pts: list[Point] = [first]
    for k in range(1, n):
        phi = a0 + sweep * k / n
        pts.append(
            (center[0] + radius * math.cos(phi), center[1] + radius * math.sin(phi))
        )
    pts.append(last)
    return [
        ArcSegment(pts[k], pts[k + 1], kappa, left, right) for k in range(n)
    ]


def _assemble(config: DiskConfiguration, eps: float, edges, slides) -> RecoveryPlan:
    """Assemble the cluster for given per-contact wall positions.

    slides[k] moves the k-th wall chord along its tangency axis, away from
    the base position at which both chambers see the same relative radial
    offset of the wall endpoints."""
    centers = config.centers
    radii = config.radii
    sqrt_eps = math.sqrt(eps)

    dents: list[ContactDent] = []
    by_chamber: dict[int, list[ContactDent]] = {i: [] for i in range(1, config.n + 1)}
    for (a, b), slide in zip(edges, slides):
        i, j = a + 1, b + 1
        ci, cj = centers[a], centers[b]
        ri, rj = float(radii[a]), float(radii[b])
        ell = 2.0 * harmonic_weight(ri, rj) * sqrt_eps
        kappa_ij = 0.5 * (1.0 / rj - 1.0 / ri)     # wall from chamber i's frame
        D = float(np.hypot(*(cj - ci)))
        x_w = _wall_chord_position(ri, rj, D, ell) + slide
        ux, uy = (cj[0] - ci[0]) / D, (cj[1] - ci[1]) / D
        vx, vy = -uy, ux
        p_start = (
            ci[0] + x_w * ux - 0.5 * ell * vx,
            ci[1] + x_w * uy - 0.5 * ell * vy,
        )
        p_end = (
            ci[0] + x_w * ux + 0.5 * ell * vx,
            ci[1] + x_w * uy + 0.5 * ell * vy,
        )
        dt_i = math.atan2(0.5 * ell, x_w)
        dt_j = math.atan2(0.5 * ell, D - x_w)
        tangency = (ci[0] + ri * ux, ci[1] + ri * uy)
        # stored with chamber i on the left: curvature (1/2)(1/r_i - 1/r_j)
        seg = ArcSegment(p_start, p_end, -kappa_ij, i, j)
        dent = ContactDent(
            i, j, tangency, ell, kappa_ij, dt_i, dt_j, p_start, p_end, seg
        )
        dents.append(dent)
        by_chamber[i].append(dent)
        by_chamber[j].append(dent)

    _check_dent_spacing(config, by_chamber)

    gap_radii: dict[int, float] = {}
    all_segments: list[ArcSegment] = [d.segment for d in dents]
    for i in range(1, config.n + 1):
        segs, r_gap = _chamber_boundary(config, i, by_chamber[i])
        gap_radii[i] = r_gap
        all_segments.extend(segs)

    target_areas = [math.pi * float(r) ** 2 for r in radii]
    cluster = Cluster(config.n, all_segments, target_areas=target_areas)
    return RecoveryPlan(config, eps, dents, gap_radii, cluster)


def recovery_plan(
    config: DiskConfiguration,
    eps: float,
    contact_tol: float | None = None,
    optimize_walls: bool = True,
) -> RecoveryPlan:
    """Build the recovery cluster for a disk configuration at a given eps.

    The wall positions along their tangency axes are free parameters of the
    construction: a chamber with a single contact is rigid under them, but a
    chamber with several contacts is not, and leaving the walls at the
    tangency points costs a Theta(eps^2) perimeter excess there.  When any
    chamber has two or more contacts the positions are tuned to minimize the
    total weighted perimeter, which restores the O(eps^{5/2}) energy error."""
    if eps <= 0.0:
        raise DomainError("recovery construction needs eps > 0")
    graph = contact_graph(config, contact_tol)
    edges = list(graph.edges)
    slides = [0.0] * len(edges)
    counts = np.zeros(config.n + 1, dtype=int)
    for (a, b) in edges:
        counts[a + 1] += 1
        counts[b + 1] += 1
    multi = {c for c in range(1, config.n + 1) if counts[c] >= 2}
    free = [
        k for k, (a, b) in enumerate(edges) if (a + 1) in multi or (b + 1) in multi
    ]
    if optimize_walls and free:
        slides = _optimize_wall_positions(config, eps, edges, free)
    return _assemble(config, eps, edges, slides)


def _optimize_wall_positions(config, eps, edges, free):
    from scipy.optimize import minimize

    radii = config.radii
    slides = [0.0] * len(edges)
    scales = [
        2.0 * eps * harmonic_weight(float(radii[a]), float(radii[b]))
        for (a, b) in edges
    ]

    def objective(x: np.ndarray) -> float:
        s = list(slides)
        for k, v in zip(free, x):
            s[k] = v * scales[k]
        try:
            plan = _assemble(config, eps, edges, s)
        except (ConstructionError, NumericError, ValueError):
            return 1e6
        return p_epsilon(plan.cluster, eps)

    x0 = np.zeros(len(free))
    res = minimize(
        objective,
        x0,
        method="Powell",
        bounds=[(-2.0, 2.0)] * len(free),
        options={"xtol": 1e-4, "ftol": 1e-14, "maxiter": 40},
    )
    best = res.x if res.fun <= objective(x0) else x0
    out = list(slides)
    for k, v in zip(free, best):
        out[k] = float(v) * scales[k]
    return out


def build_recovery(
    config: DiskConfiguration,
    eps: float,
    contact_tol: float | None = None,
    optimize_walls: bool = True,
) -> Cluster:
    return recovery_plan(config, eps, contact_tol, optimize_walls).cluster


def _check_dent_spacing(config: DiskConfiguration, by_chamber):
    """Every dent half-angle must stay within a quarter of the angular gap to
    its neighbouring contacts on the same chamber."""
    for i, dents in by_chamber.items():
        if len(dents) < 1:
            continue
        c = config.centers[i - 1]
        entries = []
        for d in dents:
            phi = math.atan2(d.tangency[1] - c[1], d.tangency[0] - c[0])
            dt = d.half_angle_i if d.i == i else d.half_angle_j
            entries.append((phi, dt, d))
        entries.sort()
        k = len(entries)
        for a in range(k):
            phi_a, dt_a, _ = entries[a]
            phi_b, dt_b, _ = entries[(a + 1) % k]
            sep = (phi_b - phi_a) % _TWO_PI if k > 1 else _TWO_PI
            if dt_a > 0.25 * sep or dt_b > 0.25 * sep:
                raise ConstructionError(
                    f"chamber {i}: dent half-angles ({dt_a:.4g}, {dt_b:.4g}) "
                    f"exceed a quarter of the angular gap {sep:.4g} between "
                    "consecutive contacts; reduce eps"
                )


def _chamber_boundary(config: DiskConfiguration, i: int, dents: list[ContactDent]):
    """Exterior arcs of chamber i: constant-curvature interpolation through
    the wall endpoints, radius solved so the chamber area is pi r_i^2."""
    c = tuple(map(float, config.centers[i - 1]))
    r = float(config.radii[i - 1])
    target = math.pi * r * r

    if not dents:
        # contact-free chamber: emit the exact circle as quarter arcs
        pts = [
            (c[0] + r * math.cos(0.5 * math.pi * k),
             c[1] + r * math.sin(0.5 * math.pi * k))
            for k in range(4)
        ]
        segs = [
            ArcSegment(pts[k], pts[(k + 1) % 4], 1.0 / r, i, 0) for k in range(4)
        ]
        return segs, r

    # walls in CCW order about the chamber center, each as (entry, exit)
    def ang(p: Point) -> float:
        return math.atan2(p[1] - c[1], p[0] - c[0])

    walls = []
    for d in dents:
        start, end = (d.start, d.end) if d.i == i else (d.end, d.start)
        walls.append((ang(start), start, end, d))
    walls.sort(key=lambda w: w[0])

    # gap g runs from the exit point of wall g to the entry point of wall g+1
    gaps = []
    for g in range(len(walls)):
        exit_pt = walls[g][2]
        entry_pt = walls[(g + 1) % len(walls)][1]
        gaps.append((exit_pt, entry_pt))

    min_radius = max(
        0.5 * math.hypot(b[0] - a[0], b[1] - a[1]) for a, b in gaps
    )

    def gap_segments(r_gap: float) -> list[ArcSegment]:
        segs = []
        for (a, b) in gaps:
            mx, my = 0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])
            hx, hy = b[0] - a[0], b[1] - a[1]
            half = 0.5 * math.hypot(hx, hy)
            if half >= r_gap:
                raise ValueError("gap chord exceeds the arc diameter")
            dst = math.sqrt(r_gap * r_gap - half * half)
            nx, ny = -hy / (2.0 * half), hx / (2.0 * half)
            cand1 = (mx + dst * nx, my + dst * ny)
            cand2 = (mx - dst * nx, my - dst * ny)
            center = min(
                (cand1, cand2), key=lambda q: math.hypot(q[0] - c[0], q[1] - c[1])
            )
            a0 = math.atan2(a[1] - center[1], a[0] - center[0])
            a1 = math.atan2(b[1] - center[1], b[0] - center[0])
            sweep = (a1 - a0) % _TWO_PI
            segs.extend(
                _split_arc(center, r_gap, a0, sweep, a, b, 1.0 / r_gap, i, 0)
            )
        return segs

    wall_area = 0.0
    for _, start, end, d in walls:
        seg = d.segment.oriented(i)
        ax, ay = seg.start
        bx, by = seg.end
        wall_area += 0.5 * (ax * by - bx * ay) + segment_area(seg.chord, seg.curvature)

    def area_residual(r_gap: float) -> float:
        total = wall_area
        for seg in gap_segments(r_gap):
            ax, ay = seg.start
            bx, by = seg.end
            total += 0.5 * (ax * by - bx * ay) + segment_area(seg.chord, seg.curvature)
        return total - target

    lo = max(0.80 * r, min_radius * (1.0 + 1e-12))
    hi = 1.25 * r
    f_lo, f_hi = area_residual(lo), area_residual(hi)
    widen = 0
    while f_lo * f_hi > 0.0 and widen < 6:
        lo = max(0.5 * lo, min_radius * (1.0 + 1e-12))
        hi = 1.6 * hi
        f_lo, f_hi = area_residual(lo), area_residual(hi)
        widen += 1
    if f_lo * f_hi > 0.0:
        raise ConstructionError(
            f"chamber {i}: could not bracket the exterior radius fixing the area"
        )
    r_gap = brentq(area_residual, lo, hi, xtol=1e-15 * max(r, 1.0), rtol=8.9e-16)
    resid = area_residual(r_gap)
    if abs(resid) > 1e-12 * target:
        raise NumericError(
            f"chamber {i}: area residual {resid:.3e} above 1e-12 relative",
            achieved=abs(resid) / target,
        )
    return gap_segments(r_gap), r_gap


# ------------------------------ double bubble --------------------------------


@dataclass
class DoubleBubbleSolution:
    """The three-arc double bubble: two outer arcs and one wall, meeting at
    two triple points with angles (2 theta, pi - theta, pi - theta)."""

    eps: float
    m1: float
    m2: float
    separation: float            # distance between the two triple points
    wall_tilt: float             # signed tangent tilt of the wall at the top vertex
    r1: float                    # outer arc radii (chamber 1 left, 2 right)
    r2: float
    kappa_mid: float             # wall curvature, positive = bulges into chamber 2
    vertices: tuple[Point, Point]
    areas: tuple[float, float]
    p_eps: float
    cluster: Cluster = field(repr=False, default=None)

    @property
    def kappa_out1(self) -> float:
        return 1.0 / self.r1

    @property
    def kappa_out2(self) -> float:
        return 1.0 / self.r2

    def curvature_balance_residual(self) -> float:
        """(2-eps) kappa_12 + kappa_20 + kappa_01 in the cyclic orientation
        (kappa_12 = wall into chamber 2, kappa_20 = 1/r2, kappa_01 = -1/r1)."""
        return (2.0 - self.eps) * self.kappa_mid + self.kappa_out2 - self.kappa_out1

    def interface_length(self) -> float:
        return arc_length(self.separation, self.kappa_mid)


def _major_segment_area(r: float, beta: float) -> float:
    """Area between a chord subtending half-angle beta and the far arc."""
    return r * r * (math.pi - beta + math.sin(beta) * math.cos(beta))


def _double_bubble_geometry(eps: float, a_w: float, d: float):
    theta = triple_point_angle(eps)
    beta1 = theta + a_w
    beta2 = theta - a_w
    if not (0.0 < beta1 < math.pi and 0.0 < beta2 < math.pi):
        return None
    r1 = d / (2.0 * math.sin(beta1))
    r2 = d / (2.0 * math.sin(beta2))
    kappa_mid = 2.0 * math.sin(a_w) / d
    area1 = _major_segment_area(r1, beta1) + segment_area(d, kappa_mid)
    area2 = _major_segment_area(r2, beta2) - segment_area(d, kappa_mid)
    return beta1, beta2, r1, r2, kappa_mid, area1, area2


def solve_double_bubble(eps: float, m1: float, m2: float) -> DoubleBubbleSolution:
    """Solve the two-chamber minimizer geometry by rooting the two area
    residuals in (wall tilt, vertex separation)."""
    if not 0.0 < eps < 2.0:
        raise DomainError(f"eps must lie in (0, 2), got {eps}")
    if m1 <= 0.0 or m2 <= 0.0:
        raise DomainError("areas must be positive")
    theta = triple_point_angle(eps)
    r1_0 = math.sqrt(m1 / math.pi)
    r2_0 = math.sqrt(m2 / math.pi)
    kap0 = (1.0 / r1_0 - 1.0 / r2_0) / (2.0 - eps)
    d0 = 4.0 * math.sqrt(eps) / (1.0 / r1_0 + 1.0 / r2_0)
    aw0 = math.asin(max(-0.9, min(0.9, 0.5 * kap0 * d0)) * 1.0)
    aw0 = max(-0.9 * theta, min(0.9 * theta, aw0))

    def unpack(x):
        a_w = theta * math.tanh(x[0])
        d = math.exp(x[1])
        return a_w, d

    def residuals(x):
        a_w, d = unpack(x)
        geo = _double_bubble_geometry(eps, a_w, d)
        if geo is None:
            return [1e6, 1e6]
        _, _, _, _, _, area1, area2 = geo
        return [area1 / m1 - 1.0, area2 / m2 - 1.0]

    x0 = [math.atanh(max(-0.999, min(0.999, aw0 / theta))), math.log(d0)]
    sol = root(residuals, x0, method="hybr", tol=1e-14)
    res = residuals(sol.x)
    if max(abs(res[0]), abs(res[1])) > 1e-12:
        # continuation in eps from a small, easy value
        x = None
        for e in np.geomspace(1e-3, eps, 12):
            d0e = 4.0 * math.sqrt(e) / (1.0 / r1_0 + 1.0 / r2_0)
            guess = x if x is not None else [x0[0], math.log(d0e)]

            def res_e(xx, e=e):
                a_w = triple_point_angle(e) * math.tanh(xx[0])
                d = math.exp(xx[1])
                geo = _double_bubble_geometry(e, a_w, d)
                if geo is None:
                    return [1e6, 1e6]
                return [geo[5] / m1 - 1.0, geo[6] / m2 - 1.0]

            s = root(res_e, guess, method="hybr", tol=1e-14)
            x = list(s.x)
        sol.x = np.asarray(x)
        res = residuals(sol.x)
        if max(abs(res[0]), abs(res[1])) > 1e-12:
            raise NumericError(
                f"double bubble solve left area residuals {res}",
                achieved=max(abs(res[0]), abs(res[1])),
            )
    a_w, d = unpack(sol.x)
    beta1, beta2, r1, r2, kappa_mid, area1, area2 = _double_bubble_geometry(
        eps, a_w, d
    )
    v_top: Point = (0.0, 0.5 * d)
    v_bot: Point = (0.0, -0.5 * d)

    # wall from bottom to top vertex keeps chamber 1 (x < 0) on the left
    wall = ArcSegment(v_bot, v_top, kappa_mid, 1, 2)
    c1 = (-r1 * math.cos(beta1), 0.0)
    c2 = (r2 * math.cos(beta2), 0.0)
    segs = [wall]
    segs.extend(
        _split_arc(c1, r1, beta1, _TWO_PI - 2.0 * beta1, v_top, v_bot, 1.0 / r1, 1, 0)
    )
    segs.extend(
        _split_arc(
            c2, r2, beta2 - math.pi, _TWO_PI - 2.0 * beta2, v_bot, v_top, 1.0 / r2, 2, 0
        )
    )
    cluster = Cluster(2, segs, target_areas=[m1, m2])
    p_eps = p_epsilon(cluster, eps)
    return DoubleBubbleSolution(
        eps, m1, m2, d, a_w, r1, r2, kappa_mid,
        (v_top, v_bot), (area1, area2), p_eps, cluster,
    )


def double_bubble_config(m1: float, m2: float) -> DiskConfiguration:
    """The limiting pair of tangent disks with the same areas."""
    r1 = math.sqrt(m1 / math.pi)
    r2 = math.sqrt(m2 / math.pi)
    return DiskConfiguration([(0.0, 0.0), (r1 + r2, 0.0)], [r1, r2])


# ----------------------------- structure report ------------------------------


@dataclass
class ContactStructure:
    i: int
    j: int
    kappa_measured: float
    kappa_expected: float        # (1/2)(1/r_j - 1/r_i)
    chord_measured: float
    chord_expected: float        # (4 r_i r_j/(r_i+r_j)) sqrt(eps)
    single_arc: bool


@dataclass
class ChamberStructure:
    chamber: int
    connected: bool
    exterior_curvature_deviation: float   # max |kappa_ext - 1/r_i|


@dataclass
class VertexStructure:
    vertex: Point
    n_arcs: int
    chambers: tuple[int, ...]
    one_exterior: bool

    @property
    def ok(self) -> bool:
        return self.n_arcs == 3 and self.one_exterior


@dataclass
class StructureReport:
    contacts: list[ContactStructure]
    chambers: list[ChamberStructure]
    vertices: list[VertexStructure]

    @property
    def ok(self) -> bool:
        return (
            all(c.single_arc for c in self.contacts)
            and all(ch.connected for ch in self.chambers)
            and all(v.ok for v in self.vertices)
        )


def structure_report(
    cluster: Cluster, config: DiskConfiguration, eps: float
) -> StructureReport:
    """Check a built cluster against the structural predictions for small eps:
    one wall arc per tangency with the stated curvature and chord, connected
    chambers with near-disk exterior curvature, and triple points where
    exactly one chamber is the exterior."""
    radii = config.radii
    sqrt_eps = math.sqrt(eps)
    contacts = []
    for (a, b) in contact_graph(config).edges:
        i, j = a + 1, b + 1
        ri, rj = float(radii[a]), float(radii[b])
        segs = cluster.interface_segments(i, j)
        expected_kappa = 0.5 * (1.0 / rj - 1.0 / ri)
        expected_chord = 2.0 * harmonic_weight(ri, rj) * sqrt_eps
        if segs:
            # report in the (i, j) orientation: chamber j on the left
            seg = segs[0].oriented(j)
            measured_kappa = seg.curvature
            measured_chord = sum(s.chord for s in segs)
        else:
            measured_kappa = math.nan
            measured_chord = 0.0
        contacts.append(
            ContactStructure(
                i, j, measured_kappa, expected_kappa,
                measured_chord, expected_chord, len(segs) == 1,
            )
        )

    chambers = []
    for i in range(1, cluster.n_chambers + 1):
        loops = cluster.chamber_loops(i)
        ext = [s for s in cluster.chamber_segments(i) if 0 in (s.left, s.right)]
        dev = max(
            (abs(s.curvature - 1.0 / float(radii[i - 1])) for s in ext),
            default=math.nan,
        )
        chambers.append(ChamberStructure(i, len(loops) == 1, dev))

    vertices = []
    tol = cluster.vertex_tolerance()
    for vkey, idxs in cluster.vertices().items():
        if len(idxs) <= 2:
            continue
        labels = set()
        for k in idxs:
            labels.add(cluster.segments[k].left)
            labels.add(cluster.segments[k].right)
        vertices.append(
            VertexStructure(
                (vkey[0] * tol, vkey[1] * tol),
                len(idxs),
                tuple(sorted(labels)),
                0 in labels and len(labels) == 3,
            )
        )
    return StructureReport(contacts, chambers, vertices)
