"""Isoperimetric machinery: deficits, arc-replacement comparison sets, and
the cluster lower bounds at order eps^{3/2}.

The central device: replacing marked constant-curvature boundary arcs by arcs
of the ideal curvature (that of the disk with the same area) over the same
chords yields a comparison set whose area and perimeter changes are exact
kernel quantities; the classical isoperimetric inequality applied to the
comparison set then bounds the original perimeter from below.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .arcs import arc_length, segment_area
from .cluster import ArcSegment, Cluster, p_epsilon
from .errors import DomainError
from .sticky import harmonic_weight

# ------------------------------- scalar basics ------------------------------


def ideal_curvature(area: float) -> float:
    """Curvature 1/r of the disk holding the given area."""
    if area <= 0.0:
        raise DomainError(f"area must be positive, got {area}")
    return math.sqrt(math.pi / area)


def isoperimetric_deficit(cluster: Cluster, chamber: int) -> float:
    """P(E) - sqrt(4 pi |E|), floored at the numerical zero."""
    p = cluster.chamber_perimeter(chamber)
    a = cluster.chamber_area(chamber)
    d = p - math.sqrt(4.0 * math.pi * a)
    if d < -1e-12 * max(p, 1.0):
        raise DomainError(f"negative deficit {d}: invalid chamber geometry")
    return d


# ---------------------------- marked chambers --------------------------------


@dataclass
class MarkedChamber:
    """A chamber with a subset of its boundary arcs designated for
    replacement by ideal-curvature arcs; curvatures are in the
    outward-positive convention of the chamber."""

    cluster: Cluster
    chamber: int
    marked: list[int]              # indices into cluster.chamber_segments(chamber)
    kappa_cap: float | None = None

    def segments(self) -> list[ArcSegment]:
        return self.cluster.chamber_segments(self.chamber)

    def marked_data(self) -> list[tuple[float, float]]:
        segs = self.segments()
        return [(segs[k].chord, segs[k].curvature) for k in self.marked]

    def validate(self):
        segs = self.segments()
        if not self.marked:
            raise DomainError("no arcs marked for replacement")
        if any(not 0 <= k < len(segs) for k in self.marked):
            raise DomainError("marked index outside the chamber boundary")
        area = self.cluster.chamber_area(self.chamber)
        k_e = ideal_curvature(area)
        cap = self.kappa_cap
        if cap is None:
            cap = 2.0 * max(
                k_e, max(abs(segs[k].curvature) for k in self.marked)
            )
        for k in self.marked:
            if segs[k].curvature > cap:
                raise DomainError(
                    f"marked curvature {segs[k].curvature} exceeds the cap {cap}"
                )


# --------------------------- geometric predicates ----------------------------


def _angle_in_sweep(psi: float, a0: float, sweep: float, margin: float) -> bool:
    """Is angle psi strictly inside the arc's angular span, away from ends?"""
    if sweep >= 0.0:
        t = (psi - a0) % (2.0 * math.pi)
        return margin < t < sweep - margin
    t = (a0 - psi) % (2.0 * math.pi)
    return margin < t < -sweep - margin


def _seg_param(p, a, b, tol):
    """Parameter of p along segment ab if p lies on it strictly inside."""
    ax, ay = a
    bx, by = b
    dx, dy = bx - ax, by - ay
    L2 = dx * dx + dy * dy
    t = ((p[0] - ax) * dx + (p[1] - ay) * dy) / L2
    if not (tol < t < 1.0 - tol):
        return None
    px = ax + t * dx - p[0]
    py = ay + t * dy - p[1]
    if math.hypot(px, py) > tol * math.sqrt(L2):
        return None
    return t


def _line_line_crossing(s1: ArcSegment, s2: ArcSegment, tol: float) -> bool:
    a, b = s1.start, s1.end
    c, d = s2.start, s2.end
    r = (b[0] - a[0], b[1] - a[1])
    s = (d[0] - c[0], d[1] - c[1])
    denom = r[0] * s[1] - r[1] * s[0]
    if abs(denom) < 1e-14 * math.hypot(*r) * math.hypot(*s):
        return False  # parallel; overlap handled by endpoint tolerance checks
    qp = (c[0] - a[0], c[1] - a[1])
    t = (qp[0] * s[1] - qp[1] * s[0]) / denom
    u = (qp[0] * r[1] - qp[1] * r[0]) / denom
    eps_t = tol / math.hypot(*r)
    eps_u = tol / math.hypot(*s)
    return eps_t < t < 1.0 - eps_t and eps_u < u < 1.0 - eps_u


def _circle_points(c1, r1, c2, r2):
    """Intersection points of two circles (0, 1 or 2)."""
    dx, dy = c2[0] - c1[0], c2[1] - c1[1]
    d = math.hypot(dx, dy)
    if d == 0.0 or d > r1 + r2 or d < abs(r1 - r2):
        return []
    a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d)
    h2 = r1 * r1 - a * a
    h = math.sqrt(max(h2, 0.0))
    mx, my = c1[0] + a * dx / d, c1[1] + a * dy / d
    if h == 0.0:
        return [(mx, my)]
    ox, oy = -dy / d * h, dx / d * h
    return [(mx + ox, my + oy), (mx - ox, my - oy)]


def _arc_frame(seg: ArcSegment):
    c = seg.center()
    r = 1.0 / abs(seg.curvature)
    a0 = math.atan2(seg.start[1] - c[1], seg.start[0] - c[0])
    return c, r, a0, seg.angle


def segments_cross(s1: ArcSegment, s2: ArcSegment, tol: float) -> bool:
    """True if the two boundary pieces meet strictly away from shared
    endpoints.  Arcs are compared by exact circle intersections."""
    if s1.curvature == 0.0 and s2.curvature == 0.0:
        return _line_line_crossing(s1, s2, tol)

    if s1.curvature != 0.0 and s2.curvature != 0.0:
        c1, r1, a1, w1 = _arc_frame(s1)
        c2, r2, a2, w2 = _arc_frame(s2)
        same_circle = (
            math.hypot(c1[0] - c2[0], c1[1] - c2[1]) <= tol and abs(r1 - r2) <= tol
        )
        if same_circle:
            # overlapping spans on a shared circle: test each midpoint
            for seg, (c, r, a0, w) in ((s1, (c1, r1, a1, w1)), (s2, (c2, r2, a2, w2))):
                other = s2 if seg is s1 else s1
                oc, orr, oa, ow = _arc_frame(other)
                mid = a0 + 0.5 * w
                if _angle_in_sweep(mid, oa, ow, tol / orr):
                    return True
            return False
        pts = _circle_points(c1, r1, c2, r2)
        m1, m2 = tol / r1, tol / r2
        for p in pts:
            psi1 = math.atan2(p[1] - c1[1], p[0] - c1[0])
            psi2 = math.atan2(p[1] - c2[1], p[0] - c2[0])
            if _angle_in_sweep(psi1, a1, w1, m1) and _angle_in_sweep(psi2, a2, w2, m2):
                return True
        return False

    line, arc = (s1, s2) if s1.curvature == 0.0 else (s2, s1)
    c, r, a0, w = _arc_frame(arc)
    ax, ay = line.start
    bx, by = line.end
    dx, dy = bx - ax, by - ay
    fx, fy = ax - c[0], ay - c[1]
    A = dx * dx + dy * dy
    B = 2.0 * (fx * dx + fy * dy)
    C = fx * fx + fy * fy - r * r
    disc = B * B - 4.0 * A * C
    if disc < 0.0:
        return False
    sq = math.sqrt(disc)
    for t in ((-B + sq) / (2.0 * A), (-B - sq) / (2.0 * A)):
        eps_t = tol / math.sqrt(A)
        if not (eps_t < t < 1.0 - eps_t):
            continue
        p = (ax + t * dx, ay + t * dy)
        psi = math.atan2(p[1] - c[1], p[0] - c[0])
        if _angle_in_sweep(psi, a0, w, tol / r):
            return True
    return False


def chamber_is_embedded(cluster: Cluster, chamber: int) -> bool:
    """Pairwise arc-intersection test over one chamber's boundary."""
    segs = cluster.chamber_segments(chamber)
    tol = cluster.vertex_tolerance()
    for s1, s2 in combinations(segs, 2):
        if segments_cross(s1, s2, tol):
            return False
    return True


# ----------------------------- arc replacement -------------------------------


@dataclass
class BoundReport:
    perimeter: float               # P(E)
    area: float                    # |E|
    kappa_ideal: float
    root_term: float               # sqrt(4 pi |E|)
    deficit_sum: float             # (1/24) sum l_i^3 (kappa_i - kappa_E)^2
    remainder_scale: float         # sum l_i^5
    delta_p: float
    delta_a: float
    perimeter_tilde: float         # P(E~)
    area_tilde: float              # |E~|
    embedded: bool
    exact_rhs: float               # sqrt(4 pi |E~|) - delta_p

    @property
    def exact_inequality_holds(self) -> bool | None:
        """P(E) >= sqrt(4 pi |E~|) - delta_p; None when E~ is not embedded."""
        if not self.embedded:
            return None
        return self.perimeter >= self.exact_rhs - 1e-11 * max(self.perimeter, 1.0)

    @property
    def asymptotic_rhs(self) -> float:
        return self.root_term + self.deficit_sum

    @property
    def asymptotic_residual(self) -> float:
        """Slack of the series form beyond the deficit term."""
        return self.perimeter - self.asymptotic_rhs


def replace_arcs(mc: MarkedChamber) -> tuple[Cluster, float, float]:
    """Inflate or deflate each marked arc to the ideal curvature over the
    same chord; returns the comparison chamber with the exact perimeter and
    area changes."""
    mc.validate()
    segs = mc.segments()
    area = mc.cluster.chamber_area(mc.chamber)
    k_e = ideal_curvature(area)
    marked = set(mc.marked)

    new_segments = []
    delta_p = 0.0
    delta_a = 0.0
    for idx, seg in enumerate(segs):
        if idx in marked:
            if seg.chord * k_e > 2.0:
                raise DomainError(
                    f"chord {seg.chord} too long for the ideal curvature {k_e}"
                )
            delta_p += arc_length(seg.chord, k_e) - arc_length(seg.chord, seg.curvature)
            delta_a += segment_area(seg.chord, k_e) - segment_area(
                seg.chord, seg.curvature
            )
            new_segments.append(
                ArcSegment(seg.start, seg.end, k_e, 1, 0)
            )
        else:
            new_segments.append(ArcSegment(seg.start, seg.end, seg.curvature, 1, 0))
    comparison = Cluster(1, new_segments)
    return comparison, delta_p, delta_a


def curvature_deficit_bound(mc: MarkedChamber) -> BoundReport:
    """Both sides of the curvature-deficit lower bound on a marked chamber.

    The exact pre-expansion inequality P(E) >= sqrt(4 pi |E~|) - delta_p is
    assertable whenever the comparison set is embedded; the series form with
    the (1/24)-sum is reported along with its residual scale sum l_i^5."""
    comparison, delta_p, delta_a = replace_arcs(mc)
    p = mc.cluster.chamber_perimeter(mc.chamber)
    area = mc.cluster.chamber_area(mc.chamber)
    k_e = ideal_curvature(area)
    deficit = 0.0
    scale = 0.0
    for l, k in mc.marked_data():
        deficit += l**3 * (k - k_e) ** 2 / 24.0
        scale += l**5
    p_tilde = comparison.chamber_perimeter(1)
    a_tilde = comparison.chamber_area(1)
    embedded = chamber_is_embedded(comparison, 1)
    return BoundReport(
        perimeter=p,
        area=area,
        kappa_ideal=k_e,
        root_term=math.sqrt(4.0 * math.pi * area),
        deficit_sum=deficit,
        remainder_scale=scale,
        delta_p=delta_p,
        delta_a=delta_a,
        perimeter_tilde=p_tilde,
        area_tilde=a_tilde,
        embedded=embedded,
        exact_rhs=math.sqrt(4.0 * math.pi * (area + delta_a)) - delta_p,
    )


# ------------------------- cluster-level lower bounds -------------------------


@dataclass
class PairOptimizer:
    i: int
    j: int
    weight: float                  # 2 r_i r_j / (r_i + r_j) from actual areas
    kappa_opt: float               # (kappa_i - kappa_j) / (2 - eps)
    ell_opt: float                 # 4 sqrt(eps) / (kappa_i + kappa_j)


@dataclass
class ClusterBound:
    value: float
    disk_perimeter_sum: float
    eps: float
    pairs: list[PairOptimizer] = field(default_factory=list)


def _interface_component_count(cluster: Cluster, i: int, j: int) -> int:
    segs = cluster.interface_segments(i, j)
    if not segs:
        return 0
    tol = cluster.vertex_tolerance()

    def key(p):
        return (round(p[0] / tol), round(p[1] / tol))

    parent = list(range(len(segs)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    by_vertex: dict = {}
    for idx, s in enumerate(segs):
        for p in (s.start, s.end):
            by_vertex.setdefault(key(p), []).append(idx)
    for idxs in by_vertex.values():
        for other in idxs[1:]:
            ra, rb = find(idxs[0]), find(other)
            if ra != rb:
                parent[ra] = rb
    return len({find(x) for x in range(len(segs))})


def cluster_lower_bound(cluster: Cluster, eps: float) -> ClusterBound:
    """The eps^{3/2} lower-bound value sum_i 2 pi r_i - (4/3) eps^{3/2}
    sum over contacting pairs of the harmonic mean, with radii taken from the
    actual chamber areas.  Requires every interior pair of chambers to share
    at most one interface arc."""
    if eps < 0.0:
        raise DomainError("eps must be nonnegative")
    n = cluster.n_chambers
    radii = []
    for i in range(1, n + 1):
        radii.append(math.sqrt(cluster.chamber_area(i) / math.pi))
    p0 = sum(2.0 * math.pi * r for r in radii)
    pairs = []
    total_w = 0.0
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            ncomp = _interface_component_count(cluster, i, j)
            if ncomp == 0:
                continue
            if ncomp > 1:
                raise DomainError(
                    f"chambers {i} and {j} share {ncomp} interface arcs; "
                    "the bound assumes at most one"
                )
            ki, kj = 1.0 / radii[i - 1], 1.0 / radii[j - 1]
            w = harmonic_weight(radii[i - 1], radii[j - 1])
            total_w += w
            pairs.append(
                PairOptimizer(
                    i, j, w, (ki - kj) / (2.0 - eps), 4.0 * math.sqrt(eps) / (ki + kj)
                )
            )
    value = p0 - (4.0 / 3.0) * eps**1.5 * total_w
    return ClusterBound(value, p0, eps, pairs)


def superposition_bound(cluster: Cluster, eps: float, area_tol: float = 1e-6) -> float:
    """Weaker lower bound from viewing the cluster as overlaid two-chamber
    problems: 2 N pi - (4/3) sqrt(N-1) C eps^{3/2}, requiring unit-disk areas."""
    n = cluster.n_chambers
    if n < 2:
        raise DomainError("superposition bound needs at least two chambers")
    for i in range(1, n + 1):
        if abs(cluster.chamber_area(i) - math.pi) > area_tol * math.pi:
            raise DomainError(
                f"chamber {i} area {cluster.chamber_area(i)} != pi; the "
                "superposition bound assumes unit-disk areas"
            )
    contacts = sum(
        1
        for i in range(1, n + 1)
        for j in range(i + 1, n + 1)
        if cluster.interface_segments(i, j)
    )
    return 2.0 * n * math.pi - (4.0 / 3.0) * math.sqrt(n - 1.0) * contacts * eps**1.5


# ------------------------------ the eps -> 2 end ------------------------------


def g_alpha(cluster: Cluster, alpha: float, area_tol: float = 1e-6) -> float:
    """Rescaled energy for the opposite weight limit:
    (P_{2-alpha} - (1-alpha) 2 pi sqrt(N)) / alpha, for unit-area chambers."""
    if not 0.0 < alpha <= 2.0:
        raise DomainError(f"alpha must lie in (0, 2], got {alpha}")
    n = cluster.n_chambers
    for i in range(1, n + 1):
        if abs(cluster.chamber_area(i) - math.pi) > area_tol * math.pi:
            raise DomainError(f"chamber {i} area != pi")
    limit_perimeter = 2.0 * math.pi * math.sqrt(n)
    return (p_epsilon(cluster, 2.0 - alpha) - (1.0 - alpha) * limit_perimeter) / alpha


def g_alpha_rewritten(cluster: Cluster, alpha: float) -> float:
    """Identity form P(E) + ((1-alpha)/alpha) (P(E(0)) - 2 pi sqrt(N))."""
    n = cluster.n_chambers
    limit_perimeter = 2.0 * math.pi * math.sqrt(n)
    return cluster.total_perimeter() + (1.0 - alpha) / alpha * (
        cluster.exterior_perimeter() - limit_perimeter
    )


# ------------------------------ fuzz generator --------------------------------


def dented_disk(
    seed: int,
    max_dents: int = 6,
    max_chord: float = 0.2,
    max_curvature: float = 2.0,
) -> MarkedChamber:
    """Random unit disk with well-separated replaced boundary arcs: the fuzz
    instance for the curvature-deficit inequality."""
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, max_dents + 1))
    chords = rng.uniform(0.02, max_chord, k)
    kappas = rng.uniform(-max_curvature, max_curvature, k)
    half_widths = np.arcsin(chords / 2.0)
    for _ in range(200):
        centers = np.sort(rng.uniform(-math.pi, math.pi, k))
        gaps_ok = True
        for a in range(k):
            b = (a + 1) % k
            gap = (centers[b] - centers[a]) % (2.0 * math.pi)
            if gap < half_widths[a] + half_widths[b] + 0.08:
                gaps_ok = False
                break
        if gaps_ok:
            break
    else:
        raise DomainError(f"could not separate {k} dents")

    segments = []
    marked = []
    idx = 0
    for a in range(k):
        lo = centers[a] + half_widths[a]
        hi_center = centers[(a + 1) % k]
        hi = hi_center - half_widths[(a + 1) % k]
        sweep = (hi - lo) % (2.0 * math.pi)
        p_lo = (math.cos(lo), math.sin(lo))
        # dent over the chord of the next marked position
        start_angle = hi_center - half_widths[(a + 1) % k]
        end_angle = hi_center + half_widths[(a + 1) % k]
        p_hi = (math.cos(start_angle), math.sin(start_angle))
        n_pieces = max(1, int(math.ceil(sweep / (0.5 * math.pi))))
        pts = [p_lo]
        for m in range(1, n_pieces):
            phi = lo + sweep * m / n_pieces
            pts.append((math.cos(phi), math.sin(phi)))
        pts.append(p_hi)
        for m in range(n_pieces):
            segments.append(ArcSegment(pts[m], pts[m + 1], 1.0, 1, 0))
            idx += 1
        p_end = (math.cos(end_angle), math.sin(end_angle))
        segments.append(
            ArcSegment(p_hi, p_end, float(kappas[(a + 1) % k]), 1, 0)
        )
        marked.append(idx)
        idx += 1
    cluster = Cluster(1, segments)
    return MarkedChamber(cluster, 1, marked)
