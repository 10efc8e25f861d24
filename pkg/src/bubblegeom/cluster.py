"""Planar clusters bounded by constant-curvature arcs.

A cluster is a set of N chambers (indexed 1..N) plus the implicit exterior
chamber 0.  Each boundary piece is an ArcSegment carrying the labels of the
chambers on its two sides.  Boundary loops are stored with the owning chamber
on the left of the start->end direction; positive curvature means the arc
center lies on the left as well, i.e. the arc is convex toward the outside of
the left chamber.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .arcs import arc_angle, arc_length, segment_area
from .errors import DomainError, StructureError

Point = tuple[float, float]

# Vertex matching tolerance and zero-length rejection, as fractions of the
# bounding-box diagonal.
_VERTEX_TOL = 1e-9
_ZERO_LENGTH_TOL = 1e-12


@dataclass(frozen=True)
class ArcSegment:
    """One constant-curvature boundary piece between two vertices."""

    start: Point
    end: Point
    curvature: float
    left: int
    right: int

    def __post_init__(self):
        if self.left == self.right:
            raise StructureError(
                f"segment has the same chamber {self.left} on both sides"
            )

    @property
    def chord(self) -> float:
        return math.hypot(self.end[0] - self.start[0], self.end[1] - self.start[1])

    @property
    def length(self) -> float:
        return arc_length(self.chord, self.curvature)

    @property
    def angle(self) -> float:
        """Signed sweep angle about the arc center (0 for a straight piece)."""
        return arc_angle(self.chord, self.curvature)

    def center(self) -> Point:
        if self.curvature == 0.0:
            raise DomainError("a straight segment has no center")
        l = self.chord
        r = 1.0 / abs(self.curvature)
        h = math.sqrt(max(r * r - 0.25 * l * l, 0.0))
        mx = 0.5 * (self.start[0] + self.end[0])
        my = 0.5 * (self.start[1] + self.end[1])
        nx = -(self.end[1] - self.start[1]) / l
        ny = (self.end[0] - self.start[0]) / l
        s = math.copysign(1.0, self.curvature)
        return (mx + s * h * nx, my + s * h * ny)

    def reversed(self) -> "ArcSegment":
        return ArcSegment(self.end, self.start, -self.curvature, self.right, self.left)

    def oriented(self, chamber: int) -> "ArcSegment":
        """This segment oriented so that ``chamber`` is on the left."""
        if self.left == chamber:
            return self
        if self.right == chamber:
            return self.reversed()
        raise DomainError(f"chamber {chamber} does not border this segment")

    def point_at(self, t: float) -> Point:
        """Point at parameter t in [0, 1] along the arc."""
        if self.curvature == 0.0:
            return (
                self.start[0] + t * (self.end[0] - self.start[0]),
                self.start[1] + t * (self.end[1] - self.start[1]),
            )
        c = self.center()
        r = 1.0 / abs(self.curvature)
        phi0 = math.atan2(self.start[1] - c[1], self.start[0] - c[0])
        phi = phi0 + t * self.angle
        return (c[0] + r * math.cos(phi), c[1] + r * math.sin(phi))

    def tangent_at_start(self) -> Point:
        """Unit tangent in the travel direction at the start vertex."""
        if self.curvature == 0.0:
            l = self.chord
            return ((self.end[0] - self.start[0]) / l, (self.end[1] - self.start[1]) / l)
        c = self.center()
        wx, wy = self.start[0] - c[0], self.start[1] - c[1]
        n = math.hypot(wx, wy)
        s = math.copysign(1.0, self.curvature)
        return (-s * wy / n, s * wx / n)

    def outgoing_tangent(self, vertex: Point, tol: float) -> Point:
        """Unit tangent pointing away from ``vertex`` along the arc."""
        if _dist(vertex, self.start) <= tol:
            return self.tangent_at_start()
        if _dist(vertex, self.end) <= tol:
            tx, ty = self.reversed().tangent_at_start()
            return (tx, ty)
        raise DomainError("vertex is not an endpoint of this segment")

    def polyline(self, max_step: float = 0.05) -> np.ndarray:
        """Sampled points along the arc, angular resolution max_step."""
        if self.curvature == 0.0:
            return np.array([self.start, self.end])
        n = max(1, int(math.ceil(abs(self.angle) / max_step)))
        return np.array([self.point_at(i / n) for i in range(n + 1)])


def _dist(a: Point, b: Point) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


# ------------------------------ weight matrix -------------------------------


class WeightMatrix:
    """Symmetric positive weights c_ij per unit interface length, index 0 =
    exterior.  Triangle-inequality violations are reported, not rejected."""

    def __init__(self, values: np.ndarray | Sequence[Sequence[float]]):
        c = np.asarray(values, dtype=float)
        if c.ndim != 2 or c.shape[0] != c.shape[1]:
            raise DomainError("weight matrix must be square")
        off = ~np.eye(c.shape[0], dtype=bool)
        if not np.all(c[off] > 0.0):
            raise DomainError("weights must be positive off the diagonal")
        if not np.allclose(c, c.T, rtol=0.0, atol=1e-15):
            raise DomainError("weight matrix must be symmetric")
        self.c = c

    @property
    def n(self) -> int:
        return self.c.shape[0] - 1

    def __getitem__(self, ij) -> float:
        return float(self.c[ij])

    @classmethod
    def unit(cls, n_chambers: int) -> "WeightMatrix":
        c = np.ones((n_chambers + 1, n_chambers + 1))
        return cls(c)

    @classmethod
    def epsilon_weights(cls, n_chambers: int, eps: float) -> "WeightMatrix":
        """Weight 1 against the exterior, 2 - eps between interior chambers."""
        if not 0.0 <= eps <= 2.0:
            raise DomainError(f"eps must lie in [0, 2], got {eps}")
        if eps == 2.0:
            # keep positivity: interior weight 0 is degenerate, use exact 0 only
            # in p_epsilon which bypasses the matrix
            raise DomainError("eps = 2 gives zero interior weight; use p_epsilon")
        m = n_chambers + 1
        c = np.full((m, m), 2.0 - eps)
        c[0, :] = 1.0
        c[:, 0] = 1.0
        return cls(c)

    def triangle_violations(self, slack: float = 1e-12) -> list[tuple[int, int, int]]:
        """Triples (i, j, k) with c_ij > c_ik + c_kj; empty list if none."""
        m = self.c.shape[0]
        bad = []
        for i in range(m):
            for j in range(m):
                if i == j:
                    continue
                for k in range(m):
                    if k in (i, j):
                        continue
                    if self.c[i, j] > self.c[i, k] + self.c[k, j] + slack:
                        bad.append((i, j, k))
        return bad


# --------------------------------- cluster ----------------------------------


class Cluster:
    """N chambers bounded by arcs, plus the implicit exterior chamber 0."""

    def __init__(
        self,
        n_chambers: int,
        segments: Sequence[ArcSegment],
        target_areas: Sequence[float] | None = None,
    ):
        if n_chambers < 1:
            raise StructureError("a cluster needs at least one chamber")
        self.n_chambers = int(n_chambers)
        self.segments = list(segments)
        self.target_areas = None if target_areas is None else [float(a) for a in target_areas]
        if self.target_areas is not None and len(self.target_areas) != self.n_chambers:
            raise StructureError("target_areas must list one area per chamber")
        self._validate_segments()

    # -- construction checks --

    def _validate_segments(self):
        if not self.segments:
            raise StructureError("cluster has no boundary segments")
        scale = self.bbox_diagonal()
        for s in self.segments:
            if not (0 <= s.left <= self.n_chambers and 0 <= s.right <= self.n_chambers):
                raise StructureError(
                    f"segment labels ({s.left}, {s.right}) outside 0..{self.n_chambers}"
                )
            if s.chord <= _ZERO_LENGTH_TOL * scale:
                raise StructureError(
                    f"zero-length segment at {s.start} (chord {s.chord:.3e})"
                )
            arc_angle(s.chord, s.curvature)  # validates |chord * kappa| <= 2

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p[0] for s in self.segments for p in (s.start, s.end)]
        ys = [p[1] for s in self.segments for p in (s.start, s.end)]
        return min(xs), min(ys), max(xs), max(ys)

    def bbox_diagonal(self) -> float:
        x0, y0, x1, y1 = self.bbox()
        return math.hypot(x1 - x0, y1 - y0) or 1.0

    def vertex_tolerance(self) -> float:
        return _VERTEX_TOL * self.bbox_diagonal()

    # -- chamber queries --

    def chamber_segments(self, i: int) -> list[ArcSegment]:
        """Segments bordering chamber i, oriented with i on the left."""
        self._check_chamber(i, allow_exterior=True)
        return [s.oriented(i) for s in self.segments if i in (s.left, s.right)]

    def chamber_loops(self, i: int) -> list[list[ArcSegment]]:
        """Oriented boundary loops of chamber i; raises on open loops."""
        edges = self.chamber_segments(i)
        tol = self.vertex_tolerance()

        def key(p: Point) -> tuple[int, int]:
            return (round(p[0] / tol), round(p[1] / tol))

        by_start: dict[tuple[int, int], list[int]] = {}
        for idx, e in enumerate(edges):
            by_start.setdefault(key(e.start), []).append(idx)
        used = [False] * len(edges)
        loops: list[list[ArcSegment]] = []
        for idx in range(len(edges)):
            if used[idx]:
                continue
            loop = [edges[idx]]
            used[idx] = True
            start_key = key(edges[idx].start)
            cursor = key(edges[idx].end)
            while cursor != start_key:
                nxt = None
                for j in by_start.get(cursor, []):
                    if not used[j]:
                        nxt = j
                        break
                if nxt is None:
                    p = loop[-1].end
                    raise StructureError(
                        f"chamber {i}: dangling vertex at ({p[0]:.12g}, {p[1]:.12g})"
                    )
                used[nxt] = True
                loop.append(edges[nxt])
                cursor = key(edges[nxt].end)
            loops.append(loop)
        return loops

    def chamber_area(self, i: int) -> float:
        """Signed area of chamber i: shoelace over vertices plus circular
        segment corrections.  Positive for correctly oriented chambers."""
        self._check_chamber(i)
        total = 0.0
        for loop in self.chamber_loops(i):
            for e in loop:
                ax, ay = e.start
                bx, by = e.end
                total += 0.5 * (ax * by - bx * ay)
                total += segment_area(e.chord, e.curvature)
        return total

    def chamber_perimeter(self, i: int) -> float:
        """Total boundary length of chamber i (all its interfaces)."""
        self._check_chamber(i, allow_exterior=True)
        return sum(s.length for s in self.segments if i in (s.left, s.right))

    def exterior_perimeter(self) -> float:
        return self.chamber_perimeter(0)

    def total_perimeter(self) -> float:
        """Unweighted total interface length (every interface counted once)."""
        return sum(s.length for s in self.segments)

    def interface_length(self, i: int, j: int) -> float:
        self._check_chamber(i, allow_exterior=True)
        self._check_chamber(j, allow_exterior=True)
        if i == j:
            raise DomainError("an interface needs two distinct chambers")
        return sum(
            s.length for s in self.segments if {s.left, s.right} == {i, j}
        )

    def interface_segments(self, i: int, j: int) -> list[ArcSegment]:
        return [s for s in self.segments if {s.left, s.right} == {i, j}]

    def _check_chamber(self, i: int, allow_exterior: bool = False):
        lo = 0 if allow_exterior else 1
        if not lo <= i <= self.n_chambers:
            raise DomainError(f"chamber index {i} outside {lo}..{self.n_chambers}")

    # -- vertices --

    def vertices(self) -> dict[tuple[int, int], list[int]]:
        """Map from vertex key to indices of incident segments."""
        tol = self.vertex_tolerance()
        out: dict[tuple[int, int], list[int]] = {}
        for idx, s in enumerate(self.segments):
            for p in (s.start, s.end):
                out.setdefault((round(p[0] / tol), round(p[1] / tol)), []).append(idx)
        return out

    # -- serialization --

    def to_json_dict(self) -> dict:
        return {
            "n_chambers": self.n_chambers,
            "segments": [
                {
                    "start": [s.start[0], s.start[1]],
                    "end": [s.end[0], s.end[1]],
                    "curvature": s.curvature,
                    "left": s.left,
                    "right": s.right,
                }
                for s in self.segments
            ],
            "target_areas": self.target_areas,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, d: dict) -> "Cluster":
        segments = [
            ArcSegment(
                (s["start"][0], s["start"][1]),
                (s["end"][0], s["end"][1]),
                s["curvature"],
                s["left"],
                s["right"],
            )
            for s in d["segments"]
        ]
        return cls(d["n_chambers"], segments, d.get("target_areas"))

    @classmethod
    def from_json(cls, text: str) -> "Cluster":
        return cls.from_json_dict(json.loads(text))


# ---------------------------- energy functionals ----------------------------


def weighted_perimeter(cluster: Cluster, weights: WeightMatrix) -> float:
    """Sum of c_ij * length(interface ij): one pass, each segment once."""
    if weights.n < cluster.n_chambers:
        raise DomainError("weight matrix too small for this cluster")
    return sum(weights[s.left, s.right] * s.length for s in cluster.segments)


def p_epsilon(cluster: Cluster, eps: float) -> float:
    """Perimeter with weight 1 to the exterior and 2 - eps between chambers."""
    if not 0.0 <= eps <= 2.0:
        raise DomainError(f"eps must lie in [0, 2], got {eps}")
    total = 0.0
    for s in cluster.segments:
        w = 1.0 if (s.left == 0 or s.right == 0) else 2.0 - eps
        total += w * s.length
    return total


def p_epsilon_split(cluster: Cluster, eps: float) -> float:
    """Same energy written as (1 - eps/2) sum_i P(E(i)) + (eps/2) P(E(0))."""
    if not 0.0 <= eps <= 2.0:
        raise DomainError(f"eps must lie in [0, 2], got {eps}")
    interior = sum(
        cluster.chamber_perimeter(i) for i in range(1, cluster.n_chambers + 1)
    )
    return (1.0 - 0.5 * eps) * interior + 0.5 * eps * cluster.exterior_perimeter()


def rescaled_energy(cluster: Cluster, eps: float, radii: Sequence[float]) -> float:
    """(P_eps - sum 2 pi r_i) / ((4/3) eps^{3/2}): the second-order energy."""
    if eps <= 0.0:
        raise DomainError("rescaled energy needs eps > 0")
    p0 = sum(2.0 * math.pi * r for r in radii)
    return (p_epsilon(cluster, eps) - p0) / ((4.0 / 3.0) * eps**1.5)


def triple_point_angle(eps: float) -> float:
    """Vertex half-structure angle: arccos(1 - eps/2) in [0, pi]."""
    if not 0.0 <= eps <= 2.0:
        raise DomainError(f"eps must lie in [0, 2], got {eps}")
    return math.acos(1.0 - 0.5 * eps)


def vertex_balance(
    cluster: Cluster, weights: WeightMatrix, vertex: Point
) -> np.ndarray:
    """Weighted sum of outgoing unit tangents at a vertex; near-zero norm
    certifies the stationarity condition there."""
    tol = cluster.vertex_tolerance()
    incident = [
        s
        for s in cluster.segments
        if _dist(vertex, s.start) <= tol or _dist(vertex, s.end) <= tol
    ]
    if len(incident) < 3:
        raise DomainError(
            f"vertex {vertex} has {len(incident)} incident segments, need >= 3"
        )
    out = np.zeros(2)
    for s in incident:
        tx, ty = s.outgoing_tangent(vertex, tol)
        w = weights[s.left, s.right]
        out += w * np.array([tx, ty])
    return out


# ------------------------------- validation ---------------------------------


@dataclass
class ValidationReport:
    loops_closed: dict[int, bool] = field(default_factory=dict)
    areas: dict[int, float] = field(default_factory=dict)
    positive_areas: bool = True
    triple_points_ok: bool = True
    bad_vertices: list[Point] = field(default_factory=list)
    overlapping_pairs: list[tuple[int, int]] = field(default_factory=list)
    target_area_residuals: dict[int, float] | None = None

    @property
    def ok(self) -> bool:
        return (
            all(self.loops_closed.values())
            and self.positive_areas
            and self.triple_points_ok
            and not self.overlapping_pairs
        )


def winding_numbers(
    cluster: Cluster, chamber: int, points: np.ndarray, max_step: float = 0.1
) -> np.ndarray:
    """Winding number of chamber's oriented boundary around each point."""
    total = np.zeros(len(points))
    for seg in cluster.chamber_segments(chamber):
        poly = seg.polyline(max_step)
        for k in range(len(poly) - 1):
            ax = poly[k, 0] - points[:, 0]
            ay = poly[k, 1] - points[:, 1]
            bx = poly[k + 1, 0] - points[:, 0]
            by = poly[k + 1, 1] - points[:, 1]
            total += np.arctan2(ax * by - ay * bx, ax * bx + ay * by)
    return total / (2.0 * math.pi)


def validate_cluster(cluster: Cluster, resolution: int = 512) -> ValidationReport:
    """Diagnostic pass: loop closure, area positivity, triple-point structure,
    sampled pairwise overlap, and target-area residuals when targets are set."""
    report = ValidationReport()
    for i in range(1, cluster.n_chambers + 1):
        try:
            cluster.chamber_loops(i)
            report.loops_closed[i] = True
            report.areas[i] = cluster.chamber_area(i)
        except StructureError:
            report.loops_closed[i] = False
    if any(a <= 0.0 for a in report.areas.values()):
        report.positive_areas = False

    tol = cluster.vertex_tolerance()
    for vkey, idxs in cluster.vertices().items():
        if len(idxs) > 2 and len(idxs) != 3:
            report.triple_points_ok = False
            report.bad_vertices.append((vkey[0] * tol, vkey[1] * tol))

    if all(report.loops_closed.values()) and cluster.n_chambers >= 2:
        x0, y0, x1, y1 = cluster.bbox()
        xs = np.linspace(x0, x1, resolution)
        ys = np.linspace(y0, y1, resolution)
        gx, gy = np.meshgrid(xs, ys)
        pts = np.column_stack([gx.ravel(), gy.ravel()])
        inside = {}
        for i in range(1, cluster.n_chambers + 1):
            inside[i] = winding_numbers(cluster, i, pts) > 0.5
        for i in range(1, cluster.n_chambers + 1):
            for j in range(i + 1, cluster.n_chambers + 1):
                if np.any(inside[i] & inside[j]):
                    report.overlapping_pairs.append((i, j))

    if cluster.target_areas is not None:
        report.target_area_residuals = {}
        for i in range(1, cluster.n_chambers + 1):
            if report.loops_closed.get(i):
                target = cluster.target_areas[i - 1]
                report.target_area_residuals[i] = (
                    report.areas[i] - target
                ) / max(abs(target), 1e-300)
    return report
