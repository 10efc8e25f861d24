"""Shared cluster builders for the test suite."""

import math

import numpy as np

from bubblegeom.cluster import ArcSegment, Cluster


def disk_cluster(cx=0.0, cy=0.0, r=1.0, chamber=1, n_chambers=1, pieces=4):
    """A single disk chamber as `pieces` equal arcs, CCW, chamber on left."""
    segs = disk_segments(cx, cy, r, chamber, pieces)
    return Cluster(n_chambers, segs)


def disk_segments(cx, cy, r, chamber, pieces=4):
    pts = [
        (cx + r * math.cos(2 * math.pi * k / pieces),
         cy + r * math.sin(2 * math.pi * k / pieces))
        for k in range(pieces)
    ]
    return [
        ArcSegment(pts[k], pts[(k + 1) % pieces], 1.0 / r, chamber, 0)
        for k in range(pieces)
    ]


def square_segments(x0, y0, size, chamber):
    a, b = (x0, y0), (x0 + size, y0)
    c, d = (x0 + size, y0 + size), (x0, y0 + size)
    return [
        ArcSegment(a, b, 0.0, chamber, 0),
        ArcSegment(b, c, 0.0, chamber, 0),
        ArcSegment(c, d, 0.0, chamber, 0),
        ArcSegment(d, a, 0.0, chamber, 0),
    ]


def square_cluster(size=1.0):
    return Cluster(1, square_segments(0.0, 0.0, size, 1))


def lens_cluster(chord=1.0, kappa=1.0):
    """Lens between two outward-bulging arcs over the chord on the x axis."""
    a, b = (0.0, 0.0), (chord, 0.0)
    return Cluster(
        1,
        [
            ArcSegment(a, b, kappa, 1, 0),   # lower arc, bulges -y
            ArcSegment(b, a, kappa, 1, 0),   # upper arc, bulges +y
        ],
    )


def two_squares_cluster():
    """Two unit squares sharing the edge x = 1."""
    segs = [
        ArcSegment((0, 0), (1, 0), 0.0, 1, 0),
        ArcSegment((1, 0), (1, 1), 0.0, 1, 2),  # shared edge, chamber 1 on left
        ArcSegment((1, 1), (0, 1), 0.0, 1, 0),
        ArcSegment((0, 1), (0, 0), 0.0, 1, 0),
        ArcSegment((1, 0), (2, 0), 0.0, 2, 0),
        ArcSegment((2, 0), (2, 1), 0.0, 2, 0),
        ArcSegment((2, 1), (1, 1), 0.0, 2, 0),
    ]
    return Cluster(2, segs)


def grid_cluster(nx, ny, size=1.0):
    """nx-by-ny grid of square chambers sharing edges."""

    def cell(a, b):
        if 0 <= a < nx and 0 <= b < ny:
            return 1 + a + b * nx
        return 0

    segs = []
    for a in range(nx + 1):
        for b in range(ny):
            segs.append(
                ArcSegment(
                    (a * size, b * size),
                    (a * size, (b + 1) * size),
                    0.0,
                    cell(a - 1, b),
                    cell(a, b),
                )
            )
    for b in range(ny + 1):
        for a in range(nx):
            segs.append(
                ArcSegment(
                    (a * size, b * size),
                    ((a + 1) * size, b * size),
                    0.0,
                    cell(a, b),
                    cell(a, b - 1),
                )
            )
    return Cluster(nx * ny, segs)


def random_disk_cluster(seed, max_disks=4):
    """Disjoint random disks, one chamber each."""
    rng = np.random.default_rng(seed)
    k = int(rng.integers(1, max_disks + 1))
    centers, radii = [], []
    while len(centers) < k:
        c = rng.uniform(-4.0, 4.0, 2)
        r = rng.uniform(0.3, 1.2)
        if all(
            np.hypot(*(c - c2)) > r + r2 + 0.05 for c2, r2 in zip(centers, radii)
        ):
            centers.append(c)
            radii.append(r)
    segs = []
    for i, (c, r) in enumerate(zip(centers, radii), start=1):
        segs.extend(disk_segments(c[0], c[1], r, i))
    return Cluster(k, segs)
