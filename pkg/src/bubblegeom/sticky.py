"""Disk configurations, contact graphs and the weighted tangency functional.

The tangency functional is T = -sum over touching pairs of 2 r_i r_j /
(r_i + r_j) (the harmonic mean of the radii).  For equal radii its
maximizers are triangular-lattice packings, so exhaustive lattice
enumeration doubles as a brute-force oracle for the stochastic search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError, InfeasibleError, NumericError, ResourceLimitError

# ----------------------------- configurations -------------------------------


class DiskConfiguration:
    """Disk centers and radii with pairwise non-overlapping interiors."""

    def __init__(
        self,
        centers: Sequence[Sequence[float]] | np.ndarray,
        radii: Sequence[float] | np.ndarray,
        overlap_tol: float | None = None,
    ):
        self.centers = np.asarray(centers, dtype=float).reshape(-1, 2)
        self.radii = np.asarray(radii, dtype=float).reshape(-1)
        if len(self.centers) != len(self.radii):
            raise DomainError("need one radius per center")
        if np.any(self.radii <= 0.0):
            raise DomainError("radii must be positive")
        tol = overlap_tol if overlap_tol is not None else 1e-9 * float(np.max(self.radii))
        gaps = self.pair_gaps()
        worst = gaps.min() if gaps.size else 0.0
        if worst < -tol:
            raise InfeasibleError(
                f"disks overlap by {-worst:.3e} (tolerance {tol:.3e})"
            )

    @property
    def n(self) -> int:
        return len(self.radii)

    def pair_gaps(self) -> np.ndarray:
        """gap_ij = dist(c_i, c_j) - (r_i + r_j) for i < j, flattened."""
        n = self.n
        if n < 2:
            return np.zeros(0)
        diff = self.centers[:, None, :] - self.centers[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        target = self.radii[:, None] + self.radii[None, :]
        iu = np.triu_indices(n, 1)
        return (dist - target)[iu]

    def to_json_dict(self) -> dict:
        return {
            "radii": [float(r) for r in self.radii],
            "centers": [[float(x), float(y)] for x, y in self.centers],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "DiskConfiguration":
        return cls(d["centers"], d["radii"])


def harmonic_weight(ri: float, rj: float) -> float:
    return 2.0 * ri * rj / (ri + rj)


@dataclass(frozen=True)
class ContactGraph:
    """Simple undirected graph of exact tangencies with harmonic-mean weights."""

    n: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...]

    def degree(self) -> np.ndarray:
        d = np.zeros(self.n, dtype=int)
        for i, j in self.edges:
            d[i] += 1
            d[j] += 1
        return d

    def total_weight(self) -> float:
        return float(sum(self.weights))


@dataclass(frozen=True)
class StickyEnergyLedger:
    """Value of the tangency functional with its contact diagnostics."""

    tangency: float
    contacts: int
    path2: int


def contact_graph(config: DiskConfiguration, tol: float | None = None) -> ContactGraph:
    """Edges where |dist - (r_i + r_j)| <= tol; overlap beyond tol is an error."""
    if tol is None:
        tol = 1e-9 * float(np.max(config.radii))
    edges = []
    weights = []
    for i, j in combinations(range(config.n), 2):
        d = float(np.hypot(*(config.centers[i] - config.centers[j])))
        target = config.radii[i] + config.radii[j]
        if d < target - tol:
            raise InfeasibleError(
                f"disks {i} and {j} overlap: dist {d:.12g} < {target:.12g} - tol"
            )
        if d <= target + tol:
            edges.append((i, j))
            weights.append(harmonic_weight(config.radii[i], config.radii[j]))
    return ContactGraph(config.n, tuple(edges), tuple(weights))


def path2_count(graph: ContactGraph) -> int:
    """Number of two-step paths: sum over vertices of deg*(deg-1)/2."""
    return int(sum(d * (d - 1) // 2 for d in graph.degree()))


def tangency_energy(
    config: DiskConfiguration, tol: float | None = None
) -> StickyEnergyLedger:
    g = contact_graph(config, tol)
    return StickyEnergyLedger(-g.total_weight(), len(g.edges), path2_count(g))


def sticky_potential(r: float, tol: float = 1e-9) -> float:
    """Hard-core pair potential: +inf inside, -1 at contact, 0 beyond."""
    if r < 0.0:
        raise DomainError("distance must be >= 0")
    if r < 1.0 - tol:
        return math.inf
    if r <= 1.0 + tol:
        return -1.0
    return 0.0


# --------------------------- lattice enumeration ----------------------------

_ENUMERATION_CAP = 10


def _tri_neighbors(cell: tuple[int, int]) -> tuple[tuple[int, int], ...]:
    q, r = cell
    return (
        (q + 1, r),
        (q - 1, r),
        (q, r + 1),
        (q, r - 1),
        (q + 1, r - 1),
        (q - 1, r + 1),
    )


def _enumerate_fixed_animals(n: int, visit: Callable[[list, int], None]) -> int:
    """Redelmeier enumeration of connected n-cell subsets of the triangular
    lattice up to translation.  Calls visit(cells, edge_count) per animal and
    returns the total count."""
    origin = (0, 0)
    reached = {origin}
    animal: list[tuple[int, int]] = []
    animal_set: set[tuple[int, int]] = set()
    count = 0

    def rec(untried: list, edges: int):
        nonlocal count
        while untried:
            cell = untried.pop()
            nbrs = _tri_neighbors(cell)
            gained = sum(1 for nb in nbrs if nb in animal_set)
            animal.append(cell)
            animal_set.add(cell)
            if len(animal) == n:
                count += 1
                visit(animal, edges + gained)
            else:
                new_cells = [
                    nb
                    for nb in nbrs
                    if (nb[1] > 0 or (nb[1] == 0 and nb[0] >= 0))
                    and nb not in reached
                ]
                reached.update(new_cells)
                rec(untried + new_cells, edges + gained)
                reached.difference_update(new_cells)
            animal.pop()
            animal_set.remove(cell)

    rec([origin], 0)
    return count


def _rot60(c: tuple[int, int]) -> tuple[int, int]:
    q, r = c
    return (-r, q + r)


def _reflect(c: tuple[int, int]) -> tuple[int, int]:
    q, r = c
    return (q, -q - r)


def _canonical_cells(cells, with_reflection: bool = True):
    """Canonical form of a lattice cell set modulo translations, the six
    rotations, and (optionally) reflections."""
    best = None
    variants = [list(cells)]
    if with_reflection:
        variants.append([_reflect(c) for c in cells])
    for var in variants:
        cur = var
        for _ in range(6):
            cur = [_rot60(c) for c in cur]
            qmin = min(q for q, _ in cur)
            rmin = min(r for _, r in cur)
            norm = tuple(sorted((q - qmin, r - rmin) for q, r in cur))
            if best is None or norm < best:
                best = norm
    return best


def cells_to_configuration(cells, radius: float = 1.0) -> DiskConfiguration:
    """Lattice cells to tangent disks of the given radius (spacing 2r)."""
    centers = [
        (2.0 * radius * (q + 0.5 * r), 2.0 * radius * r * math.sqrt(3.0) / 2.0)
        for q, r in cells
    ]
    return DiskConfiguration(centers, [radius] * len(cells))


@dataclass
class LatticeEnumeration:
    n: int
    max_contacts: int
    configurations: list[DiskConfiguration]
    count_up_to_isometry: int
    count_up_to_rotation: int
    animals_visited: int
    canonical_forms: list[tuple] = field(repr=False, default_factory=list)


def lattice_enumerate_max_contacts(n: int, cap: int = _ENUMERATION_CAP) -> LatticeEnumeration:
    """Exhaustively enumerate n-site triangular-lattice subsets and return the
    maximum contact count with all distinct maximizers up to isometry.

    Only connected subsets are generated: splitting an optimal configuration
    into two parts always loses at least one contact, so disconnected subsets
    are never maximizers for n >= 2.
    """
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > cap:
        raise ResourceLimitError(
            f"lattice enumeration capped at n <= {cap}, got {n}"
        )
    if n == 1:
        single = cells_to_configuration([(0, 0)])
        return LatticeEnumeration(1, 0, [single], 1, 1, 1, [((0, 0),)])

    best = -1
    maximizers: list[tuple] = []

    def visit(cells, edges):
        nonlocal best, maximizers
        if edges > best:
            best = edges
            maximizers = [tuple(cells)]
        elif edges == best:
            maximizers.append(tuple(cells))

    total = _enumerate_fixed_animals(n, visit)

    canon_refl = {}
    canon_rot = set()
    for cells in maximizers:
        canon_refl.setdefault(_canonical_cells(cells, True), cells)
        canon_rot.add(_canonical_cells(cells, False))
    forms = sorted(canon_refl)
    configs = [cells_to_configuration(canon_refl[f]) for f in forms]
    return LatticeEnumeration(
        n, best, configs, len(canon_refl), len(canon_rot), total, forms
    )


def crystallized_contact_formula(n: int) -> int:
    """Closed-form maximum contact count: floor(3n - sqrt(12n - 3))."""
    return int(math.floor(3 * n - math.sqrt(12 * n - 3)))


# -------------------------- graph canonicalization --------------------------


def _degree_refinement(adj: list[set[int]]) -> list[tuple]:
    colors = [len(a) for a in adj]
    for _ in range(len(adj)):
        new = [
            (colors[v], tuple(sorted(colors[u] for u in adj[v])))
            for v in range(len(adj))
        ]
        order = {c: i for i, c in enumerate(sorted(set(new)))}
        nxt = [order[c] for c in new]
        if nxt == colors:
            break
        colors = nxt
    return colors


def canonical_certificate(graph: ContactGraph, radii: Sequence[float] | None = None):
    """Canonical label of the contact graph (exact for n <= 10) combined with
    the sorted radius multiset; equal certificates mean equivalent packings."""
    n = graph.n
    adj = [set() for _ in range(n)]
    for i, j in graph.edges:
        adj[i].add(j)
        adj[j].add(i)
    colors = _degree_refinement(adj)
    # search over color-respecting orderings for the lexicographically
    # smallest adjacency bitstring
    best: tuple | None = None

    def bitstring(perm):
        pos = {v: k for k, v in enumerate(perm)}
        bits = []
        for a in range(n):
            for b in range(a + 1, n):
                bits.append(1 if perm[b] in adj[perm[a]] else 0)
        return tuple(bits)

    groups: dict[int, list[int]] = {}
    for v, c in enumerate(colors):
        groups.setdefault(c, []).append(v)
    group_keys = sorted(groups)

    from itertools import permutations, product

    pools = [list(permutations(groups[k])) for k in group_keys]
    n_perms = 1
    for p in pools:
        n_perms *= len(p)
    if n_perms > 2_000_000:
        raise ResourceLimitError(
            f"canonical labeling would need {n_perms} orderings"
        )
    for combo in product(*pools):
        perm = [v for block in combo for v in block]
        bits = bitstring(perm)
        if best is None or bits < best:
            best = bits
    radius_key = (
        tuple(sorted(round(float(r), 12) for r in radii)) if radii is not None else ()
    )
    return (n, best, radius_key)


# ------------------------------- projection ---------------------------------


def snap_contacts(
    config: DiskConfiguration,
    threshold: float | None = None,
    target_tol: float = 1e-13,
    max_sweeps: int = 5000,
) -> DiskConfiguration:
    """Move near-contacts (gap <= threshold) to exact tangency by symmetric
    Gauss-Seidel displacement along each pair axis."""
    rbar = float(np.mean(config.radii))
    if threshold is None:
        threshold = 3e-4 * rbar
    centers = config.centers.copy()
    radii = config.radii
    pairs = []
    for i, j in combinations(range(config.n), 2):
        d = float(np.hypot(*(centers[i] - centers[j])))
        if abs(d - (radii[i] + radii[j])) <= threshold:
            pairs.append((i, j))
    tol = target_tol * rbar
    for _ in range(max_sweeps):
        worst = 0.0
        for i, j in pairs:
            delta = centers[j] - centers[i]
            d = float(np.hypot(*delta))
            target = radii[i] + radii[j]
            err = d - target
            worst = max(worst, abs(err))
            if d == 0.0:
                continue
            shift = 0.5 * err / d
            centers[i] += shift * delta
            centers[j] -= shift * delta
        if worst <= tol:
            break
    return DiskConfiguration(centers, radii, overlap_tol=1e-6 * rbar)


# ------------------------------- stochastic search ---------------------------


@dataclass
class AnnealSchedule:
    """Schedule for the smoothed-tangency annealing; all scales are relative
    to the mean radius / mean harmonic weight."""

    steps: int = 4000
    restarts: int = 20
    temp_start: float = 0.8
    temp_end: float = 1e-3
    contact_tau_start: float = 0.1
    contact_tau_end: float = 1e-6
    move_scale_start: float = 0.6
    move_scale_end: float = 0.01
    snap_threshold: float = 3e-4


@dataclass
class SearchResult:
    configuration: DiskConfiguration
    ledger: StickyEnergyLedger
    optima: list[tuple[DiskConfiguration, StickyEnergyLedger]]
    restart_tangencies: list[float]


def _smoothed_energy(centers: np.ndarray, radii: np.ndarray, tau: float) -> float:
    diff = centers[:, None, :] - centers[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    target = radii[:, None] + radii[None, :]
    iu = np.triu_indices(len(radii), 1)
    gaps = np.maximum(dist[iu] - target[iu], 0.0)
    w = (2.0 * radii[:, None] * radii[None, :] / target)[iu]
    return float(-np.sum(w * np.exp(-gaps / tau)))


def _feasible(centers: np.ndarray, radii: np.ndarray, i: int, pos: np.ndarray,
              slack: float) -> bool:
    d = np.hypot(centers[:, 0] - pos[0], centers[:, 1] - pos[1])
    d[i] = np.inf
    return bool(np.all(d >= radii + radii[i] - slack))


def _tangent_to_two(ca, ra, cb, rb, ri, rng):
    """A position tangent to both disks (a, b), or None."""
    Ra, Rb = ra + ri, rb + ri
    delta = cb - ca
    d = float(np.hypot(*delta))
    if d > Ra + Rb or d < abs(Ra - Rb) or d == 0.0:
        return None
    x = (Ra * Ra - Rb * Rb + d * d) / (2.0 * d)
    h2 = Ra * Ra - x * x
    if h2 < 0.0:
        return None
    h = math.sqrt(h2)
    axis = delta / d
    perp = np.array([-axis[1], axis[0]])
    sign = 1.0 if rng.random() < 0.5 else -1.0
    return ca + x * axis + sign * h * perp


def _sequential_init(radii: np.ndarray, rng) -> np.ndarray:
    n = len(radii)
    centers = np.zeros((n, 2))
    slack = 1e-12 * float(np.mean(radii))
    for i in range(1, n):
        for _ in range(200):
            j = int(rng.integers(0, i))
            ang = rng.uniform(0.0, 2.0 * math.pi)
            pos = centers[j] + (radii[i] + radii[j]) * np.array(
                [math.cos(ang), math.sin(ang)]
            )
            if _feasible(centers[:i], radii[:i], -1, pos, slack):
                centers[i] = pos
                break
        else:
            # fall back to a distant spot on the +x axis
            centers[i] = (2.0 * float(np.sum(radii[: i + 1])), 0.0)
    return centers


def _single_restart(radii: np.ndarray, rng, sched: AnnealSchedule):
    n = len(radii)
    rbar = float(np.mean(radii))
    wbar = float(
        np.mean([harmonic_weight(radii[i], radii[j]) for i, j in combinations(range(n), 2)])
    )
    centers = _sequential_init(radii, rng)
    slack = 1e-12 * rbar
    tau = sched.contact_tau_start * rbar
    energy = _smoothed_energy(centers, radii, tau)
    for step in range(sched.steps):
        f = step / max(sched.steps - 1, 1)
        tau = rbar * sched.contact_tau_start * (
            sched.contact_tau_end / sched.contact_tau_start
        ) ** f
        temp = wbar * sched.temp_start * (sched.temp_end / sched.temp_start) ** f
        sigma = rbar * sched.move_scale_start * (
            sched.move_scale_end / sched.move_scale_start
        ) ** f
        i = int(rng.integers(0, n))
        u = rng.random()
        if u < 0.35:
            pos = centers[i] + rng.normal(0.0, sigma, 2)
        elif u < 0.70 and n >= 2:
            j = int(rng.integers(0, n - 1))
            j = j + 1 if j >= i else j
            ang = rng.uniform(0.0, 2.0 * math.pi)
            pos = centers[j] + (radii[i] + radii[j]) * np.array(
                [math.cos(ang), math.sin(ang)]
            )
        else:
            others = [k for k in range(n) if k != i]
            if len(others) < 2:
                continue
            a, b = rng.choice(len(others), 2, replace=False)
            a, b = others[int(a)], others[int(b)]
            cand = _tangent_to_two(
                centers[a], radii[a], centers[b], radii[b], radii[i], rng
            )
            if cand is None:
                continue
            pos = cand
        if not _feasible(centers, radii, i, pos, slack):
            continue
        old = centers[i].copy()
        centers[i] = pos
        new_energy = _smoothed_energy(centers, radii, tau)
        if new_energy <= energy or rng.random() < math.exp(
            -(new_energy - energy) / temp
        ):
            energy = new_energy
        else:
            centers[i] = old
    raw = DiskConfiguration(centers, radii, overlap_tol=1e-6 * rbar)
    snapped = snap_contacts(raw, threshold=sched.snap_threshold * rbar)
    ledger = tangency_energy(snapped)
    return snapped, ledger


def maximize_tangencies(
    radii: Sequence[float],
    seed: int = 0,
    schedule: AnnealSchedule | None = None,
) -> SearchResult:
    """Simulated annealing on the smoothed tangency functional with a final
    projection to exact contacts.  Deterministic for a fixed seed; restart k
    uses seed + k and results merge in restart order."""
    radii = np.asarray(radii, dtype=float)
    if len(radii) < 2:
        raise DomainError("need at least two disks")
    if np.any(radii <= 0.0):
        raise DomainError("radii must be positive")
    sched = schedule or AnnealSchedule()
    results = []
    for k in range(sched.restarts):
        rng = np.random.default_rng(seed + k)
        results.append(_single_restart(radii, rng, sched))
    best_t = min(led.tangency for _, led in results)
    # collect distinct optima among runs that achieved the best value
    seen = {}
    for cfg, led in results:
        if led.tangency <= best_t + 1e-9 * max(abs(best_t), 1.0):
            cert = canonical_certificate(contact_graph(cfg), radii)
            seen.setdefault(cert, (cfg, led))
    ordered = sorted(
        seen.items(),
        key=lambda kv: (kv[1][1].tangency, -kv[1][1].contacts, -kv[1][1].path2, kv[0]),
    )
    optima = [v for _, v in ordered]
    best_cfg, best_led = optima[0]
    return SearchResult(
        best_cfg,
        best_led,
        optima,
        [led.tangency for _, led in results],
    )
