"""Scalar kernel for circular arcs, circular segments and perturbed circles.

Conventions: an arc is described by the length ``chord`` of its chord and a
signed curvature ``kappa``; positive curvature means the arc is curved
outwards with respect to the region whose boundary it belongs to.  All arcs
subtend at most a half turn, which is exactly the reach of the constraint
``|chord * kappa| <= 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .errors import DomainError, NumericError

# Below this value of |chord * kappa| the closed forms for arc length and
# segment area are evaluated by their Taylor series to avoid cancellation.
SERIES_THRESHOLD = 1e-4

# Slack for the |chord * kappa| <= 2 domain check, in units of the bound.
_DOMAIN_SLACK = 1e-12


def _checked_x(chord: float, kappa: float) -> float:
    """Validate the chord/curvature pair and return x = chord * kappa."""
    if chord < 0.0:
        raise DomainError(f"chord length must be >= 0, got {chord}")
    x = chord * kappa
    if abs(x) > 2.0 * (1.0 + _DOMAIN_SLACK):
        raise DomainError(
            f"|chord * kappa| = {abs(x)} exceeds 2: no arc of curvature "
            f"{kappa} spans a chord of length {chord}"
        )
    return min(2.0, max(-2.0, x))


def arc_angle(chord: float, kappa: float) -> float:
    """Signed angle subtended by the arc: 2*arcsin(chord*kappa/2)."""
    x = _checked_x(chord, kappa)
    if abs(x) < SERIES_THRESHOLD:
        return x + x**3 / 24.0 + 3.0 * x**5 / 640.0
    return 2.0 * math.asin(0.5 * x)


def arc_length(chord: float, kappa: float) -> float:
    """Length of the arc over the chord; equals the chord when kappa == 0."""
    x = _checked_x(chord, kappa)
    if abs(x) < SERIES_THRESHOLD:
        return chord * (1.0 + x**2 / 24.0 + 3.0 * x**4 / 640.0)
    return chord * (2.0 * math.asin(0.5 * x)) / x


def segment_area(chord: float, kappa: float) -> float:
    """Signed area between the chord and the arc (sign of kappa).

    Equivalent to theta*r^2/2 - r^2*cos(theta/2)*sin(theta/2) with
    r = 1/kappa; evaluated as (theta - sin(theta)) / (2*kappa^2).
    """
    x = _checked_x(chord, kappa)
    if abs(x) < SERIES_THRESHOLD:
        return chord**3 * kappa / 12.0 * (1.0 + 3.0 * x**2 / 40.0)
    theta = 2.0 * math.asin(0.5 * x)
    return (theta - math.sin(theta)) / (2.0 * kappa * kappa)


@dataclass(frozen=True)
class ChordArc:
    """A constant-curvature arc given by chord length and signed curvature."""

    chord: float
    kappa: float

    def __post_init__(self):
        _checked_x(self.chord, self.kappa)

    @property
    def angle(self) -> float:
        return arc_angle(self.chord, self.kappa)

    @property
    def length(self) -> float:
        return arc_length(self.chord, self.kappa)

    @property
    def area(self) -> float:
        return segment_area(self.chord, self.kappa)

    @property
    def radius(self) -> float:
        if self.kappa == 0.0:
            return math.inf
        return 1.0 / abs(self.kappa)


# ---------------------- tangent-circle polar geometry ----------------------


def tangent_circle_polar(r: float, R: float, theta: float) -> float:
    """Polar radius of a circle of radius |R| tangent at (r, 0) to the circle
    of radius r about the origin, with its center at (r + R, 0).

    Positive R puts the center beyond the tangency point, negative R on the
    same side as the origin.  Only the branch through the tangency point is
    returned.
    """
    if R == 0.0:
        raise DomainError("R must be nonzero")
    if r <= 0.0:
        raise DomainError(f"r must be positive, got {r}")
    s = math.sin(theta)
    arg = 1.0 - (1.0 + r / R) ** 2 * s * s
    if arg < 0.0:
        raise DomainError(
            f"theta = {theta} is outside the near branch: "
            f"1 - (1 + r/R)^2 sin^2(theta) = {arg} < 0"
        )
    return (R + r) * math.cos(theta) - R * math.sqrt(arg)


def tangent_branch_limit(r: float, R: float) -> float:
    """Largest angle for which tangent_circle_polar stays on its branch."""
    c = abs(1.0 + r / R)
    if c <= 1.0:
        return 0.5 * math.pi
    return math.asin(1.0 / c)


def invert_chord_to_angle(chord: float, r: float, R: float) -> float:
    """Half-angle dt solving 2 * rho(dt) * sin(dt) = chord for the tangent
    circle rho = tangent_circle_polar(r, R, .), rooted in (0, pi/4]."""
    if chord < 0.0:
        raise DomainError(f"chord must be >= 0, got {chord}")
    if chord == 0.0:
        return 0.0

    def f(t: float) -> float:
        return 2.0 * tangent_circle_polar(r, R, t) * math.sin(t) - chord

    t_hi = min(0.25 * math.pi, tangent_branch_limit(r, R) * (1.0 - 1e-12))
    if f(t_hi) < 0.0:
        raise DomainError(
            f"no root of 2*rho(t)*sin(t) = {chord} in (0, {t_hi:.6g}]: "
            "chord too long for this tangent-circle branch"
        )
    return brentq(f, 0.0, t_hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)


# -------------------------- radial perturbations ---------------------------


class RadialProfile:
    """Normal perturbation u of the unit circle, u > -1 and u(-pi) == u(pi)."""

    def value(self, t: float) -> float:
        raise NotImplementedError

    def derivative(self, t: float) -> float:
        raise NotImplementedError

    def sup_value(self) -> float:
        raise NotImplementedError

    def sup_slope(self) -> float:
        raise NotImplementedError

    def min_value(self) -> float:
        raise NotImplementedError

    def w1inf_norm(self) -> float:
        return max(self.sup_value(), self.sup_slope())


class PiecewiseLinearProfile(RadialProfile):
    """Piecewise-linear u over knots spanning [-pi, pi]; integrals are exact."""

    def __init__(self, angles: Sequence[float], values: Sequence[float]):
        a = np.asarray(angles, dtype=float)
        v = np.asarray(values, dtype=float)
        if a.ndim != 1 or a.shape != v.shape or a.size < 2:
            raise DomainError("angles and values must be equal-length 1d arrays")
        if not np.all(np.diff(a) > 0.0):
            raise DomainError("knot angles must be strictly increasing")
        if abs(a[0] + math.pi) > 1e-12 or abs(a[-1] - math.pi) > 1e-12:
            raise DomainError("knots must span [-pi, pi]")
        if abs(v[0] - v[-1]) > 1e-12:
            raise DomainError("profile must close up: u(-pi) == u(pi)")
        if np.min(v) <= -1.0:
            raise DomainError("u must stay > -1 so the curve remains a graph")
        self.angles = a
        self.values = v

    def _piece(self, t: float) -> int:
        i = int(np.searchsorted(self.angles, t, side="right")) - 1
        return min(max(i, 0), len(self.angles) - 2)

    def value(self, t: float) -> float:
        i = self._piece(t)
        a0, a1 = self.angles[i], self.angles[i + 1]
        v0, v1 = self.values[i], self.values[i + 1]
        return v0 + (v1 - v0) * (t - a0) / (a1 - a0)

    def derivative(self, t: float) -> float:
        i = self._piece(t)
        return (self.values[i + 1] - self.values[i]) / (
            self.angles[i + 1] - self.angles[i]
        )

    def sup_value(self) -> float:
        return float(np.max(np.abs(self.values)))

    def min_value(self) -> float:
        return float(np.min(self.values))

    def sup_slope(self) -> float:
        return float(np.max(np.abs(np.diff(self.values) / np.diff(self.angles))))

    def integral_u(self) -> float:
        h = np.diff(self.angles)
        return float(np.sum(h * (self.values[:-1] + self.values[1:]) * 0.5))

    def integral_u_squared(self) -> float:
        h = np.diff(self.angles)
        v0, v1 = self.values[:-1], self.values[1:]
        return float(np.sum(h * (v0 * v0 + v0 * v1 + v1 * v1) / 3.0))

    def integral_du_squared(self) -> float:
        h = np.diff(self.angles)
        m = np.diff(self.values) / h
        return float(np.sum(m * m * h))

    def length_exact(self) -> float:
        """Exact length of the polar graph rho = 1 + u: spiral arcs per piece."""
        total = 0.0
        for i in range(len(self.angles) - 1):
            h = self.angles[i + 1] - self.angles[i]
            ra = 1.0 + self.values[i]
            rb = 1.0 + self.values[i + 1]
            m = (rb - ra) / h
            total += _spiral_piece_length(ra, rb, m, h)
        return total


def _spiral_piece_length(ra: float, rb: float, m: float, h: float) -> float:
    """Arc length of rho(t) linear from ra to rb over a parameter span h."""
    if abs(m) <= 1e-6 * max(ra, rb, 1.0):
        # sqrt(rho^2 + m^2) = rho + m^2/(2 rho) + O(m^4); dropped term < 1e-24
        base = 0.5 * h * (ra + rb)
        if m == 0.0:
            return base
        inv = h * math.log1p((rb - ra) / ra) / (rb - ra)
        return base + 0.5 * m * m * inv

    am = abs(m)

    def antideriv(w: float) -> float:
        return 0.5 * (w * math.hypot(w, m) + m * m * math.asinh(w / am))

    return (antideriv(rb) - antideriv(ra)) / m


class SmoothProfile(RadialProfile):
    """Profile given by callables u(t) and u'(t); norms sampled on a grid."""

    _SAMPLES = 8192

    def __init__(self, u: Callable[[float], float], du: Callable[[float], float]):
        self.u = u
        self.du = du
        ts = np.linspace(-math.pi, math.pi, self._SAMPLES)
        self._vals = np.array([u(t) for t in ts])
        self._slopes = np.array([du(t) for t in ts])
        if np.min(self._vals) <= -1.0:
            raise DomainError("u must stay > -1 so the curve remains a graph")
        if abs(u(-math.pi) - u(math.pi)) > 1e-9:
            raise DomainError("profile must close up: u(-pi) == u(pi)")

    def value(self, t: float) -> float:
        return self.u(t)

    def derivative(self, t: float) -> float:
        return self.du(t)

    def sup_value(self) -> float:
        return float(np.max(np.abs(self._vals)))

    def min_value(self) -> float:
        return float(np.min(self._vals))

    def sup_slope(self) -> float:
        return float(np.max(np.abs(self._slopes)))


def _quad_full(f: Callable[[float], float], abs_tol: float) -> float:
    val, err = quad(f, -math.pi, math.pi, epsabs=abs_tol * 1e-2, epsrel=1e-13, limit=400)
    if err > abs_tol:
        raise NumericError(
            f"quadrature reached absolute error {err:.3e} > {abs_tol:.3e}",
            achieved=err,
        )
    return val


def perturbed_area(profile: RadialProfile) -> float:
    """Exact area enclosed by the curve (1 + u(t)) (cos t, sin t):
    pi + integral(u) + integral(u^2)/2.  This is an identity, not a series."""
    if isinstance(profile, PiecewiseLinearProfile):
        return math.pi + profile.integral_u() + 0.5 * profile.integral_u_squared()
    i1 = _quad_full(profile.value, 1e-12)
    i2 = _quad_full(lambda t: profile.value(t) ** 2, 1e-12)
    return math.pi + i1 + 0.5 * i2


def perturbed_length_exact(profile: RadialProfile, abs_tol: float = 1e-10) -> float:
    """Length of the perturbed circle: integral of sqrt((1+u)^2 + u'^2)."""
    if isinstance(profile, PiecewiseLinearProfile):
        return profile.length_exact()

    def speed(t: float) -> float:
        return math.hypot(1.0 + profile.value(t), profile.derivative(t))

    return _quad_full(speed, abs_tol)


def perturbed_length_series(profile: RadialProfile) -> float:
    """Second-order length 2*pi + integral(u) + integral(u'^2)/2.

    Valid when u >= -1/2 pointwise and the W^{1,inf} norm is at most 1; the
    caller compares against perturbed_length_exact to bound the remainder.
    """
    if profile.min_value() < -0.5:
        raise DomainError("series length requires u >= -1/2 pointwise")
    if profile.w1inf_norm() > 1.0:
        raise DomainError("series length requires W^{1,inf} norm <= 1")
    if isinstance(profile, PiecewiseLinearProfile):
        return 2.0 * math.pi + profile.integral_u() + 0.5 * profile.integral_du_squared()
    i1 = _quad_full(profile.value, 1e-12)
    idu2 = _quad_full(lambda t: profile.derivative(t) ** 2, 1e-12)
    return 2.0 * math.pi + i1 + 0.5 * idu2
