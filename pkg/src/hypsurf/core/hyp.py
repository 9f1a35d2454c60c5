"""2x2 matrix hyperbolic geometry in the upper half-plane.

PSL2(R) is identified with the unit tangent bundle of H: a matrix A stands
for A*v0, v0 the upward unit vector at i. The geodesic and horocycle flows
act by multiplication on the right, the surface group by multiplication on
the left.

Points of the boundary R u {inf} are plain floats with ``math.inf`` as the
tagged point at infinity.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import StrEnum
from typing import Optional

import numpy as np

from hypsurf.config.settings_service import SettingsService
from hypsurf.errors import (
    DegenerateConfiguration,
    EllipticOrParabolic,
    InvalidParameter,
    NotFactorable,
)

INF = math.inf
TWO_PI = 2.0 * math.pi


def default_tolerance() -> float:
    return SettingsService().tolerance


def _canonical_sign(a: float, b: float, c: float, d: float) -> tuple[float, float, float, float]:
    for x in (a, b, c, d):
        if x != 0.0:
            if x < 0.0:
                return -a, -b, -c, -d
            break
    # +0.0 for any signed zero
    return a + 0.0, b + 0.0, c + 0.0, d + 0.0


@dataclass(frozen=True, slots=True)
class Mat2:
    """A unit-determinant real 2x2 matrix up to sign.

    Construct through :meth:`of`, which normalises the determinant and picks
    the representative whose first nonzero entry is positive.
    """

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def of(cls, a: float, b: float, c: float, d: float) -> Mat2:
        det = a * d - b * c
        if not det > 0.0 or not math.isfinite(det):
            raise InvalidParameter(f"matrix must have positive finite determinant, got det={det!r}")
        s = math.sqrt(det)
        return cls(*_canonical_sign(a / s, b / s, c / s, d / s))

    @classmethod
    def identity(cls) -> Mat2:
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_array(cls, arr) -> Mat2:
        a, b, c, d = (float(x) for x in np.asarray(arr, dtype=float).reshape(4))
        return cls.of(a, b, c, d)

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d], dtype=float)

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    @property
    def trace(self) -> float:
        return self.a + self.d

    def __matmul__(self, other: Mat2) -> Mat2:
        a = self.a * other.a + self.b * other.c
        b = self.a * other.b + self.b * other.d
        c = self.c * other.a + self.d * other.c
        d = self.c * other.b + self.d * other.d
        return Mat2(*_canonical_sign(a, b, c, d))

    def inverse(self) -> Mat2:
        return Mat2(*_canonical_sign(self.d, -self.b, -self.c, self.a))

    def power(self, k: int) -> Mat2:
        if k < 0:
            return self.inverse().power(-k)
        out = Mat2.identity()
        base = self
        while k:
            if k & 1:
                out = out @ base
            base = base @ base
            k >>= 1
        return out

    def act(self, z: complex | float) -> complex | float:
        """Mobius action on H or on the boundary (floats, ``inf`` allowed)."""
        if isinstance(z, float) and math.isinf(z):
            return self.a / self.c if self.c != 0.0 else INF
        den = self.c * z + self.d
        if den == 0:
            return INF
        return (self.a * z + self.b) / den

    def distance_to(self, other: Mat2) -> float:
        """Sup-norm distance in PSL2, i.e. minimised over the sign."""
        plus = max(abs(x - y) for x, y in zip(self._entries(), other._entries()))
        minus = max(abs(x + y) for x, y in zip(self._entries(), other._entries()))
        return min(plus, minus)

    def approx_eq(self, other: Mat2, tol: float = 1e-9) -> bool:
        return self.distance_to(other) <= tol

    def is_identity(self, tol: float = 1e-8) -> bool:
        return self.approx_eq(Mat2.identity(), tol)

    def _entries(self) -> tuple[float, float, float, float]:
        return self.a, self.b, self.c, self.d


I = 1j


@dataclass(frozen=True, slots=True)
class UnitTangent:
    """A unit tangent vector of H, stored as the frame ``A`` with v = A*v0."""

    frame: Mat2

    @classmethod
    def at(cls, z: complex, theta: float) -> UnitTangent:
        """The vector based at ``z`` pointing at angle ``theta`` (radians, from +x)."""
        if z.imag <= 0:
            raise InvalidParameter(f"base point must lie in the upper half-plane, got {z!r}")
        sy = math.sqrt(z.imag)
        affine = Mat2(sy, z.real / sy, 0.0, 1.0 / sy)
        return cls(affine @ rotation_matrix(theta - math.pi / 2.0))

    @property
    def base_point(self) -> complex:
        return complex(self.frame.act(I))

    @property
    def direction(self) -> float:
        """Angle of the vector in [0, 2pi)."""
        f = self.frame
        return (math.pi / 2.0 - 2.0 * math.atan2(f.c, f.d)) % TWO_PI


@dataclass(frozen=True, slots=True)
class GeodesicLine:
    """An oriented complete geodesic, given by its boundary endpoints."""

    p_repel: float
    p_attract: float

    def __post_init__(self) -> None:
        if self.p_repel == self.p_attract:
            raise DegenerateConfiguration(f"geodesic endpoints coincide: {self.p_repel!r}")

    def reversed(self) -> GeodesicLine:
        return GeodesicLine(self.p_attract, self.p_repel)

    def image(self, m: Mat2) -> GeodesicLine:
        return GeodesicLine(float(m.act(self.p_repel)), float(m.act(self.p_attract)))


@dataclass(frozen=True, slots=True)
class FlowBoxCoords:
    r1: float
    t: float
    r2: float


class FlowKind(StrEnum):
    GEODESIC = "geodesic"
    STABLE = "stable"
    UNSTABLE = "unstable"


# ── flows ───────────────────────────────────────────────────────


def flow_matrix(kind: FlowKind | str, s: float) -> Mat2:
    """g_s, h^s_s or h^u_s."""
    if not math.isfinite(s):
        raise InvalidParameter(f"flow parameter must be finite, got {s!r}")
    kind = FlowKind(kind)
    if kind is FlowKind.GEODESIC:
        return Mat2(math.exp(s / 2.0), 0.0, 0.0, math.exp(-s / 2.0))
    if kind is FlowKind.STABLE:
        return Mat2(*_canonical_sign(1.0, s, 0.0, 1.0))
    return Mat2(*_canonical_sign(1.0, 0.0, s, 1.0))


def frame_at(z: complex, theta: float) -> UnitTangent:
    return UnitTangent.at(z, theta)


def apply_flow(v: UnitTangent, kind: FlowKind | str, s: float) -> UnitTangent:
    return UnitTangent(v.frame @ flow_matrix(kind, s))


def rotation_matrix(theta: float) -> Mat2:
    """Right multiplication by this rotates a vector by ``theta`` about its base point."""
    phi = theta / 2.0
    return Mat2(*_canonical_sign(math.cos(phi), math.sin(phi), -math.sin(phi), math.cos(phi)))


def rotate(v: UnitTangent, theta: float) -> UnitTangent:
    return UnitTangent(v.frame @ rotation_matrix(theta))


# ── translation length and axes ─────────────────────────────────


def trace_to_length(tr: float, tol: Optional[float] = None) -> float:
    tol = default_tolerance() if tol is None else tol
    if abs(tr) <= 2.0 + tol:
        raise EllipticOrParabolic(f"|trace| = {abs(tr)!r} is not > 2 (element is not hyperbolic)")
    return 2.0 * math.acosh(abs(tr) / 2.0)


def axis(m: Mat2, tol: Optional[float] = None) -> GeodesicLine:
    """Fixed points of a hyperbolic element, ordered (repelling, attracting)."""
    tol = default_tolerance() if tol is None else tol
    tr = m.trace
    if abs(tr) <= 2.0 + tol:
        raise EllipticOrParabolic(f"|trace| = {abs(tr)!r} has no axis")
    a, b, c, d = m.a, m.b, m.c, m.d
    root = math.sqrt(tr * tr - 4.0)
    amd = a - d
    big = amd + math.copysign(root, amd) if amd != 0.0 else root
    # Roots of c x^2 + (d - a) x - b = 0 in a cancellation-free form.
    x_far = big / (2.0 * c) if c != 0.0 else INF
    x_near = -2.0 * b / big + 0.0
    if abs(c * x_near + d) > 1.0:
        return GeodesicLine(x_far, x_near)
    return GeodesicLine(x_near, x_far)


def boundary_angle(x: float) -> float:
    """Position of a boundary point on the circle: 2*atan(x), with inf at pi."""
    if math.isinf(x):
        return math.pi
    return 2.0 * math.atan(x)


def _ccw(frm: float, to: float) -> float:
    return (to - frm) % TWO_PI


def in_open_arc(x: float, start: float, end: float) -> bool:
    """True iff boundary point ``x`` lies strictly inside the positive arc start -> end."""
    ax, a0, a1 = boundary_angle(x), boundary_angle(start), boundary_angle(end)
    return 0.0 < _ccw(a0, ax) < _ccw(a0, a1)


def axes_cross(l1: GeodesicLine, l2: GeodesicLine, tol: Optional[float] = None) -> bool:
    """True iff the endpoints of ``l2`` separate those of ``l1`` on the boundary."""
    tol = default_tolerance() if tol is None else tol
    pts = [l1.p_repel, l1.p_attract, l2.p_repel, l2.p_attract]
    angles = [boundary_angle(p) for p in pts]
    for i in range(4):
        for j in range(i + 1, 4):
            gap = _ccw(angles[i], angles[j])
            if min(gap, TWO_PI - gap) <= tol:
                raise DegenerateConfiguration(
                    f"boundary endpoints {pts[i]!r} and {pts[j]!r} coincide within {tol}"
                )
    return in_open_arc(l2.p_repel, l1.p_repel, l1.p_attract) != in_open_arc(
        l2.p_attract, l1.p_repel, l1.p_attract
    )


# ── flow-box chart ──────────────────────────────────────────────


def flowbox_factor(m: Mat2) -> FlowBoxCoords:
    """Solve m = h^u_{r1} g_t h^s_{r2}."""
    a, b, c = m.a, m.b, m.c
    if a < 0.0:
        a, b, c = -a, -b, -c
    if not a > 0.0:
        raise NotFactorable(f"matrix {m} has a = 0 and lies outside the flow-box chart")
    return FlowBoxCoords(r1=c / a, t=2.0 * math.log(a), r2=b / a)


def compose_flowbox(coords: FlowBoxCoords) -> Mat2:
    """h^u_{r1} g_t h^s_{r2}."""
    e = math.exp(coords.t / 2.0)
    return Mat2(e, e * coords.r2, coords.r1 * e, coords.r1 * coords.r2 * e + 1.0 / e)


# ── points and geodesics in H ───────────────────────────────────


def hyperbolic_distance(z: complex, w: complex) -> float:
    return math.acosh(1.0 + abs(z - w) ** 2 / (2.0 * z.imag * w.imag))


def geodesic_through(z1: complex, z2: complex) -> GeodesicLine:
    """The complete geodesic through two points, oriented from z1 to z2."""
    if z1 == z2:
        raise DegenerateConfiguration(f"points coincide: {z1!r}")
    x1, x2 = z1.real, z2.real
    if abs(x1 - x2) <= 1e-14 * max(1.0, abs(x1), abs(x2)):
        if z2.imag > z1.imag:
            return GeodesicLine(x1, INF)
        return GeodesicLine(INF, x1)
    x0 = (abs(z1) ** 2 - abs(z2) ** 2) / (2.0 * (x1 - x2))
    r = abs(z1 - x0)
    if x2 > x1:
        return GeodesicLine(x0 - r, x0 + r)
    return GeodesicLine(x0 + r, x0 - r)


def point_to_axis_distance(z: complex, line: GeodesicLine) -> float:
    p, q = line.p_repel, line.p_attract
    if math.isinf(p) or math.isinf(q):
        x0 = q if math.isinf(p) else p
        return math.asinh(abs(z.real - x0) / z.imag)
    m, r = (p + q) / 2.0, abs(q - p) / 2.0
    return math.asinh(abs(abs(z - m) ** 2 - r * r) / (2.0 * r * z.imag))


def axis_frame(line: GeodesicLine, z: complex = I) -> Mat2:
    """Matrix F with F(0) = repel, F(inf) = attract and F(i) the foot of ``z`` on the line."""
    p, q = line.p_repel, line.p_attract
    if math.isinf(p):
        m0 = Mat2.of(q, -1.0, 1.0, 0.0)
    elif math.isinf(q):
        m0 = Mat2.of(1.0, p, 0.0, 1.0)
    else:
        s = 1.0 if q > p else -1.0
        m0 = Mat2.of(s * q, p, s, 1.0)
    w = m0.inverse().act(z)
    return m0 @ flow_matrix(FlowKind.GEODESIC, math.log(abs(w)))


def line_parameter(frame: Mat2, x: complex) -> float:
    """Signed arc-length position of ``x`` along the axis of ``frame`` (0 at frame(i))."""
    w = frame.inverse().act(x)
    return math.log(abs(w))


def point_on_axis(frame: Mat2, s: float) -> complex:
    return complex(frame.act(I * math.exp(s)))
