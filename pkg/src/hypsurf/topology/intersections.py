"""
Transverse self-intersections of closed geodesics.

Work in the chart F of the axis A of g: F maps the imaginary axis onto A
with F(i) the foot of the basepoint, so the curve's parameter s is the point
F(i e^s). For a group element gamma, N = F^-1 gamma F carries A to the
geodesic from u = N(0) to v = N(inf); the two cross iff u*v < 0, at height
sqrt(-u*v). Each double point of the closed curve is a crossing with both
parameters in one period, taken once up to swapping the two branches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.spatial import cKDTree

from hypsurf.config.logging_config import configure_logging
from hypsurf.config.settings_service import SettingsService
from hypsurf.core import batch
from hypsurf.core.hyp import FlowKind, axis_frame, flow_matrix, point_to_axis_distance, rotation_matrix
from hypsurf.census.ball import GroupBall, ball_for
from hypsurf.census.geodesics import CensusResult, ClosedGeodesic
from hypsurf.errors import BallTooSmall, DegenerateCrossing, InvalidParameter
from hypsurf.surfaces.regular import SurfaceGroup, reduce_points

logger = configure_logging(__name__)

PARAM_TOL = 1e-7
_ENDPOINT_EPS = 1e-12


@dataclass(frozen=True)
class DoublePoint:
    """
    A transverse double point: the curve passes at parameters s1 < s2.

    ``angle1``/``angle2`` are the directions of the two branches at
    ``point`` (reduced into the fundamental domain); ``sign`` is +1 when the
    second branch crosses the first from its right to its left.
    """
    s1: float
    s2: float
    point: complex
    sign: int
    angle1: float
    angle2: float


@dataclass(frozen=True)
class IntersectionData:
    geodesic: ClosedGeodesic
    double_points: tuple[DoublePoint, ...]
    count: int

    @classmethod
    def of(cls, geodesic: ClosedGeodesic, points) -> IntersectionData:
        points = tuple(points)
        return cls(geodesic=geodesic, double_points=points, count=len(points))


def required_ball_radius(surface: SurfaceGroup, geo: ClosedGeodesic) -> float:
    return geo.length + 2.0 * point_to_axis_distance(surface.basepoint, geo.axis)


def self_intersections(
    surface: SurfaceGroup,
    geo: ClosedGeodesic,
    ball: Optional[GroupBall] = None,
    census: Optional[CensusResult] = None,
) -> IntersectionData:
    """
    All transverse double points of ``geo`` in one period.

    A non-primitive class returns its primitive root's data, which needs the
    ``census`` it came from.

    Raises:
        BallTooSmall: ``ball`` is smaller than length + 2 d(o, axis).
        DegenerateCrossing: a translate of the axis shares one endpoint with it.
    """
    if surface.is_cover:
        raise InvalidParameter("self-intersections are computed on regular surfaces only")
    if not geo.primitive:
        if census is None:
            raise InvalidParameter(
                f"class {geo.class_id} is a power ({geo.power}); pass its census to use the root"
            )
        return self_intersections(surface, census.by_id(geo.root_id), ball=ball)

    ell = geo.length
    need = required_ball_radius(surface, geo)
    if ball is None:
        ball = ball_for(surface, need)
    elif ball.radius < need - 1e-12:
        raise BallTooSmall(
            f"ball radius {ball.radius:.6f} < {need:.6f} needed for a class of length {ell:.6f}"
        )

    frame = axis_frame(geo.axis, surface.basepoint)
    rows = ball.within(need + 1e-9)
    conj = batch.mul(batch.mul(batch.inv(frame.as_array()), ball.mats[rows]), frame.as_array())
    a, b, c, d = conj[:, 0], conj[:, 1], conj[:, 2], conj[:, 3]
    scale = np.abs(conj).max(axis=1)

    stabilises = (np.abs(b) <= 1e-9 * scale) & (np.abs(c) <= 1e-9 * scale)
    conj, a, b, c, d = conj[~stabilises], a[~stabilises], b[~stabilises], c[~stabilises], d[~stabilises]
    shares = (np.abs(b) <= _ENDPOINT_EPS * np.abs(d)) | (np.abs(c) <= _ENDPOINT_EPS * np.abs(a))
    if shares.any():
        raise DegenerateCrossing(
            f"a translate of the axis of class {geo.class_id} shares an endpoint with it"
        )

    with np.errstate(divide="ignore", invalid="ignore"):
        u, v = b / d, a / c
        cross = u * v < 0
        uu, vv = u[cross], v[cross]
        s1 = 0.5 * np.log(-uu * vv)
        # the same crossing seen from gamma^-1: its endpoints are -b/a and -d/c
        s2 = 0.5 * np.log(-(b[cross] / a[cross]) * (d[cross] / c[cross]))
    half = ell / 2.0 + PARAM_TOL
    window = (s1 >= -half) & (s1 < half) & (s2 >= -half) & (s2 < half)
    s1, s2, uu, vv = s1[window], s2[window], uu[window], vv[window]
    sign = np.where(uu > 0, 1, -1)

    m = (uu + vv) / 2.0
    y = np.exp(s1)
    # tangent of the semicircle from u to v at its crossing with the imaginary axis
    angle_rel = np.where(uu < vv, np.arctan2(m, y), np.arctan2(-m, -y))

    p1 = np.mod(s1, ell)
    p2 = np.mod(s2, ell)
    p1 = np.where(p1 > ell - PARAM_TOL, 0.0, p1)
    p2 = np.where(p2 > ell - PARAM_TOL, 0.0, p2)
    swap = p2 < p1
    lo, hi = np.where(swap, p2, p1), np.where(swap, p1, p2)

    keep = _dedupe_pairs(lo, hi)
    points = []
    for i in keep:
        base = frame @ flow_matrix(FlowKind.GEODESIC, float(s1[i]))
        other = base @ rotation_matrix(float(angle_rel[i]) - math.pi / 2.0)
        z = complex(base.act(1j))
        red = reduce_points(surface, z)
        r_inv = batch.inv(red.elements[0])
        dirs = batch.directions(batch.mul(r_inv, np.array([base.as_array(), other.as_array()])))
        dir_first, dir_second = float(dirs[0]), float(dirs[1])
        sgn = int(sign[i])
        if swap[i]:
            dir_first, dir_second, sgn = dir_second, dir_first, -sgn
        points.append(
            DoublePoint(
                s1=float(lo[i]),
                s2=float(hi[i]),
                point=complex(red.points[0]),
                sign=sgn,
                angle1=dir_first,
                angle2=dir_second,
            )
        )
    points.sort(key=lambda dp: (dp.s1, dp.s2))
    logger.debug(f"class {geo.class_id} (length {ell:.6f}): {len(points)} double points")
    return IntersectionData.of(geo, points)


def _dedupe_pairs(lo: np.ndarray, hi: np.ndarray) -> list[int]:
    """One index per cluster of (lo, hi) pairs that agree within PARAM_TOL."""
    if len(lo) == 0:
        return []
    tree = cKDTree(np.column_stack([lo, hi]))
    pairs = tree.query_pairs(r=PARAM_TOL, p=np.inf)
    dropped = set()
    for i, j in sorted(pairs):
        if i not in dropped:
            dropped.add(j)
    return [i for i in range(len(lo)) if i not in dropped]


def is_simple(
    surface: SurfaceGroup,
    geo: ClosedGeodesic,
    census: Optional[CensusResult] = None,
    powers_count_as_simple: Optional[bool] = None,
    data: Optional[IntersectionData] = None,
) -> bool:
    """No transverse self-intersection. A proper power counts as simple only if
    ``topology.powers_count_as_simple`` is set and its root is simple."""
    if powers_count_as_simple is None:
        powers_count_as_simple = SettingsService().powers_count_as_simple
    if not geo.primitive and not powers_count_as_simple:
        return False
    if data is None:
        data = self_intersections(surface, geo, census=census)
    return data.count == 0
