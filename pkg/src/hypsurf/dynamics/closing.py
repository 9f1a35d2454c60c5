"""
Closing census: closed geodesics read off from returns of a flow box.

With C the (reduced) centre frame, a lift gamma.B is reached from B after
time L iff C x g_L = gamma C y for box coordinates x, y, i.e.
y = N x g_L with N = C^-1 gamma^-1 C. Writing x = h^u_r1 g_t h^s_r2 and
P = N h^u_r1 = h^u_p1 g_tau h^s_p2 gives

    y = h^u_p1 g_(tau + t + L) h^s_(p2 e^-(t+L) + r2 e^-L).

p1 is a Mobius function of r1, so the r1 with |p1| < eta1/2 form an
interval found in closed form; the other two coordinates are then checked
on samples of that interval. Each gamma that passes and whose translation
length lies in the band gives one closed geodesic; hits are merged up to
conjugacy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from hypsurf.config.logging_config import configure_logging
from hypsurf.config.settings_service import SettingsService
from hypsurf.core import batch
from hypsurf.core.hyp import GeodesicLine, Mat2, UnitTangent, axis_frame, hyperbolic_distance
from hypsurf.census.ball import GroupBall, ball_for
from hypsurf.census.geodesics import CensusResult, axis_features
from hypsurf.dynamics.avoidance import boxes_met
from hypsurf.dynamics.flowbox import FlowBox
from hypsurf.errors import BallTooSmall, BandExceedsCensus, InvalidParameter
from hypsurf.surfaces.regular import SurfaceGroup
from hypsurf.surfaces.words import Word

logger = configure_logging(__name__)

_R1_GRID = 33
_R1_INTERVAL = 9
# axes of return elements pass near, not through, the box centre
_AXIS_SLACK = 0.25


@dataclass(frozen=True)
class ClosingHit:
    length: float
    word: Word
    matrix: Mat2
    axis: GeodesicLine


def closing_ball_radius(surface: SurfaceGroup, boxes: Sequence[FlowBox], L: float, eta: float) -> float:
    """Ball radius holding every return element and every conjugator used for merging."""
    o = surface.basepoint
    rho = surface.domain_radius
    reach = max(b.reach for b in boxes)
    offset = max(hyperbolic_distance(o, b.center_point) for b in boxes)
    returns = L + eta + 2.0 * reach + 2.0 * offset
    conjugators = (L + eta) / 2.0 + 2.0 * rho + 2.0 * (reach + _AXIS_SLACK)
    return max(returns, conjugators) + 1e-9


def _returns(box: FlowBox, N: np.ndarray, L: float) -> np.ndarray:
    """For each row N, whether some x in the box has N x g_L in the box."""
    h1, h2, h3 = box.half_widths
    a, b, c, d = (N[:, k : k + 1] for k in range(4))
    with np.errstate(divide="ignore", invalid="ignore"):
        r_plus = (h1 * a - c) / (d - h1 * b)
        r_minus = (-h1 * a - c) / (d + h1 * b)
    lo = np.clip(np.fmin(r_plus, r_minus), -h1, h1)
    hi = np.clip(np.fmax(r_plus, r_minus), -h1, h1)
    frac = np.linspace(0.0, 1.0, _R1_INTERVAL)[None, :]
    inner = lo + (hi - lo) * frac
    coarse = np.broadcast_to(np.linspace(-h1, h1, _R1_GRID + 2)[1:-1][None, :], (len(N), _R1_GRID))
    r1 = np.concatenate([np.nan_to_num(inner, nan=0.0), coarse], axis=1)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        A = a + b * r1
        p1 = (c + d * r1) / A
        tau = 2.0 * np.log(np.abs(A))
        p2 = b / A
        shift = -tau - L
        t_lo = np.maximum(-h2, shift - h2)
        t_hi = np.minimum(h2, shift + h2)
        stable = np.maximum(np.abs(p2) * np.exp(-t_hi) - h3, 0.0) * math.exp(-L)
        ok = (np.abs(r1) < h1) & (np.abs(p1) < h1) & (t_lo < t_hi) & (stable < h3)
    return np.any(ok, axis=1)


def _box_hits(
    box: FlowBox, L: float, eta: float, ball: GroupBall, radius: float
) -> np.ndarray:
    """Ball rows gamma returning to ``box`` after time L with length in [L - eta, L + eta]."""
    length_tol = SettingsService().length_tol
    rows = ball.within(radius)
    rows = rows[rows != 0]
    mats = ball.mats[rows]
    lengths = batch.lengths(mats)
    band = np.abs(lengths - L) <= eta + length_tol
    rows, mats = rows[band], mats[band]
    if len(rows) == 0:
        return rows
    C = box.reduced_center
    N = batch.mul(batch.mul(batch.inv(C), batch.inv(mats)), C)
    return rows[_returns(box, N, L)]


def _merge_conjugates(
    surface: SurfaceGroup, ball: GroupBall, rows: np.ndarray, reach: float
) -> list[int]:
    """One row per conjugacy class among ``rows``, in (length, row) order."""
    if len(rows) == 0:
        return []
    service = SettingsService()
    length_tol, axis_tol = service.length_tol, service.axis_tol
    rho = surface.domain_radius
    mats = ball.mats[rows]
    lengths = batch.lengths(mats)
    p, q = batch.axes(mats)
    tree = cKDTree(axis_features(lengths, p, q, length_tol, axis_tol))
    order = np.lexsort((rows, lengths))
    assigned = np.zeros(len(rows), dtype=bool)
    reps: list[int] = []
    for idx in order:
        if assigned[idx]:
            continue
        reps.append(int(rows[idx]))
        ell = float(lengths[idx])
        reach_h = ell / 2.0 + 2.0 * rho + 2.0 * (reach + _AXIS_SLACK) + 1e-9
        conj = ball.mats[ball.within(min(reach_h, ball.radius))]
        hp = batch.act_boundary(conj, p[idx])
        hq = batch.act_boundary(conj, q[idx])
        query = axis_features(np.full(len(conj), ell), hp, hq, length_tol, axis_tol)
        for hit in tree.query_ball_point(query, r=1.0, p=np.inf):
            assigned[hit] = True
        assigned[idx] = True
    return reps


def _hits_from_rows(ball: GroupBall, reps: list[int]) -> tuple[ClosingHit, ...]:
    out = []
    for row in reps:
        m = ball.matrix(row)
        p, q = batch.axes(ball.mats[row])
        out.append(
            ClosingHit(
                length=float(batch.lengths(ball.mats[row])),
                word=ball.word(row),
                matrix=m,
                axis=GeodesicLine(float(p), float(q)),
            )
        )
    out.sort(key=lambda h: h.length)
    return tuple(out)


def closing_census(
    surface: SurfaceGroup,
    box: FlowBox,
    L: float,
    ball: Optional[GroupBall] = None,
    eta: Optional[float] = None,
) -> tuple[ClosingHit, ...]:
    """
    Closed geodesics with length in [L - eta, L + eta] obtained from returns
    of ``box`` after time L, one per conjugacy class. ``eta`` defaults to the
    box's flow width.

    Raises:
        BallTooSmall: ``ball`` does not reach the return radius.
    """
    return closing_census_union(surface, [box], L, ball=ball, eta=eta)


def closing_census_union(
    surface: SurfaceGroup,
    boxes: Sequence[FlowBox],
    L: float,
    ball: Optional[GroupBall] = None,
    eta: Optional[float] = None,
) -> tuple[ClosingHit, ...]:
    """Closing census over several boxes, merged up to conjugacy."""
    if not L > 0:
        raise InvalidParameter(f"return time must be > 0, got {L}")
    if not boxes:
        return ()
    eta = boxes[0].eta2 if eta is None else eta
    radius = closing_ball_radius(surface, boxes, L, eta)
    if ball is None:
        ball = ball_for(surface, radius)
    elif ball.radius < radius - 1e-9:
        raise BallTooSmall(f"ball radius {ball.radius:.6f} < {radius:.6f} needed for returns at L={L}")
    rows = np.unique(np.concatenate([_box_hits(b, L, eta, ball, radius) for b in boxes]))
    reps = _merge_conjugates(surface, ball, rows, max(b.reach for b in boxes))
    hits = _hits_from_rows(ball, reps)
    logger.info(f"closing census L={L} eta={eta}: {len(boxes)} boxes, {len(rows)} returns, {len(hits)} classes")
    return hits


def orbit_box_cover(
    surface: SurfaceGroup, census: CensusResult, L: float, eta: float
) -> list[FlowBox]:
    """One cubic box of width ``eta`` on the axis of every census class with length in [L - eta, L + eta]."""
    if L + eta > census.L_max + 1e-12:
        raise BandExceedsCensus(f"band [{L - eta}, {L + eta}] reaches past the census cutoff {census.L_max}")
    boxes = []
    for geo in census.classes:
        if abs(geo.length - L) <= eta:
            frame = UnitTangent(axis_frame(geo.axis, surface.basepoint))
            boxes.append(FlowBox.cube(surface, frame, eta))
    return boxes


# ── census-independent check ────────────────────────────────────


def census_class_ids(
    surface: SurfaceGroup, hits: Sequence[ClosingHit], census: CensusResult
) -> list[Optional[int]]:
    """Census class id conjugate to each hit, ``None`` where the census has no such class.

    A conjugator taking one axis to the other moves the basepoint o by at most
    d(o, axis_1) + d(o, axis_2) + length / 2, which bounds the ball searched.
    """
    if not hits:
        return []
    service = SettingsService()
    length_tol, axis_tol = service.length_tol, service.axis_tol
    o = surface.basepoint
    hp = np.array([h.axis.p_repel for h in hits])
    hq = np.array([h.axis.p_attract for h in hits])
    h_len = np.array([h.length for h in hits])
    tree = cKDTree(axis_features(h_len, hp, hq, length_tol, axis_tol))
    hit_reach = float(batch.axis_distance(o, hp, hq).max())

    ids: list[Optional[int]] = [None] * len(hits)
    for geo in census.classes:
        if np.abs(h_len - geo.length).min() > length_tol:
            continue
        p, q = geo.axis.p_repel, geo.axis.p_attract
        radius = float(batch.axis_distance(o, p, q)) + hit_reach + geo.length / 2.0 + 1e-9
        ball = ball_for(surface, radius)
        conj = ball.mats[ball.within(radius)]
        query = axis_features(
            np.full(len(conj), geo.length),
            batch.act_boundary(conj, p),
            batch.act_boundary(conj, q),
            length_tol,
            axis_tol,
        )
        for found in tree.query_ball_point(query, r=1.0, p=np.inf):
            for idx in found:
                ids[idx] = geo.class_id
    return ids


@dataclass(frozen=True)
class BoxClosingCheck:
    """
    Closing census of one box against the census classes through it.

    ``required``: classes with |length - L| <= eta2 / 3 whose orbit meets the
    box shrunk by 3; each returns to the box after time L and must be found.
    ``allowed``: classes in the band whose orbit meets the box enlarged by 3;
    a closed orbit shadowing a return lies there, so every hit must be one.
    ``unmatched`` holds lengths of hits conjugate to no census class.
    """

    L: float
    eta: float
    box: FlowBox
    found: tuple[int, ...]
    required: tuple[int, ...]
    allowed: tuple[int, ...]
    unmatched: tuple[float, ...] = ()

    @property
    def missing(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.required) - set(self.found)))

    @property
    def extra(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.found) - set(self.allowed)))

    @property
    def ok(self) -> bool:
        return not (self.missing or self.extra or self.unmatched)


def closing_box_check(
    surface: SurfaceGroup,
    census: CensusResult,
    box: FlowBox,
    L: float,
    eta: Optional[float] = None,
    ball: Optional[GroupBall] = None,
) -> BoxClosingCheck:
    """
    Compare :func:`closing_census` of ``box`` with the census classes whose
    orbits pass through it. The box is chosen without looking at the census.

    Raises:
        BandExceedsCensus: the band [L - eta, L + eta] reaches past the census cutoff.
    """
    eta = box.eta2 if eta is None else eta
    if L + eta > census.L_max + 1e-12:
        raise BandExceedsCensus(f"band [{L - eta}, {L + eta}] reaches past the census cutoff {census.L_max}")
    length_tol = SettingsService().length_tol
    hits = closing_census(surface, box, L, ball=ball, eta=eta)
    ids = census_class_ids(surface, hits, census)

    inner_band = min(eta, box.eta2 / 3.0) - length_tol
    step = box.eta2 / 4.0
    shrunk, grown = box.minus, box.plus
    required, allowed = [], []
    for geo in census.classes:
        offset = abs(geo.length - L)
        if offset > eta + length_tol:
            continue
        if boxes_met(surface, geo, [grown], step=step)[0]:
            allowed.append(geo.class_id)
        if offset <= inner_band and boxes_met(surface, geo, [shrunk])[0]:
            required.append(geo.class_id)
    check = BoxClosingCheck(
        L=float(L),
        eta=float(eta),
        box=box,
        found=tuple(sorted(i for i in ids if i is not None)),
        required=tuple(required),
        allowed=tuple(allowed),
        unmatched=tuple(h.length for h, i in zip(hits, ids) if i is None),
    )
    if not check.ok:
        logger.warning(
            f"closing box at {box.center_point:.6f} L={L}: missing {check.missing}, "
            f"extra {check.extra}, unmatched {check.unmatched}"
        )
    return check


def length_multiset_diff(
    expected: Sequence[float], found: Sequence[float], tol: float = 1e-6
) -> tuple[list[float], list[float]]:
    """(missing, extra): lengths in one multiset without a partner within ``tol`` in the other."""
    exp = sorted(expected)
    got = sorted(found)
    missing, extra = [], []
    i = j = 0
    while i < len(exp) and j < len(got):
        if abs(exp[i] - got[j]) <= tol:
            i += 1
            j += 1
        elif exp[i] < got[j]:
            missing.append(exp[i])
            i += 1
        else:
            extra.append(got[j])
            j += 1
    missing.extend(exp[i:])
    extra.extend(got[j:])
    return missing, extra
