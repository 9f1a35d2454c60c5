"""
Closed geodesic census.

Every conjugacy class of length l <= L has representatives whose axis meets
the fundamental polygon; such a representative moves the basepoint by at most
l + 2*rho (rho the polygon radius about the basepoint), so all of them sit in
the ball of radius L + 2*rho. Classes are told apart geometrically: two
candidates are conjugate iff some h of displacement <= l/2 + 2*rho carries
one oriented axis onto the other and their lengths agree.

Counting is oriented: a geodesic and its reverse are two classes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from hypsurf.config.logging_config import configure_logging
from hypsurf.config.settings_service import SettingsService
from hypsurf.core import batch
from hypsurf.core.hyp import GeodesicLine, Mat2, axis
from hypsurf.census.ball import GroupBall, ball_for
from hypsurf.errors import (
    BandExceedsCensus,
    InvalidParameter,
    NoGeodesicInRange,
    ToleranceCollision,
)
from hypsurf.surfaces.regular import SurfaceGroup
from hypsurf.surfaces.words import Word

logger = configure_logging(__name__)


@dataclass(frozen=True)
class ClosedGeodesic:
    """
    One oriented closed geodesic (a conjugacy class).

    ``word`` spells ``matrix`` over the generators of the regular surface
    underneath (the base alphabet for covers). ``root_id`` is the class id
    of the primitive root; ``length == power * length(root)``.
    """
    class_id: int
    word: Word
    matrix: Mat2
    length: float
    primitive: bool
    power: int
    axis: GeodesicLine
    root_id: int

    @property
    def trace(self) -> float:
        return abs(self.matrix.trace)


@dataclass(frozen=True)
class CensusResult:
    surface_id: str
    L_max: float
    classes: tuple[ClosedGeodesic, ...]
    bins: tuple[tuple[float, float, int], ...]
    ball_radius: float = 0.0
    surface: Optional[SurfaceGroup] = field(default=None, repr=False, compare=False)

    def __len__(self) -> int:
        return len(self.classes)

    def lengths(self) -> np.ndarray:
        return np.array([c.length for c in self.classes], dtype=float)

    def by_id(self, class_id: int) -> ClosedGeodesic:
        return self.classes[class_id]

    def primitive_classes(self) -> list[ClosedGeodesic]:
        return [c for c in self.classes if c.primitive]


def axis_features(lengths, p, q, length_tol: float, axis_tol: float) -> np.ndarray:
    ap, aq = batch.boundary_angles(p), batch.boundary_angles(q)
    return np.column_stack(
        [
            np.asarray(lengths, dtype=float) / length_tol,
            np.cos(ap) / axis_tol,
            np.sin(ap) / axis_tol,
            np.cos(aq) / axis_tol,
            np.sin(aq) / axis_tol,
        ]
    )


def binned_counts(lengths: Sequence[float], L_max: float, width: Optional[float] = None):
    """Histogram of class lengths on [0, L_max] with bins of ``width``."""
    width = SettingsService().bin_width if width is None else width
    if not width > 0:
        raise InvalidParameter(f"bin width must be > 0, got {width}")
    n_bins = max(1, math.ceil(L_max / width - 1e-12))
    edges = width * np.arange(n_bins + 1)
    edges[-1] = max(edges[-1], L_max)
    counts, _ = np.histogram(np.asarray(lengths, dtype=float), bins=edges)
    return tuple((float(lo), float(hi), int(n)) for lo, hi, n in zip(edges[:-1], edges[1:], counts))


def enumerate_closed_geodesics(
    surface: SurfaceGroup,
    L: float,
    length_tol: Optional[float] = None,
    axis_tol: Optional[float] = None,
    tol: Optional[float] = None,
) -> CensusResult:
    """
    One representative per conjugacy class of translation length <= L.

    Raises:
        BudgetExceeded: the enumerated ball outgrows ``census.max_elements``.
        ToleranceCollision: two distinct elements match at the configured
            length and axis tolerances.
    """
    if not L > 0:
        raise InvalidParameter(f"census length must be > 0, got {L}")
    service = SettingsService()
    length_tol = service.length_tol if length_tol is None else length_tol
    axis_tol = service.axis_tol if axis_tol is None else axis_tol
    tol = service.tolerance if tol is None else tol

    if surface.is_cover:
        return _lifted_census(surface, L, length_tol, axis_tol, tol)

    rho = surface.domain_radius
    radius = L + 2.0 * rho
    ball = ball_for(surface, radius)
    classes = _classify_ball(surface, ball, L, rho, length_tol, axis_tol, tol)
    result = CensusResult(
        surface_id=surface.surface_id,
        L_max=float(L),
        classes=classes,
        bins=binned_counts([c.length for c in classes], L),
        ball_radius=radius,
        surface=surface,
    )
    logger.info(
        f"Census {surface.surface_id} L={L}: {len(classes)} classes "
        f"({sum(c.primitive for c in classes)} primitive)"
    )
    return result


def _classify_ball(
    surface: SurfaceGroup,
    ball: GroupBall,
    L: float,
    rho: float,
    length_tol: float,
    axis_tol: float,
    tol: float,
) -> tuple[ClosedGeodesic, ...]:
    o = surface.basepoint
    rows = ball.within(L + 2.0 * rho)
    rows = rows[rows != 0]
    mats = ball.mats[rows]
    tr = np.abs(batch.trace(mats))
    hyperbolic = tr > 2.0 + tol
    rows, mats = rows[hyperbolic], mats[hyperbolic]
    lengths = batch.lengths(mats)
    p, q = batch.axes(mats)
    near = (lengths <= L + length_tol) & (batch.axis_distance(o, p, q) <= rho + 1e-9)
    rows, mats, lengths, p, q = rows[near], mats[near], lengths[near], p[near], q[near]
    if len(rows) == 0:
        return ()

    feats = axis_features(lengths, p, q, length_tol, axis_tol)
    tree = cKDTree(feats)
    _check_collisions(tree, mats)

    order = np.lexsort((rows, lengths))
    class_of = np.full(len(rows), -1, dtype=np.int64)
    reps: list[int] = []
    for idx in order:
        if class_of[idx] >= 0:
            continue
        cid = len(reps)
        reps.append(int(idx))
        ell = float(lengths[idx])
        conj = ball.mats[ball.within(min(ell / 2.0 + 2.0 * rho + 1e-9, ball.radius))]
        hp = batch.act_boundary(conj, p[idx])
        hq = batch.act_boundary(conj, q[idx])
        keep = batch.axis_distance(o, hp, hq) <= rho + 1e-9
        query = axis_features(np.full(int(keep.sum()), ell), hp[keep], hq[keep], length_tol, axis_tol)
        hits = tree.query_ball_point(query, r=1.0, p=np.inf)
        members = np.unique(np.concatenate([np.asarray(h, dtype=np.int64) for h in hits] + [[idx]]))
        clash = class_of[members]
        if np.any((clash >= 0) & (clash != cid)):
            raise ToleranceCollision(
                f"class of length {ell:.9f} merges with an earlier class; "
                "tighten census.length_tol / census.axis_tol"
            )
        class_of[members] = cid

    rep_idx = np.array(reps)
    rep_len = lengths[rep_idx]
    shortest = float(rep_len.min())
    power = np.ones(len(reps), dtype=np.int64)
    root = np.arange(len(reps))
    for cid, idx in enumerate(rep_idx):
        ell = float(lengths[idx])
        for k in range(int((ell + length_tol) / shortest), 1, -1):
            f = axis_features([ell / k], [p[idx]], [q[idx]], length_tol, axis_tol)
            hits = tree.query_ball_point(f[0], r=1.0, p=np.inf)
            if hits:
                power[cid] = k
                root[cid] = class_of[hits[0]]
                break

    final = np.lexsort((rep_idx, rep_len))
    new_id = np.empty(len(reps), dtype=np.int64)
    new_id[final] = np.arange(len(reps))
    out = []
    for cid in final:
        idx = rep_idx[cid]
        row = int(rows[idx])
        out.append(
            ClosedGeodesic(
                class_id=int(new_id[cid]),
                word=ball.word(row),
                matrix=ball.matrix(row),
                length=float(lengths[idx]),
                primitive=bool(power[cid] == 1),
                power=int(power[cid]),
                axis=GeodesicLine(float(p[idx]), float(q[idx])),
                root_id=int(new_id[root[cid]]),
            )
        )
    return tuple(out)


def _check_collisions(tree: cKDTree, mats: np.ndarray) -> None:
    pairs = tree.query_pairs(r=1.0, p=np.inf, output_type="ndarray")
    if len(pairs) == 0:
        return
    a, b = mats[pairs[:, 0]], mats[pairs[:, 1]]
    scale = np.maximum(1.0, np.maximum(np.abs(a).max(axis=1), np.abs(b).max(axis=1)))
    diff = np.minimum(np.abs(a - b).max(axis=1), np.abs(a + b).max(axis=1)) / scale
    if np.any(diff > 1e-6):
        i, j = pairs[int(np.argmax(diff))]
        raise ToleranceCollision(
            f"distinct elements {mats[i].tolist()} and {mats[j].tolist()} share length and "
            "axis within tolerance"
        )


def _lifted_census(
    surface: SurfaceGroup, L: float, length_tol: float, axis_tol: float, tol: float
) -> CensusResult:
    """
    Census of a cover from the base census.

    A primitive base class c acts on the sheets; a cycle of length m through
    sheet s gives the cover class t_s c^m t_s^-1 of length m*l(c), and its
    k-th powers.
    """
    base = surface.root
    base_census = enumerate_closed_geodesics(base, L, length_tol, axis_tol, tol)
    records = []
    for c in base_census.primitive_classes():
        perm = [surface.sheet_of(c.word, s) for s in range(surface.degree)]
        seen: set[int] = set()
        for start in range(surface.degree):
            if start in seen:
                continue
            cycle = [start]
            s = perm[start]
            while s != start:
                cycle.append(s)
                s = perm[s]
            seen.update(cycle)
            m = len(cycle)
            tile = surface.tiles[start]
            k = 1
            while m * k * c.length <= L + length_tol:
                word = tile * c.word.power(m * k) * tile.inverse()
                matrix = surface.evaluate_base(word)
                records.append((m * k * c.length, c.class_id, start, k, word, matrix))
                k += 1

    records.sort(key=lambda r: (r[0], r[1], r[2], r[3]))
    lift_id = {(r[1], r[2], r[3]): i for i, r in enumerate(records)}
    classes = tuple(
        ClosedGeodesic(
            class_id=i,
            word=word,
            matrix=matrix,
            length=float(length),
            primitive=k == 1,
            power=k,
            axis=axis(matrix, tol),
            root_id=lift_id[(cid, start, 1)],
        )
        for i, (length, cid, start, k, word, matrix) in enumerate(records)
    )
    logger.info(f"Lifted census {surface.surface_id} L={L}: {len(classes)} classes")
    return CensusResult(
        surface_id=surface.surface_id,
        L_max=float(L),
        classes=classes,
        bins=binned_counts([c.length for c in classes], L),
        ball_radius=base_census.ball_radius,
        surface=surface,
    )


def count_in_band(census: CensusResult, L: float, eta: float) -> int:
    """Number of classes with length in [L - eta, L + eta]."""
    if eta < 0:
        raise InvalidParameter(f"band half-width must be >= 0, got {eta}")
    if L + eta > census.L_max + 1e-12:
        raise BandExceedsCensus(
            f"band [{L - eta}, {L + eta}] reaches past the census cutoff {census.L_max}"
        )
    lengths = census.lengths()
    return int(np.count_nonzero((lengths >= L - eta) & (lengths <= L + eta)))


def pgt_ratio_curve(
    census: CensusResult, grid: Sequence[float], primitive_only: bool = False
) -> list[tuple[float, float]]:
    """(L, N(X, L) * L / e^L) for each grid point."""
    classes = census.primitive_classes() if primitive_only else census.classes
    lengths = np.sort(np.array([c.length for c in classes], dtype=float))
    out = []
    for L in grid:
        if L > census.L_max + 1e-12:
            raise BandExceedsCensus(f"grid point {L} is past the census cutoff {census.L_max}")
        n = int(np.searchsorted(lengths, L, side="right"))
        out.append((float(L), n * L / math.exp(L)))
    return out


def systole(surface: SurfaceGroup, search_len: float) -> float:
    """Shortest closed geodesic length, searching up to ``search_len``."""
    if not search_len > 0:
        raise InvalidParameter(f"search_len must be > 0, got {search_len}")
    census = enumerate_closed_geodesics(surface, search_len)
    if not census.classes:
        raise NoGeodesicInRange(f"no closed geodesic of length <= {search_len} on {surface.surface_id}")
    return float(min(c.length for c in census.classes))
