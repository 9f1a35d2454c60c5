"""Simple / filling classification of a whole census."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from hypsurf.config.logging_config import configure_logging
from hypsurf.config.settings_service import SettingsService
from hypsurf.census.ball import ball_for
from hypsurf.census.geodesics import CensusResult, ClosedGeodesic
from hypsurf.errors import InvalidParameter
from hypsurf.surfaces.regular import SurfaceGroup
from hypsurf.topology.filling import is_filling
from hypsurf.topology.intersections import required_ball_radius, self_intersections
from hypsurf.utils.parallel import run_tasks

logger = configure_logging(__name__)


@dataclass(frozen=True)
class ClassTopology:
    class_id: int
    length: float
    primitive: bool
    power: int
    count: int
    simple: bool
    filling: bool
    V: int
    E: int
    F: int
    euler: int


@dataclass(frozen=True)
class TopologyBin:
    lo: float
    hi: float
    n: int
    n_simple: int
    n_filling: int


def classify_census(
    surface: SurfaceGroup,
    census: CensusResult,
    threads: int = 1,
    powers_count_as_simple: Optional[bool] = None,
) -> tuple[ClassTopology, ...]:
    """
    Self-intersection count, simplicity and filling flag of every class.

    Primitive classes are computed (in parallel over ``threads``) against one
    shared ball; powers inherit their root's data.
    """
    if surface.is_cover:
        raise InvalidParameter("census classification runs on regular surfaces only")
    if powers_count_as_simple is None:
        powers_count_as_simple = SettingsService().powers_count_as_simple

    primitive = census.primitive_classes()
    if not primitive:
        return ()
    need = max(required_ball_radius(surface, g) for g in primitive)
    ball = ball_for(surface, need)

    def work(geo: ClosedGeodesic):
        data = self_intersections(surface, geo, ball=ball)
        return geo.class_id, data.count, is_filling(surface, data)

    results = run_tasks(work, primitive, threads=threads, desc="classify")
    by_root = {cid: (count, comp) for cid, count, comp in results}

    out = []
    for geo in census.classes:
        count, comp = by_root[geo.root_id]
        simple = count == 0 and (geo.primitive or powers_count_as_simple)
        out.append(
            ClassTopology(
                class_id=geo.class_id,
                length=geo.length,
                primitive=geo.primitive,
                power=geo.power,
                count=count,
                simple=simple,
                filling=comp.filling,
                V=comp.V,
                E=comp.E,
                F=comp.F,
                euler=comp.euler,
            )
        )
    logger.info(
        f"Classified {len(out)} classes on {surface.surface_id}: "
        f"{sum(r.simple for r in out)} simple, {sum(r.filling for r in out)} filling"
    )
    return tuple(out)


def topology_bins(census: CensusResult, records: tuple[ClassTopology, ...]) -> tuple[TopologyBin, ...]:
    """N, N_simp and N_fill per census length bin."""
    lengths = np.array([r.length for r in records], dtype=float)
    simple = np.array([r.simple for r in records], dtype=bool)
    filling = np.array([r.filling for r in records], dtype=bool)
    out = []
    last = len(census.bins) - 1
    for k, (lo, hi, _) in enumerate(census.bins):
        upper = lengths <= hi if k == last else lengths < hi
        mask = (lengths >= lo) & upper
        out.append(
            TopologyBin(
                lo=lo,
                hi=hi,
                n=int(mask.sum()),
                n_simple=int((mask & simple).sum()),
                n_filling=int((mask & filling).sum()),
            )
        )
    return tuple(out)


def cumulative_counts(records: tuple[ClassTopology, ...], L: float) -> tuple[int, int, int]:
    """(N, N_simp, N_fill) for lengths <= L."""
    n = n_simp = n_fill = 0
    for r in records:
        if r.length <= L:
            n += 1
            n_simp += r.simple
            n_fill += r.filling
    return n, n_simp, n_fill
