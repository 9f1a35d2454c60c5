"""
Which closed geodesics pass through which flow boxes.

An orbit is sampled along one period at a step of a quarter of the
smallest box flow width; a sample inside a box proves the orbit meets it,
so the filters below never report a crossing that is not there.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from hypsurf.config.logging_config import configure_logging
from hypsurf.core import batch
from hypsurf.core.hyp import axis_frame
from hypsurf.census.geodesics import CensusResult, ClosedGeodesic
from hypsurf.dynamics.discs import TransversePairFamily
from hypsurf.dynamics.flowbox import FlowBox
from hypsurf.errors import BandExceedsCensus, InvalidParameter
from hypsurf.surfaces.regular import SurfaceGroup

logger = configure_logging(__name__)


def geodesic_frames(surface: SurfaceGroup, geo: ClosedGeodesic, step: float) -> np.ndarray:
    """Frames F g_s of the orbit for s in [0, length) at ``step``; F(i) is the foot of the basepoint."""
    if not step > 0:
        raise InvalidParameter(f"sampling step must be > 0, got {step}")
    frame = axis_frame(geo.axis, surface.basepoint).as_array()
    s = np.arange(0.0, geo.length, step)
    return batch.flow(np.broadcast_to(frame, (len(s), 4)), s)


def sampling_step(boxes: Sequence[FlowBox]) -> float:
    return min(b.eta2 for b in boxes) / 4.0


def boxes_met(
    surface: SurfaceGroup, geo: ClosedGeodesic, boxes: Sequence[FlowBox], step: Optional[float] = None
) -> np.ndarray:
    """Boolean per box: does the orbit of ``geo`` pass through it."""
    if not boxes:
        return np.zeros(0, dtype=bool)
    frames = geodesic_frames(surface, geo, sampling_step(boxes) if step is None else step)
    return np.array([bool(b.contains_many(frames).any()) for b in boxes], dtype=bool)


def transverse_pair_filter(
    surface: SurfaceGroup, geo: ClosedGeodesic, family: TransversePairFamily
) -> bool:
    """True when the orbit meets both boxes of some pair, which forces a self-intersection."""
    flat = [b for pair in family.pairs for b in pair]
    met = boxes_met(surface, geo, flat).reshape(-1, 2)
    return bool(np.any(met.all(axis=1)))


def net_filter(surface: SurfaceGroup, geo: ClosedGeodesic, edge_boxes: Sequence[FlowBox]) -> bool:
    """True when the orbit meets every edge box of a Delaunay net, which forces it to fill."""
    if not edge_boxes:
        return False
    frames = geodesic_frames(surface, geo, sampling_step(edge_boxes))
    return all(bool(b.contains_many(frames).any()) for b in edge_boxes)


def box_avoidance_stats(
    surface: SurfaceGroup,
    boxes: Sequence[FlowBox],
    census: CensusResult,
    L: float,
) -> float:
    """Fraction of classes of length <= L that avoid at least one box (0 with no boxes)."""
    if L > census.L_max + 1e-12:
        raise BandExceedsCensus(f"L = {L} is past the census cutoff {census.L_max}")
    classes = [c for c in census.classes if c.length <= L]
    if not boxes or not classes:
        return 0.0
    avoiding = sum(not boxes_met(surface, c, boxes).all() for c in classes)
    fraction = avoiding / len(classes)
    logger.info(f"avoidance L={L}: {avoiding}/{len(classes)} classes avoid a box")
    return fraction


def avoidance_curve(
    surface: SurfaceGroup, boxes: Sequence[FlowBox], census: CensusResult, lengths: Sequence[float]
) -> list[tuple[float, float]]:
    return [(float(L), box_avoidance_stats(surface, boxes, census, L)) for L in lengths]
