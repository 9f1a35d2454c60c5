"""Embedded discs and the transverse box pairs placed inside them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from hypsurf.config.logging_config import configure_logging
from hypsurf.core import batch
from hypsurf.core.hyp import FlowKind, flow_matrix, frame_at, hyperbolic_distance, rotation_matrix
from hypsurf.census.ball import ball_for
from hypsurf.dynamics.flowbox import FlowBox, box_reach, mu_hat, transverse_box
from hypsurf.errors import InvalidParameter
from hypsurf.surfaces.regular import SurfaceGroup

logger = configure_logging(__name__)


def _max_injectivity(surface: SurfaceGroup) -> float:
    """No embedded disc is larger: its area 2pi(cosh r - 1) is at most the surface's."""
    return math.acosh(1.0 + surface.area / (2.0 * math.pi))


def injectivity_radius(surface: SurfaceGroup, points) -> np.ndarray:
    """Half the minimal displacement of nontrivial elements at each point of the fundamental domain."""
    z = np.atleast_1d(np.asarray(points, dtype=complex))
    rho = surface.domain_radius
    radius = 2.0 * _max_injectivity(surface) + 2.0 * rho + 1e-9
    ball = ball_for(surface, radius)
    rows = ball.within(radius)
    mats = ball.mats[rows[rows != 0]]
    out = np.empty(len(z))
    for k, p in enumerate(z):
        w = batch.act(mats, p)
        cosh_d = 1.0 + np.abs(w - p) ** 2 / (2.0 * w.imag * p.imag)
        out[k] = 0.5 * float(np.arccosh(np.maximum(cosh_d.min(), 1.0)))
    return out


def polygon_grid(surface: SurfaceGroup, per_side: int = 15) -> np.ndarray:
    """The polygon centre followed by a grid of interior points in (x, log y)."""
    poly = surface.root.domain
    x0, x1, y0, y1 = poly.bounding_box
    xs = np.linspace(x0, x1, per_side)
    ys = np.exp(np.linspace(math.log(y0), math.log(y1), per_side))
    grid = (xs[None, :] + 1j * ys[:, None]).ravel()
    inside = grid[poly.contains(grid, tol=-1e-9)]
    return np.concatenate([[poly.center], inside])


def embedded_disc_center(surface: SurfaceGroup, per_side: int = 15) -> tuple[complex, float]:
    """Grid point of the polygon with the largest injectivity radius, and that radius."""
    candidates = polygon_grid(surface, per_side)
    radii = injectivity_radius(surface, candidates)
    best = int(np.argmax(radii))
    logger.info(f"embedded disc on {surface.surface_id}: centre {candidates[best]:.6f}, radius {radii[best]:.6f}")
    return complex(candidates[best]), float(radii[best])


@dataclass(frozen=True)
class TransversePairFamily:
    """Pairs (B_i, rotated B_i) inside one embedded disc; ``alpha`` is the measure of the union of the B_i."""
    disc_center: complex
    disc_radius: float
    pairs: tuple[tuple[FlowBox, FlowBox], ...]
    alpha: float

    @property
    def boxes(self) -> list[FlowBox]:
        return [b for b, _ in self.pairs]


def transverse_pair_family(
    surface: SurfaceGroup,
    eta: float,
    max_pairs: Optional[int] = None,
    disc: Optional[tuple[complex, float]] = None,
) -> TransversePairFamily:
    """
    Box pairs centred on rings about the embedded-disc centre.

    Centres are at least 2 * reach + eta apart and every box stays inside the
    disc, so the boxes are pairwise disjoint.
    """
    if not eta > 0:
        raise InvalidParameter(f"box width must be > 0, got {eta}")
    z0, r0 = embedded_disc_center(surface) if disc is None else disc
    reach = box_reach(eta, eta, eta)
    if reach >= r0:
        raise InvalidParameter(f"box reach {reach:.4f} does not fit in the embedded disc of radius {r0:.4f}")
    sep = 2.0 * reach + eta
    base = frame_at(z0, 0.0).frame
    centers = [z0]
    ring = 1
    while ring * sep + reach < r0:
        s = ring * sep
        ratio = math.sinh(sep / 2.0) / math.sinh(s)
        count = max(1, int(math.floor(math.pi / math.asin(min(ratio, 1.0)))))
        for j in range(count):
            frame = base @ rotation_matrix(2.0 * math.pi * j / count) @ flow_matrix(FlowKind.GEODESIC, s)
            centers.append(complex(frame.act(1j)))
        ring += 1
    if max_pairs is not None:
        centers = centers[:max_pairs]
    pairs = []
    for z in centers:
        box = FlowBox.cube(surface, frame_at(z, 0.0), eta)
        pairs.append((box, transverse_box(box)))
    alpha = sum(mu_hat(b) for b, _ in pairs)
    logger.info(f"transverse pair family: {len(pairs)} pairs of width {eta} in disc r={r0:.4f}, alpha={alpha:.3e}")
    return TransversePairFamily(disc_center=z0, disc_radius=r0, pairs=tuple(pairs), alpha=alpha)


def separation(family: TransversePairFamily) -> float:
    """Smallest distance between two pair centres."""
    pts = [b.center.base_point for b in family.boxes]
    if len(pts) < 2:
        return math.inf
    return min(
        hyperbolic_distance(pts[i], pts[j]) for i in range(len(pts)) for j in range(i + 1, len(pts))
    )
