"""
Delaunay nets of a surface.

Centres come from a greedy maximal packing of disjoint r-discs, seeded by a
grid of the fundamental polygon in a fixed order; the packing is accepted
once 3r-discs cover a sampled set of points. The Delaunay triangulation is
built around each centre in the disc model chart at that centre, where
hyperbolic circles are Euclidean circles, and the local triangles are glued
by their canonical lifts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.spatial import Delaunay

from hypsurf.config.logging_config import configure_logging
from hypsurf.config.settings_service import SettingsService
from hypsurf.core import batch
from hypsurf.core.hyp import FlowKind, UnitTangent, axis_frame, flow_matrix, geodesic_through, hyperbolic_distance
from hypsurf.census.ball import ball_for
from hypsurf.census.geodesics import systole
from hypsurf.dynamics.flowbox import FlowBox
from hypsurf.dynamics.liouville import sample_points
from hypsurf.errors import InvalidParameter, PackingFailure
from hypsurf.surfaces.regular import SurfaceGroup, triangle_angle
from hypsurf.utils.parallel import substream

logger = configure_logging(__name__)

GATHER_FACTOR = 10.0
_COCIRCULAR_RTOL = 1e-9
_LIFT_TOL = 1e-6
_PERTURB_ATTEMPTS = 3


@dataclass(frozen=True)
class DelaunayNet:
    """
    A Delaunay triangulation of the surface with vertices ``centers``.

    ``triangle_points`` and ``edge_points`` hold one lift of each triangle
    and edge in H, so lengths and angles can be checked from the stored data.
    """
    r: float
    genus: int
    centers: np.ndarray
    triangles: tuple[tuple[int, int, int], ...]
    triangle_points: np.ndarray
    edges: tuple[tuple[int, int], ...]
    edge_points: np.ndarray
    edge_boxes: tuple[FlowBox, ...]
    eta: float
    coverage_radius: float
    min_separation: float
    seed_rounds: int
    perturbed: bool

    @cached_property
    def edge_lengths(self) -> np.ndarray:
        a, b = self.edge_points[:, 0], self.edge_points[:, 1]
        return np.arccosh(1.0 + np.abs(a - b) ** 2 / (2.0 * a.imag * b.imag))

    @cached_property
    def angles(self) -> np.ndarray:
        """Interior angles (radians) of each triangle, shape (T, 3)."""
        out = np.empty((len(self.triangles), 3))
        for k, (p, q, s) in enumerate(self.triangle_points):
            out[k] = (triangle_angle(p, q, s), triangle_angle(q, s, p), triangle_angle(s, p, q))
        return out

    @property
    def degrees(self) -> np.ndarray:
        deg = np.zeros(len(self.centers), dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    @property
    def max_degree(self) -> int:
        return int(self.degrees.max()) if len(self.edges) else 0

    @property
    def euler(self) -> int:
        return len(self.centers) - len(self.edges) + len(self.triangles)

    @property
    def edge_constant(self) -> float:
        """Edges per unit genus."""
        return len(self.edges) / self.genus


def _neighbour_mats(surface: SurfaceGroup, reach: float) -> np.ndarray:
    radius = 2.0 * surface.domain_radius + reach + 1e-9
    ball = ball_for(surface, radius)
    return ball.mats[ball.within(radius)]


def _seed_grid(surface: SurfaceGroup, h: float) -> np.ndarray:
    """Interior points of the polygon spaced about ``h`` apart, rows bottom to top."""
    poly = surface.root.domain
    x0, x1, y0, y1 = poly.bounding_box
    rows = []
    for u in np.arange(math.log(y0), math.log(y1) + h, h):
        y = math.exp(u)
        xs = np.arange(x0, x1 + h * y, h * y)
        rows.append(xs + 1j * y)
    grid = np.concatenate(rows)
    grid = grid[poly.contains(grid)]
    if surface.is_cover:
        grid = np.concatenate([batch.act(t, grid) for t in surface.tile_matrices])
    return grid


def _cosh_dist(z: np.ndarray, w) -> np.ndarray:
    return 1.0 + np.abs(z - w) ** 2 / (2.0 * z.imag * np.imag(w))


def _greedy_packing(seeds: np.ndarray, r: float, mats: np.ndarray) -> np.ndarray:
    limit = math.cosh(2.0 * r)
    centers: list[complex] = []
    translates = np.empty(0, dtype=complex)
    for z in seeds:
        if len(translates) and np.any(_cosh_dist(translates, z) < limit):
            continue
        centers.append(complex(z))
        translates = np.concatenate([translates, batch.act(mats, z)])
    return np.array(centers, dtype=complex)


def _coverage_radius(samples: np.ndarray, centers: np.ndarray, mats: np.ndarray) -> float:
    translates = np.concatenate([batch.act(mats, c) for c in centers])
    worst = 1.0
    for block in np.array_split(samples, max(1, len(samples) // 1000)):
        cosh_d = _cosh_dist(translates[None, :], block[:, None])
        worst = max(worst, float(cosh_d.min(axis=1).max()))
    return math.acosh(worst)


def _min_separation(centers: np.ndarray, mats: np.ndarray) -> float:
    best = math.inf
    for i, c in enumerate(centers):
        for j, w in enumerate(centers):
            pts = batch.act(mats, w)
            d = np.arccosh(np.maximum(_cosh_dist(pts, c), 1.0))
            if i == j:
                d = d[d > 1e-9]
            if len(d):
                best = min(best, float(d.min()))
    return best


def _add_lift(store: dict, lifted: list[tuple[int, complex]]) -> None:
    """Record a lifted cell unless a lift with the same vertices and points is already stored."""
    lifted = sorted(lifted, key=lambda v: v[0])
    labels = tuple(j for j, _ in lifted)
    pts = np.array([z for _, z in lifted])
    bucket = store.setdefault(labels, [])
    if not any(np.max(np.abs(other - pts)) <= _LIFT_TOL for other in bucket):
        bucket.append(pts)


def _flatten(store: dict) -> list[tuple[tuple[int, ...], np.ndarray]]:
    return [(labels, pts) for labels in sorted(store) for pts in store[labels]]


def _disk_radius(m: complex, R: float) -> float:
    """Hyperbolic radius of the Euclidean circle (centre m, radius R) of the unit disc; inf if it leaves it."""
    a, b = abs(m) - R, abs(m) + R
    if b >= 1.0:
        return math.inf
    return math.atanh(b) - math.atanh(a)


def _circumcircle(p: np.ndarray) -> tuple[complex, float]:
    (ax, ay), (bx, by), (cx, cy) = p
    d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
    ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay) + (cx * cx + cy * cy) * (ay - by)) / d
    uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx) + (cx * cx + cy * cy) * (bx - ax)) / d
    return complex(ux, uy), math.hypot(ax - ux, ay - uy)


class _Cocircular(Exception):
    pass


def _triangulate(centers: np.ndarray, r: float, mats: np.ndarray):
    """Canonical triangles and edges (as lifted point lists) from the local charts."""
    triangles: dict[tuple[int, ...], list[np.ndarray]] = {}
    edges: dict[tuple[int, ...], list[np.ndarray]] = {}
    idx_all = np.repeat(np.arange(len(centers)), len(mats))
    mat_all = np.tile(np.arange(len(mats)), len(centers))
    pts_all = np.concatenate([batch.act(mats, c) for c in centers])
    gather = math.cosh(GATHER_FACTOR * r)
    keep_radius = GATHER_FACTOR * r / 2.0

    for i, c in enumerate(centers):
        near = np.flatnonzero(_cosh_dist(pts_all, c) <= gather)
        z = pts_all[near]
        w = (z - c) / (z - np.conj(c))
        xy = np.column_stack([w.real, w.imag])
        self_idx = int(np.argmin(np.abs(w)))
        tri = Delaunay(xy)
        for simplex in tri.simplices:
            if self_idx not in simplex:
                continue
            m, R = _circumcircle(xy[simplex])
            if _disk_radius(m, R) >= keep_radius:
                continue
            dist = np.abs(w - m)
            on_circle = np.abs(dist - R) <= _COCIRCULAR_RTOL * max(R, 1e-300)
            if on_circle.sum() > 3:
                raise _Cocircular(f"cocircular Delaunay cell at centre {i}")
            verts = [(int(idx_all[near[k]]), int(mat_all[near[k]])) for k in simplex]
            if len({v[0] for v in verts}) < 3:
                raise PackingFailure(f"triangle at centre {i} repeats a vertex; r is too large for the surface")
            # lift with its smallest-index vertex at that centre's domain representative
            jmin, gmin = min(verts)
            g_inv = batch.inv(mats[gmin])
            lifted = [(j, complex(batch.act(batch.mul(g_inv, mats[g]), centers[j]))) for j, g in verts]
            _add_lift(triangles, lifted)
            for a in range(3):
                pair = [verts[a], verts[(a + 1) % 3]]
                j0, g0 = min(pair)
                h_inv = batch.inv(mats[g0])
                lifted_e = [(j, complex(batch.act(batch.mul(h_inv, mats[g]), centers[j]))) for j, g in pair]
                _add_lift(edges, lifted_e)
    return _flatten(triangles), _flatten(edges)


def build_delaunay_net(
    surface: SurfaceGroup,
    r: float,
    eta: Optional[float] = None,
    systole_value: Optional[float] = None,
) -> DelaunayNet:
    """
    Greedy r-disc packing plus its Delaunay triangulation and one flow box
    per edge, centred at the edge-midpoint vector tangent to the edge.

    Raises:
        InvalidParameter: r exceeds a sixth of the systole.
        PackingFailure: no seeding round gives a 3r-covering net.
    """
    service = SettingsService()
    if systole_value is None:
        bound = 2.0 * math.acosh(1.0 + surface.area / (2.0 * math.pi)) + 0.01
        systole_value = systole(surface, bound)
    if not 0.0 < r <= systole_value / 6.0 + 1e-12:
        raise InvalidParameter(f"net radius must lie in (0, systole/6 = {systole_value / 6.0:.6f}], got {r}")
    eta = service.net_eta_fraction * r if eta is None else eta

    pack_mats = _neighbour_mats(surface, 2.0 * r)
    cover_mats = _neighbour_mats(surface, 3.0 * r)
    samples, _ = sample_points(surface, service.net_coverage_samples, substream(0, 0))
    if surface.is_cover:
        sheets = substream(0, 1).integers(surface.degree, size=len(samples))
        samples = batch.act(surface.tile_matrices[sheets], samples)

    centers = None
    coverage = math.inf
    rounds = 0
    h = r / 2.0
    for rounds in range(1, service.net_max_seed_rounds + 1):
        centers = _greedy_packing(_seed_grid(surface, h), r, pack_mats)
        coverage = _coverage_radius(samples, centers, cover_mats)
        logger.debug(f"net seeding round {rounds}: h={h:.4f}, {len(centers)} centres, coverage {coverage:.4f}")
        if coverage <= 3.0 * r:
            break
        h /= 2.0
    else:
        raise PackingFailure(
            f"coverage radius {coverage:.4f} > 3r = {3 * r:.4f} after {rounds} seeding rounds"
        )

    gather_mats = _neighbour_mats(surface, GATHER_FACTOR * r)
    target_euler = 2 - 2 * surface.genus
    perturbed = False
    jitter = substream(0, 2)
    for attempt in range(_PERTURB_ATTEMPTS + 1):
        try:
            triangles, edges = _triangulate(centers, r, gather_mats)
            if len(centers) - len(edges) + len(triangles) == target_euler and 2 * len(edges) == 3 * len(triangles):
                break
            logger.warning(f"net triangulation inconsistent (attempt {attempt}); perturbing centres")
        except _Cocircular as exc:
            logger.debug(str(exc))
        perturbed = True
        angle = jitter.uniform(0.0, 2.0 * math.pi, size=len(centers))
        centers = centers + r * 1e-6 * centers.imag * np.exp(1j * angle)
    else:
        raise PackingFailure(f"no consistent Delaunay triangulation after {_PERTURB_ATTEMPTS} perturbations")

    edge_points = np.array([pts for _, pts in edges], dtype=complex).reshape(-1, 2)
    boxes = []
    for a, b in edge_points:
        frame = axis_frame(geodesic_through(a, b), a)
        mid = frame @ flow_matrix(FlowKind.GEODESIC, hyperbolic_distance(a, b) / 2.0)
        boxes.append(FlowBox.cube(surface, UnitTangent(mid), eta))

    net = DelaunayNet(
        r=r,
        genus=surface.genus,
        centers=centers,
        triangles=tuple(labels for labels, _ in triangles),
        triangle_points=np.array([pts for _, pts in triangles], dtype=complex).reshape(-1, 3),
        edges=tuple(labels for labels, _ in edges),
        edge_points=edge_points,
        edge_boxes=tuple(boxes),
        eta=eta,
        coverage_radius=coverage,
        min_separation=_min_separation(centers, pack_mats),
        seed_rounds=rounds,
        perturbed=perturbed,
    )
    logger.info(
        f"Delaunay net r={r} on {surface.surface_id}: V={len(centers)} E={len(net.edges)} "
        f"T={len(net.triangles)}, max degree {net.max_degree}"
    )
    return net
