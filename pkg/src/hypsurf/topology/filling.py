"""
Filling test by face tracing.

The curve's visits to its double points cut it into arcs. Darts: 2i leaves
along arc i, 2i+1 arrives at the end of arc i, so the edge involution is
2i <-> 2i+1. At each vertex the darts are ordered counter-clockwise by
direction (an arriving dart points opposite to the curve's direction).
Faces are the cycles of sigma o alpha and the curve fills iff
V - E + F = 2 - 2g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import networkx as nx
import numpy as np

from hypsurf.errors import NonTransverseInput
from hypsurf.surfaces.regular import SurfaceGroup
from hypsurf.topology.intersections import PARAM_TOL, IntersectionData

_ANGLE_TOL = 1e-7


@dataclass(frozen=True)
class ComplementAnalysis:
    V: int
    E: int
    F: int
    euler: int
    filling: bool


def _angle_gap(a: float, b: float) -> float:
    """Distance between two directions modulo pi (0 means tangent branches)."""
    d = (a - b) % math.pi
    return min(d, math.pi - d)


def is_filling(surface: SurfaceGroup, data: IntersectionData) -> ComplementAnalysis:
    """
    Trace the complementary faces of the curve.

    A curve without double points has E = 0 and F = 2 (its two sides), so
    V - E + F = 2 and it never fills a surface of genus >= 1.

    Raises:
        NonTransverseInput: a double point is tangential, or branches through
            one vertex share a direction.
    """
    target = 2 - 2 * surface.genus
    dps = data.double_points
    if not dps:
        return ComplementAnalysis(V=0, E=0, F=2, euler=2, filling=2 == target)

    for dp in dps:
        if dp.sign not in (-1, 1) or _angle_gap(dp.angle1, dp.angle2) <= _ANGLE_TOL:
            raise NonTransverseInput(
                f"double point at s=({dp.s1:.9f}, {dp.s2:.9f}) is not transverse"
            )

    params = np.array([p for dp in dps for p in (dp.s1, dp.s2)])
    angles = np.array([a for dp in dps for a in (dp.angle1, dp.angle2)])
    order = np.argsort(params, kind="stable")
    visit_of = np.empty(len(params), dtype=np.int64)
    visit_angle: list[float] = []
    last = -math.inf
    for k in order:
        if params[k] - last > PARAM_TOL:
            visit_angle.append(float(angles[k]))
            last = params[k]
        visit_of[k] = len(visit_angle) - 1
    n_visits = len(visit_angle)

    graph = nx.Graph()
    graph.add_nodes_from(range(n_visits))
    graph.add_edges_from((int(visit_of[2 * i]), int(visit_of[2 * i + 1])) for i in range(len(dps)))
    vertices = [sorted(comp) for comp in nx.connected_components(graph)]

    sigma = np.empty(2 * n_visits, dtype=np.int64)
    for visits in vertices:
        for i, a in enumerate(visits):
            for b in visits[i + 1:]:
                if _angle_gap(visit_angle[a], visit_angle[b]) <= _ANGLE_TOL:
                    raise NonTransverseInput(f"branches at visits {a}, {b} are tangent")
        darts = []
        for j in visits:
            darts.append((visit_angle[j] % (2 * math.pi), 2 * j))
            darts.append(((visit_angle[j] + math.pi) % (2 * math.pi), 2 * ((j - 1) % n_visits) + 1))
        darts.sort()
        for k, (_, dart) in enumerate(darts):
            sigma[dart] = darts[(k + 1) % len(darts)][1]

    alpha = np.arange(2 * n_visits) ^ 1
    face_perm = sigma[alpha]
    seen = np.zeros(2 * n_visits, dtype=bool)
    faces = 0
    for start in range(2 * n_visits):
        if seen[start]:
            continue
        faces += 1
        d = start
        while not seen[d]:
            seen[d] = True
            d = face_perm[d]

    V, E = len(vertices), n_visits
    euler = V - E + faces
    return ComplementAnalysis(V=V, E=E, F=faces, euler=euler, filling=euler == target)
