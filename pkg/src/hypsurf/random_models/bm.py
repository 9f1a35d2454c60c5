"""
Closed geodesics of the cusped surface glued from a ribbon graph.

Ideal triangles glued midpoint to midpoint have zero shear, so a closed
non-backtracking edge path has holonomy the product of L = [[1,1],[0,1]]
(left turn) and R = [[1,0],[1,1]] (right turn) over its turns. Paths are
oriented: a path and its reverse are listed separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from hypsurf.config.logging_config import configure_logging
from hypsurf.core.hyp import trace_to_length
from hypsurf.errors import Disconnected, InvalidParameter
from hypsurf.random_models.ribbon import RibbonGraph

logger = configure_logging(__name__)

TURN_MATRICES = {
    "L": np.array([[1, 1], [0, 1]], dtype=np.int64),
    "R": np.array([[1, 0], [1, 1]], dtype=np.int64),
}


@dataclass(frozen=True)
class BMGeodesic:
    """One oriented closed geodesic; ``word`` is the least rotation of its turn sequence."""
    word: str
    length: float
    trace: int
    start: int  # departing half-edge at the first turn of ``word``
    primitive: bool


def word_matrix(word: str) -> np.ndarray:
    m = np.eye(2, dtype=np.int64)
    for letter in word:
        m = m @ TURN_MATRICES[letter]
    return m


def word_length(word: str) -> float:
    """Translation length of an L/R word.

    Raises:
        EllipticOrParabolic: the word is a power of L or of R.
    """
    return trace_to_length(float(np.trace(word_matrix(word))))


def _is_primitive(word: str, path: list[int]) -> bool:
    """No proper rotation maps the closed path onto itself."""
    k = len(word)
    return not any(
        k % d == 0 and word[d:] + word[:d] == word and path[d] == path[0] for d in range(1, k)
    )


def _mixed_words(bound: float) -> list[tuple[str, int]]:
    """Linear L/R words using both letters whose trace is at most ``bound``."""
    out = []
    # a prefix's entries never exceed those of its extensions
    stack = [("", np.eye(2, dtype=np.int64))]
    while stack:
        word, m = stack.pop()
        tr = int(np.trace(m))
        if word and tr > bound:
            continue
        if "L" in word and "R" in word:
            out.append((word, tr))
        # powers of one letter keep trace 2; a mixed word of length k has trace >= k + 1
        if len(word) + 1 > bound - 1:
            continue
        for letter in "RL":
            stack.append((word + letter, m @ TURN_MATRICES[letter]))
    return out


def _walk(graph: RibbonGraph, start: int, word: str) -> list[int]:
    """Departing half-edges along ``word`` from ``start``; one entry per turn, plus the final one."""
    sigma = graph.sigma
    path = [start]
    h = start
    for letter in word:
        arrive = graph.alpha[h]
        h = sigma[arrive] if letter == "L" else sigma[sigma[arrive]]
        path.append(h)
    return path


def bm_geodesics(graph: RibbonGraph, L: float) -> list[BMGeodesic]:
    """
    Closed geodesics of length <= L on the cusped surface of ``graph``,
    sorted by (length, word, start).

    Powers of L or R go around a cusp and are left out.
    """
    if not L > 0:
        raise InvalidParameter(f"L must be > 0, got {L}")
    if not graph.connected:
        raise Disconnected(f"ribbon graph on {graph.n_vertices} vertices is not connected")
    bound = 2.0 * math.cosh(L / 2.0) + 1e-9
    found: dict[tuple[str, int], BMGeodesic] = {}
    for word, tr in _mixed_words(bound):
        k = len(word)
        for start in range(graph.n_half_edges):
            path = _walk(graph, start, word)
            if path[-1] != start:
                continue
            key = min((word[d:] + word[:d], path[d]) for d in range(k))
            if key in found:
                continue
            found[key] = BMGeodesic(
                word=key[0],
                length=trace_to_length(float(tr)),
                trace=tr,
                start=key[1],
                primitive=_is_primitive(word, path),
            )
    out = sorted(found.values(), key=lambda g: (g.length, g.word, g.start))
    logger.info(f"BM census L={L} on {graph.n_vertices} vertices: {len(out)} closed geodesics")
    return out
