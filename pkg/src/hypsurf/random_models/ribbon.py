"""
Random trivalent ribbon graphs.

Half-edges 3i, 3i+1, 3i+2 sit at vertex i in that cyclic order, so ``sigma``
is fixed and a graph is its edge pairing ``alpha``. Faces are the cycles of
sigma o alpha.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Sequence

import networkx as nx
import numpy as np

from hypsurf.config.logging_config import configure_logging
from hypsurf.errors import Disconnected, InvalidParameter
from hypsurf.utils.parallel import substream

logger = configure_logging(__name__)

# (6n - 1)!! matchings; 10395 at n = 2
EXHAUSTIVE_MAX_N = 2


def canonical_rotation(n_vertices: int) -> tuple[int, ...]:
    return tuple(3 * (h // 3) + (h + 1) % 3 for h in range(3 * n_vertices))


def perm_cycles(perm: tuple[int, ...]) -> list[list[int]]:
    seen = [False] * len(perm)
    cycles = []
    for start in range(len(perm)):
        if seen[start]:
            continue
        cycle = []
        h = start
        while not seen[h]:
            seen[h] = True
            cycle.append(h)
            h = perm[h]
        cycles.append(cycle)
    return cycles


@dataclass(frozen=True)
class RibbonGraph:
    """
    A trivalent ribbon graph on ``n_vertices`` (= 2n) vertices.

    ``rejections`` counts the disconnected pairings discarded before this
    one was drawn.
    """
    n_vertices: int
    sigma: tuple[int, ...]
    alpha: tuple[int, ...]
    rejections: int = 0

    def __post_init__(self) -> None:
        m = 3 * self.n_vertices
        if len(self.sigma) != m or len(self.alpha) != m:
            raise InvalidParameter(f"need {m} half-edges for {self.n_vertices} vertices")
        if sorted(len(c) for c in perm_cycles(self.sigma)) != [3] * self.n_vertices:
            raise InvalidParameter("sigma must be a product of disjoint 3-cycles")
        for h, k in enumerate(self.alpha):
            if k == h or self.alpha[k] != h:
                raise InvalidParameter(f"alpha is not a fixed-point-free involution at half-edge {h}")

    @property
    def n_half_edges(self) -> int:
        return len(self.sigma)

    @property
    def n_edges(self) -> int:
        return self.n_half_edges // 2

    @property
    def face_permutation(self) -> tuple[int, ...]:
        return tuple(self.sigma[self.alpha[h]] for h in range(self.n_half_edges))

    @property
    def n_faces(self) -> int:
        return len(perm_cycles(self.face_permutation))

    @property
    def connected(self) -> bool:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_half_edges))
        graph.add_edges_from(enumerate(self.sigma))
        graph.add_edges_from(enumerate(self.alpha))
        return nx.is_connected(graph)

    @property
    def euler(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    def relabel(self, perm: tuple[int, ...]) -> RibbonGraph:
        """The same graph with half-edge h renamed perm[h]."""
        m = self.n_half_edges
        sigma = [0] * m
        alpha = [0] * m
        for h in range(m):
            sigma[perm[h]] = perm[self.sigma[h]]
            alpha[perm[h]] = perm[self.alpha[h]]
        return RibbonGraph(self.n_vertices, tuple(sigma), tuple(alpha), self.rejections)


def _matching_to_alpha(order: np.ndarray) -> tuple[int, ...]:
    alpha = np.empty(len(order), dtype=np.int64)
    alpha[order[0::2]] = order[1::2]
    alpha[order[1::2]] = order[0::2]
    return tuple(int(x) for x in alpha)


def random_ribbon_graph(n: int, seed) -> RibbonGraph:
    """
    Uniform labeled trivalent ribbon graph on 2n vertices: fixed rotations
    and a uniform perfect matching of the 6n half-edges. Disconnected
    pairings are redrawn.

    ``seed`` is anything ``numpy.random.default_rng`` accepts, a Generator
    included.
    """
    if n < 1:
        raise InvalidParameter(f"n must be >= 1, got {n}")
    rng = np.random.default_rng(seed)
    sigma = canonical_rotation(2 * n)
    rejections = 0
    while True:
        graph = RibbonGraph(2 * n, sigma, _matching_to_alpha(rng.permutation(6 * n)), rejections)
        if graph.connected:
            if rejections:
                logger.debug(f"random_ribbon_graph(n={n}): {rejections} disconnected draws rejected")
            return graph
        rejections += 1


def ribbon_genus(graph: RibbonGraph) -> int:
    """
    Genus of the closed surface the graph fills: V - E + F = 2 - 2g.

    Raises:
        Disconnected: the half-edge action is not transitive.
    """
    if not graph.connected:
        raise Disconnected(f"ribbon graph on {graph.n_vertices} vertices is not connected")
    chi = graph.euler
    if chi % 2:
        raise InvalidParameter(f"odd Euler characteristic {chi}; the graph data is inconsistent")
    return (2 - chi) // 2


def _matchings(items: list[int]) -> Iterator[list[tuple[int, int]]]:
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1:]
        for tail in _matchings(remaining):
            yield [(first, partner), *tail]


def exhaustive_genus_distribution(n: int) -> tuple[Counter, int]:
    """Genus counts over every connected pairing on 2n vertices, and the number of disconnected ones."""
    if not 1 <= n <= EXHAUSTIVE_MAX_N:
        raise InvalidParameter(f"exhaustive enumeration supports 1 <= n <= {EXHAUSTIVE_MAX_N}, got {n}")
    sigma = canonical_rotation(2 * n)
    counts: Counter = Counter()
    disconnected = 0
    for matching in _matchings(list(range(6 * n))):
        alpha = [0] * (6 * n)
        for a, b in matching:
            alpha[a], alpha[b] = b, a
        graph = RibbonGraph(2 * n, sigma, tuple(alpha))
        if not graph.connected:
            disconnected += 1
            continue
        counts[ribbon_genus(graph)] += 1
    return counts, disconnected


@dataclass(frozen=True)
class RibbonSample:
    n: int
    sample: int
    genus: int
    faces: int
    rejections: int


def ribbon_samples(n_values: Sequence[int], samples: int, seed: int) -> list[RibbonSample]:
    """
    ``samples`` graphs per n; sample k at index i of ``n_values`` draws from
    substream i * samples + k of ``seed``.
    """
    out = []
    for i, n in enumerate(n_values):
        for k in range(samples):
            graph = random_ribbon_graph(int(n), substream(seed, i * samples + k))
            g = ribbon_genus(graph)
            if 2 * g - 2 > int(n) - 1:
                raise InvalidParameter(f"genus {g} breaks the bound n - 1 >= 2g - 2 at n={n}")
            out.append(RibbonSample(n=int(n), sample=k, genus=g, faces=graph.n_faces, rejections=graph.rejections))
        logger.info(f"ribbon graphs n={n}: {samples} samples")
    return out
