"""
Finite covers of a regular surface from permutation data.

Sheets are numbered 0..n-1 and base generator k acts on them on the right by
``perms[k-1]``: sheet s goes to ``perms[k-1][s]``. The cover subgroup is the
stabiliser of sheet 0; its presentation comes from Reidemeister-Schreier on
a breadth-first Schreier tree.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import networkx as nx
import numpy as np

from hypsurf.config.logging_config import configure_logging
from hypsurf.config.settings_service import SettingsService
from hypsurf.errors import (
    InvalidParameter,
    NotTransitive,
    RejectionBudgetExceeded,
    RelatorViolation,
)
from hypsurf.surfaces.regular import SurfaceGroup
from hypsurf.surfaces.words import Word

logger = configure_logging(__name__)


@dataclass(frozen=True)
class CoverSpec:
    base: SurfaceGroup
    degree: int
    perms: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.degree < 1:
            raise InvalidParameter(f"cover degree must be >= 1, got {self.degree}")
        if self.base.is_cover:
            raise InvalidParameter("covers are built over a regular (non-cover) surface")
        if len(self.perms) != len(self.base.generators):
            raise InvalidParameter(
                f"need one permutation per base generator ({len(self.base.generators)}), "
                f"got {len(self.perms)}"
            )
        for k, p in enumerate(self.perms, start=1):
            if sorted(p) != list(range(self.degree)):
                raise InvalidParameter(f"perms[{k}] is not a permutation of 0..{self.degree - 1}: {p}")

    def act(self, sheet: int, letter: int) -> int:
        perm = self.perms[abs(letter) - 1]
        if letter > 0:
            return perm[sheet]
        return perm.index(sheet)

    def relator_permutation(self) -> tuple[int, ...]:
        out = []
        for s in range(self.degree):
            for x in self.base.relator:
                s = self.act(s, x)
            out.append(s)
        return tuple(out)

    def relator_holds(self) -> bool:
        return self.relator_permutation() == tuple(range(self.degree))

    def is_transitive(self) -> bool:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.degree))
        for p in self.perms:
            graph.add_edges_from((s, t) for s, t in enumerate(p))
        return nx.is_connected(graph)

    def validate(self) -> None:
        if not self.relator_holds():
            raise RelatorViolation(
                f"relator acts as {self.relator_permutation()} on the sheets, not the identity"
            )
        if not self.is_transitive():
            raise NotTransitive(f"permutations {self.perms} do not act transitively")


def schreier_transversal(spec: CoverSpec) -> tuple[list[Word], set[tuple[int, int]]]:
    """Breadth-first Schreier tree over the positive letters 1..2g.

    Returns the transversal words (index = sheet) and the set of tree edges
    (sheet, letter).
    """
    tiles: dict[int, Word] = {0: Word()}
    tree: set[tuple[int, int]] = set()
    queue = deque([0])
    n_gens = len(spec.perms)
    while queue:
        s = queue.popleft()
        for k in range(1, n_gens + 1):
            t = spec.act(s, k)
            if t not in tiles:
                tiles[t] = tiles[s] * Word.of(k)
                tree.add((s, k))
                queue.append(t)
    if len(tiles) != spec.degree:
        raise NotTransitive(f"Schreier tree reached {len(tiles)} of {spec.degree} sheets")
    return [tiles[s] for s in range(spec.degree)], tree


def build_cover(spec: CoverSpec) -> SurfaceGroup:
    """
    Reidemeister-Schreier presentation of the degree-n cover.

    Generators are t_s x t_{s.x}^-1 for every non-tree edge (s, x) in
    lexicographic order; relators are the base relator read from each sheet.
    """
    spec.validate()
    base = spec.base
    tiles, tree = schreier_transversal(spec)
    n_gens = len(spec.perms)

    index: dict[tuple[int, int], int] = {}
    words: list[Word] = []
    for s in range(spec.degree):
        for k in range(1, n_gens + 1):
            if (s, k) in tree:
                continue
            index[(s, k)] = len(words) + 1
            words.append(tiles[s] * Word.of(k) * tiles[spec.act(s, k)].inverse())

    relators = []
    for start in range(spec.degree):
        out: list[int] = []
        s = start
        for x in base.relator:
            if x > 0:
                if (s, x) in index:
                    out.append(index[(s, x)])
                s = spec.act(s, x)
            else:
                prev = spec.act(s, x)
                if (prev, -x) in index:
                    out.append(-index[(prev, -x)])
                s = prev
        relators.append(Word(tuple(out)))

    euler = spec.degree * base.euler_characteristic
    genus = (2 - euler) // 2
    generators = tuple(base.evaluate(w) for w in words)

    cover = SurfaceGroup(
        genus=genus,
        generators=generators,
        relators=tuple(relators),
        domain=base.domain,
        basepoint=base.basepoint,
        base=base,
        perms=spec.perms,
        tiles=tuple(tiles),
        generator_words=tuple(words),
    )
    cover.check_relators()
    logger.info(
        f"Built degree-{spec.degree} cover of genus {base.genus}: genus {genus}, "
        f"{len(generators)} Schreier generators"
    )
    return cover


def random_cover(
    base: SurfaceGroup,
    n: int,
    seed: int,
    max_attempts: Optional[int] = None,
) -> CoverSpec:
    """
    Uniform sample of a transitive, relator-satisfying permutation tuple.

    Rejection sampling: draw 2g independent uniform permutations until the
    relator acts trivially and the action is transitive.
    """
    service = SettingsService()
    if n < 1:
        raise InvalidParameter(f"cover degree must be >= 1, got {n}")
    if n > service.cover_max_degree:
        raise InvalidParameter(
            f"cover degree {n} exceeds covers.max_degree = {service.cover_max_degree}; "
            "rejection sampling is hopeless there"
        )
    max_attempts = service.cover_max_attempts if max_attempts is None else max_attempts
    rng = np.random.default_rng(seed)
    n_gens = len(base.generators)

    for attempt in range(1, max_attempts + 1):
        perms = tuple(tuple(int(x) for x in rng.permutation(n)) for _ in range(n_gens))
        spec = CoverSpec(base=base, degree=n, perms=perms)
        if spec.relator_holds() and spec.is_transitive():
            logger.debug(f"random_cover(n={n}, seed={seed}) accepted after {attempt} attempts")
            return spec
    raise RejectionBudgetExceeded(
        f"no transitive relator-satisfying tuple in {max_attempts} attempts (n={n})"
    )
