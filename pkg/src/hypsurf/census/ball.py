"""
Enumerated balls of a surface group.

The ball of radius R about the basepoint o is every group element g with
d(o, g.o) <= R. It is grown breadth-first by right multiplication with the
side-pairing letters of the Dirichlet polygon. Every g != id has a letter s
with g.s^-1 strictly closer to the polygon centre, so pruning at the radius
(plus twice the distance from o to the centre) loses nothing.

For a cover the base group is enumerated and elements are kept when they
fix sheet 0.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from hypsurf.config.logging_config import configure_logging
from hypsurf.config.settings_service import SettingsService
from hypsurf.core import batch
from hypsurf.core.hyp import Mat2, hyperbolic_distance
from hypsurf.errors import BudgetExceeded, InvalidParameter
from hypsurf.surfaces.regular import SurfaceGroup
from hypsurf.surfaces.words import Word

logger = configure_logging(__name__)

KEY_SCALE = 1e6


@dataclass
class GroupBall:
    """
    Elements of the root group with basepoint displacement <= ``radius``.

    Row i holds the canonical matrix, the BFS parent row and the letter
    appended to reach it (row 0 is the identity). ``in_group`` marks rows
    belonging to ``surface`` itself (all rows unless it is a cover).
    """
    surface: SurfaceGroup
    radius: float
    mats: np.ndarray
    parents: np.ndarray
    letters: np.ndarray
    cosh_disp: np.ndarray
    in_group: np.ndarray
    _words: dict[int, Word] = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        return len(self.mats)

    @property
    def displacement(self) -> np.ndarray:
        return np.arccosh(np.maximum(self.cosh_disp, 1.0))

    def within(self, r: float, group_only: bool = True) -> np.ndarray:
        """Row indices with displacement <= r."""
        if r > self.radius + 1e-12:
            raise InvalidParameter(f"sub-ball radius {r} exceeds enumerated radius {self.radius}")
        mask = self.cosh_disp <= math.cosh(r) * (1.0 + 1e-12)
        if group_only:
            mask &= self.in_group
        return np.flatnonzero(mask)

    def word(self, i: int) -> Word:
        """Letters over the root generators spelling row i."""
        if i in self._words:
            return self._words[i]
        letters = []
        j = int(i)
        while j > 0:
            letters.append(int(self.letters[j]))
            j = int(self.parents[j])
        w = Word(tuple(reversed(letters)))
        self._words[int(i)] = w
        return w

    def matrix(self, i: int) -> Mat2:
        return Mat2(*(float(x) for x in self.mats[i]))


def _canonical_keys(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Integer keys with the sign fixed on the rounded entries, plus sign-fixed matrices."""
    keys = np.round(mats * KEY_SCALE).astype(np.int64)
    nz = keys != 0
    first = np.argmax(nz, axis=1)
    lead = keys[np.arange(len(keys)), first]
    sign = np.where(lead < 0, -1, 1)
    return keys * sign[:, None], mats * sign[:, None] + 0.0


def _new_rows(visited: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """Indices of ``keys`` rows that are not in ``visited`` and not repeated earlier in ``keys``."""
    if len(keys) == 0:
        return np.empty(0, dtype=np.int64)
    both = np.concatenate([visited, keys])
    _, first = np.unique(both, axis=0, return_index=True)
    fresh = first[first >= len(visited)] - len(visited)
    return np.sort(fresh)


def enumerate_ball(
    surface: SurfaceGroup,
    radius: float,
    max_elements: Optional[int] = None,
) -> GroupBall:
    """
    Grow the ball of ``radius`` about ``surface.basepoint``.

    Raises:
        BudgetExceeded: more than ``census.max_elements`` rows would be stored.
    """
    if not radius >= 0:
        raise InvalidParameter(f"ball radius must be >= 0, got {radius}")
    max_elements = SettingsService().max_elements if max_elements is None else max_elements
    root = surface.root
    o = surface.basepoint
    center = root.domain.center
    slack = 2.0 * hyperbolic_distance(o, center) if o != center else 0.0
    cosh_prune = math.cosh(radius + slack) * (1.0 + 1e-9)
    cosh_keep = math.cosh(radius) * (1.0 + 1e-9)

    letter_list = sorted(root.letter_matrices, key=lambda x: (abs(x), -x))
    letter_arr = np.array(letter_list, dtype=np.int64)
    letter_mats = np.array([root.letter_matrices[x].as_array() for x in letter_list])
    perms = None
    if surface.is_cover:
        perms = np.array([surface.letter_perms[x] for x in letter_list])

    ident = Mat2.identity().as_array()[None, :]
    mats = [ident]
    parents = [np.array([-1], dtype=np.int64)]
    letters = [np.array([0], dtype=np.int64)]
    sheets = [np.array([0], dtype=np.int64)]
    keys_seen, _ = _canonical_keys(ident)

    frontier = np.array([0])
    frontier_mats, frontier_last, frontier_sheet = ident, np.array([0]), np.array([0])
    total = 1
    layer = 0
    while len(frontier):
        layer += 1
        n_f, n_l = len(frontier), len(letter_arr)
        cand = batch.mul(frontier_mats[:, None, :], letter_mats[None, :, :]).reshape(-1, 4)
        cand_parent = np.repeat(frontier, n_l)
        cand_letter = np.tile(letter_arr, n_f)
        keep = cand_letter != -np.repeat(frontier_last, n_l)
        cand_cosh_center = _cosh_about(cand, center)
        keep &= cand_cosh_center <= cosh_prune
        cand, cand_parent, cand_letter = cand[keep], cand_parent[keep], cand_letter[keep]
        if perms is not None:
            letter_idx = np.tile(np.arange(n_l), n_f)[keep]
            cand_sheet = perms[letter_idx, np.repeat(frontier_sheet, n_l)[keep]]
        else:
            cand_sheet = np.zeros(len(cand), dtype=np.int64)

        cand_keys, cand = _canonical_keys(cand)
        fresh = _new_rows(keys_seen, cand_keys)
        if len(fresh) == 0:
            break
        if total + len(fresh) > max_elements:
            raise BudgetExceeded(
                f"ball of radius {radius:.4f} exceeds census.max_elements = {max_elements} "
                f"at word length {layer}"
            )
        new_idx = np.arange(total, total + len(fresh))
        mats.append(cand[fresh])
        parents.append(cand_parent[fresh])
        letters.append(cand_letter[fresh])
        sheets.append(cand_sheet[fresh])
        keys_seen = np.concatenate([keys_seen, cand_keys[fresh]])
        total += len(fresh)

        frontier = new_idx
        frontier_mats = cand[fresh]
        frontier_last = cand_letter[fresh]
        frontier_sheet = cand_sheet[fresh]
        logger.debug(f"ball layer {layer}: +{len(fresh)} elements (total {total})")

    all_mats = np.concatenate(mats)
    all_sheets = np.concatenate(sheets)
    cosh_o = _cosh_about(all_mats, o)
    keep_rows = cosh_o <= cosh_keep
    keep_rows[0] = True
    # Rows beyond the radius stay as BFS parents; only membership is filtered.
    in_group = keep_rows & (all_sheets == 0)
    ball = GroupBall(
        surface=surface,
        radius=radius,
        mats=all_mats,
        parents=np.concatenate(parents),
        letters=np.concatenate(letters),
        cosh_disp=np.where(keep_rows, cosh_o, np.inf),
        in_group=in_group,
    )
    logger.info(
        f"Enumerated ball R={radius:.4f} on {surface.surface_id}: {total} rows, "
        f"{int(in_group.sum())} group elements, {layer} layers"
    )
    return ball


def _cosh_about(mats: np.ndarray, z: complex) -> np.ndarray:
    """cosh d(z, g z) for each row."""
    w = batch.act(mats, z)
    return 1.0 + np.abs(w - z) ** 2 / (2.0 * w.imag * z.imag)


# surfaces whose largest ball is kept; older ones are evicted least-recently-used first
BALL_CACHE_SURFACES = 8


@dataclass
class _BallSlot:
    ball: Optional[GroupBall] = None
    lock: threading.Lock = field(default_factory=threading.Lock)


@lru_cache(maxsize=BALL_CACHE_SURFACES)
def _slot(surface: SurfaceGroup) -> _BallSlot:
    return _BallSlot()


def ball_for(surface: SurfaceGroup, radius: float) -> GroupBall:
    """Cached ball of at least ``radius``; callers filter with :meth:`GroupBall.within`.

    Growing the ball of one surface is serialised so concurrent callers share a
    single enumeration.
    """
    slot = _slot(surface)
    with slot.lock:
        if slot.ball is None or slot.ball.radius < radius:
            slot.ball = enumerate_ball(surface, radius)
        return slot.ball


def cached_surfaces() -> int:
    return _slot.cache_info().currsize


def clear_ball_cache() -> None:
    _slot.cache_clear()
