"""
Surface groups and the regular 4g-gon construction.

A closed surface is presented by side-pairing isometries of a convex
fundamental polygon in the upper half-plane. The regular polygon is built in
the disk model, centred at the origin, and carried to the upper half-plane
by the Cayley transform z -> i(1+z)/(1-z), which sends the centre to i.
"""

from __future__ import annotations

import cmath
import hashlib
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from hypsurf.config.logging_config import configure_logging
from hypsurf.core import batch
from hypsurf.core.hyp import Mat2, geodesic_through, hyperbolic_distance
from hypsurf.errors import InvalidParameter, RelatorViolation
from hypsurf.surfaces.words import Word, evaluate_word

logger = configure_logging(__name__)

RELATOR_TOL = 1e-8
_MAX_REDUCTION_STEPS = 500


@dataclass(frozen=True)
class FundamentalPolygon:
    """
    Convex polygon in H with paired sides.

    Side k runs from ``vertices[k]`` to ``vertices[k+1]``. ``side_letters[k]``
    is the generator letter g_k that maps side ``side_pairing[k]`` onto side
    k and carries the polygon to its neighbour across side k.
    """
    vertices: tuple[complex, ...]
    side_pairing: tuple[int, ...]
    side_letters: tuple[int, ...]
    center: complex = 1j  # Dirichlet centre, an interior point

    def __post_init__(self) -> None:
        n = len(self.vertices)
        if n < 4 or n % 2:
            raise InvalidParameter(f"polygon needs an even number >= 4 of sides, got {n}")
        if len(self.side_pairing) != n or len(self.side_letters) != n:
            raise InvalidParameter("side_pairing and side_letters must have one entry per side")
        for k, p in enumerate(self.side_pairing):
            if p == k or self.side_pairing[p] != k:
                raise InvalidParameter(f"side pairing is not a fixed-point-free involution at side {k}")
            if self.side_letters[p] != -self.side_letters[k]:
                raise InvalidParameter(f"paired sides {k}, {p} must carry inverse letters")

    @property
    def n_sides(self) -> int:
        return len(self.vertices)

    @cached_property
    def side_equations(self) -> np.ndarray:
        """
        Rows (A, B, C, s) with side k on A|z|^2 + B x + C = 0, signed so that
        the interior is positive; dividing by s*y gives sinh of the signed
        distance to the side's geodesic.
        """
        rows = []
        verts = self.vertices
        for k in range(self.n_sides):
            line = geodesic_through(verts[k], verts[(k + 1) % self.n_sides])
            p, q = line.p_repel, line.p_attract
            if math.isinf(p) or math.isinf(q):
                x0 = q if math.isinf(p) else p
                row = [0.0, 1.0, -x0, 1.0]
            else:
                m, r = (p + q) / 2.0, abs(q - p) / 2.0
                row = [1.0, -2.0 * m, m * m - r * r, 2.0 * r]
            inside = self.center
            val = row[0] * abs(inside) ** 2 + row[1] * inside.real + row[2]
            sign = 1.0 if val > 0 else -1.0
            rows.append([sign * row[0], sign * row[1], sign * row[2], row[3]])
        return np.array(rows, dtype=float)

    def side_values(self, z) -> np.ndarray:
        """sinh of the signed distance from each point to each side line, shape (M, N)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        eq = self.side_equations
        x, y = z.real[:, None], z.imag[:, None]
        f = eq[:, 0] * (np.abs(z) ** 2)[:, None] + eq[:, 1] * x + eq[:, 2]
        return f / (eq[:, 3] * y)

    def contains(self, z, tol: float = 1e-12) -> np.ndarray:
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        ok = z.imag > 0
        vals = self.side_values(np.where(ok, z, 1j))
        return ok & np.all(vals >= -tol, axis=1)

    def interior_angles(self) -> np.ndarray:
        n = self.n_sides
        angles = np.empty(n)
        for k in range(n):
            prev, cur, nxt = self.vertices[k - 1], self.vertices[k], self.vertices[(k + 1) % n]
            angles[k] = triangle_angle(cur, prev, nxt)
        return angles

    def area(self, center: Optional[complex] = None) -> float:
        """Sum of the angle defects of the fan of triangles from an interior point."""
        c = self.center if center is None else center
        total = 0.0
        n = self.n_sides
        for k in range(n):
            v, w = self.vertices[k], self.vertices[(k + 1) % n]
            angles = triangle_angle(c, v, w) + triangle_angle(v, w, c) + triangle_angle(w, c, v)
            total += math.pi - angles
        return total

    @cached_property
    def diameter(self) -> float:
        verts = self.vertices
        return max(
            hyperbolic_distance(verts[i], verts[j])
            for i in range(len(verts))
            for j in range(i + 1, len(verts))
        )

    def radius_about(self, o: complex) -> float:
        return max(hyperbolic_distance(o, v) for v in self.vertices)

    @cached_property
    def bounding_box(self) -> tuple[float, float, float, float]:
        """(x0, x1, y0, y1) enclosing the polygon including its bulging sides."""
        xs = [v.real for v in self.vertices]
        ys = [v.imag for v in self.vertices]
        y_top = max(ys)
        n = self.n_sides
        for k in range(n):
            v, w = self.vertices[k], self.vertices[(k + 1) % n]
            line = geodesic_through(v, w)
            if math.isinf(line.p_repel) or math.isinf(line.p_attract):
                continue
            m, r = (line.p_repel + line.p_attract) / 2.0, abs(line.p_attract - line.p_repel) / 2.0
            if min(v.real, w.real) <= m <= max(v.real, w.real):
                y_top = max(y_top, r)
        return min(xs), max(xs), min(ys), y_top


def triangle_angle(at: complex, p: complex, q: complex) -> float:
    """Angle at ``at`` of the geodesic triangle (at, p, q), by the hyperbolic law of cosines."""
    b, c = hyperbolic_distance(at, p), hyperbolic_distance(at, q)
    a = hyperbolic_distance(p, q)
    if b == 0.0 or c == 0.0:
        return 0.0
    cos_angle = (math.cosh(b) * math.cosh(c) - math.cosh(a)) / (math.sinh(b) * math.sinh(c))
    return math.acos(max(-1.0, min(1.0, cos_angle)))


@dataclass(frozen=True)
class SurfaceGroup:
    """
    A closed hyperbolic surface as a Fuchsian group.

    For a cover, ``generators`` are the Reidemeister-Schreier generators of
    the cover subgroup, ``base`` is the covered regular surface, ``perms``
    the permutation of sheets for each base generator (right action) and
    ``tiles`` the Schreier transversal as base words. The cover's fundamental
    domain is the union of the tiles' images of ``domain``.
    """
    genus: int
    generators: tuple[Mat2, ...]
    relators: tuple[Word, ...]
    domain: FundamentalPolygon
    basepoint: complex = 1j
    name: str = ""
    base: Optional[SurfaceGroup] = field(default=None, repr=False)
    perms: tuple[tuple[int, ...], ...] = ()
    tiles: tuple[Word, ...] = (Word(),)
    generator_words: tuple[Word, ...] = ()

    @property
    def relator(self) -> Word:
        return self.relators[0]

    @property
    def is_cover(self) -> bool:
        return self.base is not None

    @property
    def root(self) -> SurfaceGroup:
        """The regular surface whose polygon tiles this one."""
        return self.base if self.base is not None else self

    @property
    def degree(self) -> int:
        return len(self.tiles)

    @property
    def surface_id(self) -> str:
        if self.name:
            return self.name
        if not self.is_cover:
            return f"regular-g{self.genus}"
        digest = hashlib.sha1(repr(self.perms).encode()).hexdigest()[:8]
        return f"cover-g{self.genus}-n{self.degree}-{digest}"

    @property
    def euler_characteristic(self) -> int:
        return 2 - 2 * self.genus

    @property
    def area(self) -> float:
        return -2.0 * math.pi * self.euler_characteristic

    @cached_property
    def tile_matrices(self) -> np.ndarray:
        """Transversal elements as a (degree, 4) stack."""
        gens = self.root.generators
        return np.array([evaluate_word(t, gens).as_array() for t in self.tiles])

    @cached_property
    def domain_radius(self) -> float:
        """Largest distance from the basepoint to a point of the fundamental domain."""
        verts = np.array(self.domain.vertices, dtype=complex)
        o = self.basepoint
        best = 0.0
        for t in self.tile_matrices:
            pts = batch.act(t, verts)
            d = np.arccosh(1.0 + np.abs(pts - o) ** 2 / (2.0 * pts.imag * o.imag))
            best = max(best, float(np.max(d)))
        return best

    @cached_property
    def letter_matrices(self) -> dict[int, Mat2]:
        """Own generators and their inverses keyed by signed letter."""
        out = {}
        for k, g in enumerate(self.generators, start=1):
            out[k] = g
            out[-k] = g.inverse()
        return out

    @cached_property
    def _root_letter_stack(self) -> dict[int, np.ndarray]:
        return {x: m.as_array() for x, m in self.root.letter_matrices.items()}

    @cached_property
    def letter_perms(self) -> dict[int, np.ndarray]:
        """Sheet permutation of each signed base letter (covers only)."""
        out = {}
        for k, perm in enumerate(self.perms, start=1):
            p = np.asarray(perm, dtype=np.int64)
            out[k] = p
            out[-k] = np.argsort(p)
        return out

    def evaluate(self, word: Word | Sequence[int]) -> Mat2:
        return evaluate_word(word, self.generators)

    def evaluate_base(self, word: Word | Sequence[int]) -> Mat2:
        return evaluate_word(word, self.root.generators)

    def sheet_of(self, word: Word | Sequence[int], start: int = 0) -> int:
        sheet = start
        for x in word:
            sheet = int(self.letter_perms[x][sheet])
        return sheet

    def check_relators(self, tol: float = RELATOR_TOL) -> None:
        for rel in self.relators:
            err = self.evaluate(rel).distance_to(Mat2.identity())
            if err > tol:
                raise RelatorViolation(f"relator {rel} is {err:.3e} from the identity (tol {tol})")


@dataclass(frozen=True)
class Reduced:
    """Points moved into the fundamental domain: ``original = elements[i] . points[i]``."""
    points: np.ndarray
    elements: np.ndarray
    tiles: np.ndarray


def reduce_points(surface: SurfaceGroup, z) -> Reduced:
    """
    Move each point into the fundamental domain by Dirichlet reduction.

    Each step applies the inverse pairing of the most violated side, which
    strictly decreases the distance to the polygon centre, so the loop ends.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex)).copy()
    poly = surface.root.domain
    letters = surface.root._root_letter_stack
    inv_pairing = np.array(
        [letters[poly.side_letters[poly.side_pairing[k]]] for k in range(poly.n_sides)]
    )
    pairing = np.array([letters[x] for x in poly.side_letters])
    h = np.tile(Mat2.identity().as_array(), (len(z), 1))
    sheets = np.zeros(len(z), dtype=np.int64)
    side_sheets = None
    if surface.is_cover:
        side_sheets = np.array([surface.letter_perms[x] for x in poly.side_letters])

    for _ in range(_MAX_REDUCTION_STEPS):
        vals = poly.side_values(z)
        worst = np.argmin(vals, axis=1)
        bad = vals[np.arange(len(z)), worst] < -1e-12
        if not bad.any():
            break
        k = worst[bad]
        z[bad] = batch.act(inv_pairing[k], z[bad])
        h[bad] = batch.mul(h[bad], pairing[k])
        if side_sheets is not None:
            sheets[bad] = side_sheets[k, sheets[bad]]
    else:
        raise InvalidParameter("Dirichlet reduction did not terminate; point too far from the domain")

    if not surface.is_cover:
        return Reduced(points=z, elements=batch.canonical(h), tiles=sheets)
    t = surface.tile_matrices[sheets]
    return Reduced(
        points=batch.act(t, z),
        elements=batch.canonical(batch.mul(h, batch.inv(t))),
        tiles=sheets,
    )


def reduce_frames(surface: SurfaceGroup, frames) -> tuple[np.ndarray, np.ndarray]:
    """Frames with base point in the fundamental domain, plus the group elements used."""
    frames = np.atleast_2d(np.asarray(frames, dtype=float))
    red = reduce_points(surface, batch.base_points(frames))
    return batch.canonical(batch.mul(batch.inv(red.elements), frames)), red.elements


# ── regular polygon construction ───────────────────────────────

_CAYLEY = np.array([[1j, 1j], [-1.0, 1.0]], dtype=complex)
_CAYLEY_ADJ = np.array([[1.0, -1j], [1.0, 1j]], dtype=complex)


def _disk_rotation(theta: float) -> np.ndarray:
    return np.array([[cmath.exp(0.5j * theta), 0.0], [0.0, cmath.exp(-0.5j * theta)]], dtype=complex)


def _disk_translation(s: float) -> np.ndarray:
    ch, sh = math.cosh(s / 2.0), math.sinh(s / 2.0)
    return np.array([[ch, sh], [sh, ch]], dtype=complex)


def _to_upper_half_plane(m: np.ndarray) -> Mat2:
    u = _CAYLEY @ m @ _CAYLEY_ADJ
    flat = u.reshape(4)
    lead = flat[np.argmax(np.abs(flat))]
    real = (flat / (lead / abs(lead))).real
    return Mat2.of(*(float(x) for x in real))


def _cayley_point(z: complex) -> complex:
    return 1j * (1.0 + z) / (1.0 - z)


def _partner(k: int, genus: int) -> int:
    return (k + 2 * genus) % (4 * genus)


def _side_letter(k: int, genus: int) -> int:
    return k + 1 if k < 2 * genus else -(k - 2 * genus + 1)


def _vertex_cycle_relator(genus: int) -> tuple[int, ...]:
    """Letters crossed walking once around vertex 0.

    Step j crosses side j when j is even and the side opposite j when j is
    odd; all 4g vertices lie in this one cycle.
    """
    n = 4 * genus
    sides = [j if j % 2 == 0 else (j + 2 * genus) % n for j in range(n)]
    return tuple(_side_letter(s, genus) for s in sides)


def build_regular_surface(genus: int) -> SurfaceGroup:
    """
    Regular 4g-gon with vertex angle 2pi/4g and opposite sides paired.

    Generator k (k = 1..2g) is the translation taking side k-1+2g onto side
    k-1. For genus 2 the relator is x1 x2^-1 x3 x4^-1 x1^-1 x2 x3^-1 x4 and
    the side translations are the systoles.
    """
    if not isinstance(genus, int) or genus < 2:
        raise InvalidParameter(f"genus must be an integer >= 2, got {genus!r}")
    n = 4 * genus
    vertex_angle = 2.0 * math.pi / n
    rho = math.acosh(1.0 / (math.tan(math.pi / n) * math.tan(vertex_angle / 2.0)))
    mid = math.acosh(math.cos(vertex_angle / 2.0) / math.sin(math.pi / n))
    r_euclid = math.tanh(rho / 2.0)

    disk_vertices = [r_euclid * cmath.exp(2j * math.pi * k / n) for k in range(n)]
    side_dir = [(2 * k + 1) * math.pi / n for k in range(n)]

    def pairing(k: int) -> np.ndarray:
        # side partner(k) -> side k, polygon -> neighbour across side k
        return (
            _disk_rotation(side_dir[k])
            @ _disk_translation(2.0 * mid)
            @ _disk_rotation(math.pi - side_dir[_partner(k, genus)])
        )

    generators = tuple(_to_upper_half_plane(pairing(k)) for k in range(2 * genus))

    polygon = FundamentalPolygon(
        vertices=tuple(_cayley_point(v) for v in disk_vertices),
        side_pairing=tuple(_partner(k, genus) for k in range(n)),
        side_letters=tuple(_side_letter(k, genus) for k in range(n)),
    )
    surface = SurfaceGroup(
        genus=genus,
        generators=generators,
        relators=(Word(_vertex_cycle_relator(genus)),),
        domain=polygon,
        basepoint=1j,
    )
    surface.check_relators()
    logger.debug(
        f"Built regular genus-{genus} surface: {n} sides, diameter={polygon.diameter:.6f}, "
        f"radius={surface.domain_radius:.6f}"
    )
    return surface


def regular_side_midpoint_distance(genus: int) -> float:
    """Distance from the polygon centre to a side midpoint; twice it is the pairing length."""
    n = 4 * genus
    return math.acosh(math.cos(math.pi / n) / math.sin(math.pi / n))
