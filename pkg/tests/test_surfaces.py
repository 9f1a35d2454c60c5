"""Tests for words, the regular 4g-gon surfaces, reduction and finite covers."""

import json
import math

import numpy as np
import pytest

from hypsurf.core import batch
from hypsurf.core.hyp import Mat2, hyperbolic_distance
from hypsurf.errors import (
    ConfigError,
    InvalidParameter,
    NotTransitive,
    RejectionBudgetExceeded,
    RelatorViolation,
)
from hypsurf.surfaces.covers import CoverSpec, build_cover, random_cover, schreier_transversal
from hypsurf.surfaces.regular import (
    build_regular_surface,
    reduce_points,
    regular_side_midpoint_distance,
)
from hypsurf.surfaces.serialize import load_surface, save_surface, surface_from_dict, surface_to_dict
from hypsurf.surfaces.words import Word, cyclic_reduce, evaluate_word, free_reduce

from conftest import SYSTOLE_G2


# ── words ───────────────────────────────────────────────────────


class TestWords:
    def test_free_reduce(self):
        assert free_reduce([1, 2, -2, -1, 3]) == (3,)

    def test_cyclic_reduce(self):
        assert cyclic_reduce([-1, 2, 3, 1]) == (2, 3)

    def test_zero_letter_rejected(self):
        with pytest.raises(InvalidParameter):
            Word.of(1, 0)

    def test_word_is_reduced_on_construction(self):
        assert Word.of(1, 2, -2) == Word.of(1)

    def test_inverse_and_power(self):
        w = Word.of(1, 2)
        assert (w * w.inverse()) == Word()
        assert w.power(2).letters == (1, 2, 1, 2)
        assert w.power(-1) == w.inverse()

    def test_encode_decode(self):
        w = Word.of(1, -3, 2)
        assert w.encode() == "1.-3.2"
        assert Word.decode(w.encode()) == w
        assert Word().encode() == "e"
        assert Word.decode("e") == Word()

    def test_evaluate_letter_out_of_range(self):
        with pytest.raises(InvalidParameter):
            evaluate_word(Word.of(3), [Mat2.identity(), Mat2.identity()])


# ── regular surfaces ────────────────────────────────────────────


class TestRegularSurface:
    def test_genus2_relator_is_identity(self, genus2):
        assert len(genus2.domain.vertices) == 8
        assert genus2.evaluate(genus2.relator).is_identity(1e-8)

    def test_genus3_shape(self, genus3):
        assert genus3.domain.n_sides == 12
        assert len(genus3.relator) == 12
        assert genus3.evaluate(genus3.relator).is_identity(1e-8)

    def test_genus_below_two_rejected(self):
        with pytest.raises(InvalidParameter):
            build_regular_surface(1)

    def test_area_and_euler(self, genus2, genus3):
        assert genus2.euler_characteristic == -2
        assert genus2.area == pytest.approx(4.0 * math.pi)
        assert genus2.domain.area() == pytest.approx(4.0 * math.pi, rel=1e-9)
        assert genus3.domain.area() == pytest.approx(8.0 * math.pi, rel=1e-9)

    def test_vertex_angles_sum_to_two_pi(self, genus2):
        assert genus2.domain.interior_angles().sum() == pytest.approx(2.0 * math.pi)

    def test_generators_translate_by_side_distance(self, genus2):
        # each pairing moves the centre i across one side
        expected = 2.0 * regular_side_midpoint_distance(2)
        assert expected == pytest.approx(SYSTOLE_G2, rel=1e-12)
        for g in genus2.generators:
            assert hyperbolic_distance(1j, complex(g.act(1j))) == pytest.approx(expected)

    def test_centre_is_inside(self, genus2):
        assert genus2.domain.contains(np.array([1j]))[0]

    def test_surface_id(self, genus2):
        assert genus2.surface_id == "regular-g2"
        assert not genus2.is_cover
        assert genus2.degree == 1


class TestReducePoints:
    def test_points_land_in_the_domain(self, genus2):
        rng = np.random.default_rng(0)
        g = np.array([genus2.letter_matrices[x].as_array() for x in rng.choice([1, -1, 2, -2, 3, 4], 50)])
        h = np.array([genus2.letter_matrices[x].as_array() for x in rng.choice([1, -2, 3, -4], 50)])
        z = batch.act(batch.mul(g, h), 1j + 0.05 * rng.standard_normal(50))
        red = reduce_points(genus2, z)
        assert genus2.domain.contains(red.points, tol=1e-9).all()
        np.testing.assert_allclose(batch.act(red.elements, red.points), z, rtol=1e-8)

    def test_domain_points_are_left_alone(self, genus2):
        red = reduce_points(genus2, [1j])
        assert red.points[0] == pytest.approx(1j)
        assert Mat2(*red.elements[0]).is_identity()


# ── covers ──────────────────────────────────────────────────────


class TestCoverSpec:
    def test_bad_permutation_rejected(self, genus2):
        with pytest.raises(InvalidParameter):
            CoverSpec(base=genus2, degree=2, perms=((0, 0), (0, 1), (0, 1), (0, 1)))

    def test_wrong_number_of_permutations(self, genus2):
        with pytest.raises(InvalidParameter):
            CoverSpec(base=genus2, degree=2, perms=((0, 1),))

    def test_not_transitive(self, genus2):
        spec = CoverSpec(base=genus2, degree=2, perms=((0, 1),) * 4)
        assert spec.relator_holds()
        with pytest.raises(NotTransitive):
            spec.validate()

    def test_relator_violation(self, genus2):
        spec = CoverSpec(base=genus2, degree=3, perms=((1, 2, 0), (1, 0, 2), (0, 1, 2), (0, 1, 2)))
        with pytest.raises(RelatorViolation):
            spec.validate()

    def test_schreier_transversal_reaches_every_sheet(self, genus2):
        spec = CoverSpec(base=genus2, degree=2, perms=((1, 0), (0, 1), (0, 1), (0, 1)))
        tiles, tree = schreier_transversal(spec)
        assert tiles == [Word(), Word.of(1)]
        assert tree == {(0, 1)}


class TestBuildCover:
    def test_trivial_cover(self, genus2):
        spec = random_cover(genus2, 1, seed=0)
        assert spec.perms == ((0,),) * 4
        cover = build_cover(spec)
        assert cover.genus == 2
        assert cover.degree == 1

    def test_double_cover_genus_and_relators(self, genus2):
        spec = CoverSpec(base=genus2, degree=2, perms=((1, 0), (0, 1), (0, 1), (0, 1)))
        cover = build_cover(spec)
        assert cover.genus == 3
        assert cover.euler_characteristic == 2 * genus2.euler_characteristic
        assert len(cover.relators) == 2
        cover.check_relators()
        # generators lie in the stabiliser of sheet 0
        for w in cover.generator_words:
            assert cover.sheet_of(w) == 0

    def test_random_cover_is_deterministic(self, genus2):
        a = random_cover(genus2, 4, seed=123)
        b = random_cover(genus2, 4, seed=123)
        assert a.perms == b.perms
        assert a.relator_holds() and a.is_transitive()

    def test_random_cover_genus_formula(self, genus2):
        for n in (2, 3):
            cover = build_cover(random_cover(genus2, n, seed=n))
            assert cover.genus == n * (genus2.genus - 1) + 1
            assert cover.area == pytest.approx(n * genus2.area)

    def test_degree_cap(self, genus2):
        with pytest.raises(InvalidParameter):
            random_cover(genus2, 7, seed=0)

    def test_rejection_budget(self, genus2):
        with pytest.raises(RejectionBudgetExceeded):
            random_cover(genus2, 6, seed=1, max_attempts=0)

    def test_cover_id_depends_on_perms(self, genus2):
        a = build_cover(CoverSpec(base=genus2, degree=2, perms=((1, 0), (0, 1), (0, 1), (0, 1))))
        b = build_cover(CoverSpec(base=genus2, degree=2, perms=((0, 1), (1, 0), (0, 1), (0, 1))))
        assert a.surface_id.startswith("cover-g3-n2-")
        assert a.surface_id != b.surface_id


# ── serialization ───────────────────────────────────────────────


class TestSerialize:
    def test_regular_surface_round_trip(self, genus2, tmp_path):
        path = save_surface(genus2, tmp_path / "g2.json")
        loaded = load_surface(path)
        assert loaded.generators == genus2.generators
        assert loaded.relators == genus2.relators
        assert loaded.domain.vertices == genus2.domain.vertices
        assert loaded.surface_id == genus2.surface_id

    def test_cover_round_trip(self, genus2):
        cover = build_cover(CoverSpec(base=genus2, degree=2, perms=((1, 0), (0, 1), (0, 1), (0, 1))))
        doc = json.loads(json.dumps(surface_to_dict(cover)))
        loaded = surface_from_dict(doc)
        assert loaded.is_cover
        assert loaded.perms == cover.perms
        assert loaded.tiles == cover.tiles
        assert loaded.generators == cover.generators
        loaded.check_relators()

    def test_wrong_kind(self):
        with pytest.raises(ConfigError, match="not a surface document"):
            surface_from_dict({"kind": "something-else"})

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            load_surface(tmp_path / "missing.json")

    def test_malformed_document(self, genus2):
        doc = surface_to_dict(genus2)
        del doc["generators"]
        with pytest.raises(ConfigError, match="malformed"):
            surface_from_dict(doc)
