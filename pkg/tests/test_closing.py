"""Tests for the closing census read off flow-box returns."""

import numpy as np
import pytest

from hypsurf.census.ball import enumerate_ball
from hypsurf.core.hyp import Mat2, UnitTangent, axis, axis_frame
from hypsurf.dynamics.closing import (
    BoxClosingCheck,
    ClosingHit,
    census_class_ids,
    closing_box_check,
    closing_census,
    closing_census_union,
    length_multiset_diff,
    orbit_box_cover,
)
from hypsurf.dynamics.flowbox import FlowBox
from hypsurf.dynamics.liouville import liouville_samples
from hypsurf.errors import BallTooSmall, BandExceedsCensus, InvalidParameter

from conftest import SYSTOLE_G2


class TestLengthMultisetDiff:
    def test_equal(self):
        assert length_multiset_diff([1.0, 2.0, 2.0], [2.0, 1.0, 2.0 + 1e-9]) == ([], [])

    def test_missing_and_extra(self):
        missing, extra = length_multiset_diff([1.0, 2.0, 3.0], [1.0, 2.0000001, 4.0])
        assert missing == [3.0]
        assert extra == [4.0]

    def test_multiplicity_counts(self):
        assert length_multiset_diff([1.0, 1.0], [1.0]) == ([1.0], [])

    def test_empty(self):
        assert length_multiset_diff([], [5.0]) == ([], [5.0])


class TestClosingCensus:
    def test_no_boxes(self, genus2):
        assert closing_census_union(genus2, [], 3.0) == ()

    def test_non_positive_time(self, genus2):
        box = FlowBox.cube(genus2, UnitTangent.at(1j, 0.0), 0.05)
        with pytest.raises(InvalidParameter):
            closing_census(genus2, box, 0.0)

    def test_ball_too_small(self, genus2):
        box = FlowBox.cube(genus2, UnitTangent.at(1j, 0.0), 0.05)
        with pytest.raises(BallTooSmall):
            closing_census(genus2, box, 3.05, ball=enumerate_ball(genus2, 1.0))

    def test_nothing_below_the_systole(self, genus2):
        box = FlowBox.cube(genus2, UnitTangent.at(1j, 0.3), 0.05)
        assert closing_census(genus2, box, 2.0) == ()

    def test_orbit_cover_band_past_cutoff(self, genus2, census_g2_short):
        with pytest.raises(BandExceedsCensus):
            orbit_box_cover(genus2, census_g2_short, 3.1, 0.1)

    def test_orbit_cover_one_box_per_class(self, genus2, census_g2_short):
        boxes = orbit_box_cover(genus2, census_g2_short, 3.05, 0.05)
        assert len(boxes) == len(census_g2_short)
        assert all(b.eta1 == b.eta2 == b.eta3 == 0.05 for b in boxes)

    def test_systole_band_matches_the_census(self, genus2, census_g2_short):
        boxes = orbit_box_cover(genus2, census_g2_short, 3.05, 0.05)
        hits = closing_census_union(genus2, boxes, 3.05, eta=0.05)
        assert all(h.length == pytest.approx(SYSTOLE_G2, abs=1e-7) for h in hits)
        missing, extra = length_multiset_diff(census_g2_short.lengths(), [h.length for h in hits])
        assert missing == []
        assert extra == []

    def test_single_systole_box_finds_its_class(self, genus2, census_g2_short):
        box = orbit_box_cover(genus2, census_g2_short, 3.05, 0.05)[0]
        hits = closing_census(genus2, box, 3.05, eta=0.05)
        assert hits
        assert all(genus2.evaluate(h.word).approx_eq(h.matrix, 1e-7) for h in hits)


# ── census-independent box check ────────────────────────────────


def _hit(geo, conj=None, length=None):
    m = geo.matrix if conj is None else conj @ geo.matrix @ conj.inverse()
    return ClosingHit(length=geo.length if length is None else length, word=geo.word, matrix=m, axis=axis(m))


def _orbit_box(surface, geo, eta):
    return FlowBox.cube(surface, UnitTangent(axis_frame(geo.axis, surface.basepoint)), eta)


def _sampled_boxes(surface, n, eta, seed):
    frames = liouville_samples(surface, n, np.random.default_rng(seed))
    return [FlowBox.cube(surface, UnitTangent(Mat2.from_array(f)), eta) for f in frames]


def _longest_up_to(census, L):
    return max((c for c in census.classes if c.length <= L), key=lambda c: c.length)


class TestCensusClassIds:
    def test_classes_map_to_themselves(self, genus2, census_g2_short):
        hits = [_hit(c) for c in census_g2_short.classes]
        assert census_class_ids(genus2, hits, census_g2_short) == [c.class_id for c in census_g2_short.classes]

    def test_conjugates_map_to_their_class(self, genus2, census_g2_short):
        g = genus2.generators[0] @ genus2.generators[1]
        hits = [_hit(c, conj=g) for c in census_g2_short.classes]
        assert census_class_ids(genus2, hits, census_g2_short) == [c.class_id for c in census_g2_short.classes]

    def test_length_off_the_census(self, genus2, census_g2_short):
        geo = census_g2_short.classes[0]
        assert census_class_ids(genus2, [_hit(geo, length=geo.length + 0.02)], census_g2_short) == [None]

    def test_no_hits(self, genus2, census_g2_short):
        assert census_class_ids(genus2, [], census_g2_short) == []


class TestBoxClosingCheck:
    def test_sets(self, genus2):
        box = FlowBox.cube(genus2, UnitTangent.at(1j, 0.0), 0.3)
        check = BoxClosingCheck(L=3.0, eta=0.05, box=box, found=(1, 4), required=(1, 2), allowed=(1, 2, 3))
        assert check.missing == (2,)
        assert check.extra == (4,)
        assert not check.ok

    def test_unmatched_fails(self, genus2):
        box = FlowBox.cube(genus2, UnitTangent.at(1j, 0.0), 0.3)
        check = BoxClosingCheck(L=3.0, eta=0.05, box=box, found=(), required=(), allowed=(), unmatched=(3.01,))
        assert not check.ok

    def test_band_past_cutoff(self, genus2, census_g2_short):
        box = FlowBox.cube(genus2, UnitTangent.at(1j, 0.0), 0.3)
        with pytest.raises(BandExceedsCensus):
            closing_box_check(genus2, census_g2_short, box, 3.1, 0.1)

    def test_box_on_a_systole_orbit(self, genus2, census_g2_short):
        geo = census_g2_short.classes[0]
        check = closing_box_check(genus2, census_g2_short, _orbit_box(genus2, geo, 0.05), 3.05, 0.05)
        assert geo.class_id in check.required
        assert set(check.required) <= set(check.found) <= set(check.allowed)
        assert check.ok

    def test_sampled_boxes_at_the_systole(self, genus2, census_g2_short):
        for box in _sampled_boxes(genus2, 4, 0.3, seed=3):
            check = closing_box_check(genus2, census_g2_short, box, 3.05, 0.05)
            assert check.ok, (check.missing, check.extra, check.unmatched)


@pytest.mark.slow
@pytest.mark.parametrize("L", [6.0, 8.0])
class TestClosingBands:
    def test_orbit_box_sandwich(self, genus2, census_g2_long, L):
        geo = _longest_up_to(census_g2_long, L)
        check = closing_box_check(genus2, census_g2_long, _orbit_box(genus2, geo, 0.3), geo.length, 0.05)
        assert geo.class_id in check.required
        assert check.ok, (check.missing, check.extra, check.unmatched)

    def test_sampled_box_sandwich(self, genus2, census_g2_long, L):
        for box in _sampled_boxes(genus2, 4, 0.3, seed=17):
            check = closing_box_check(genus2, census_g2_long, box, L, 0.05)
            assert check.ok, (check.missing, check.extra, check.unmatched)

