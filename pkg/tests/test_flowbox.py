"""Tests for flow boxes: volumes, membership and embeddedness."""

import math

import pytest

from hypsurf.core.hyp import FlowKind, UnitTangent, apply_flow, axis_frame, point_to_axis_distance
from hypsurf.dynamics.flowbox import (
    FlowBox,
    box_contains,
    box_reach,
    chart_volume,
    chart_volume_numeric,
    is_embedded,
    mu_hat,
    transverse_box,
)
from hypsurf.errors import ChartRadiusExceeded, InvalidParameter


@pytest.fixture
def small_box(genus2):
    return FlowBox.cube(genus2, UnitTangent.at(0.1 + 1.2j, 0.7), 0.1)


class TestVolume:
    def test_closed_form(self):
        assert chart_volume(0.1, 0.2, 0.3) == pytest.approx(0.12 * math.sinh(0.1))

    @pytest.mark.parametrize("widths", [(0.1, 0.2, 0.3), (0.05, 0.05, 0.05), (0.3, 1.0, 0.2)])
    def test_numeric_matches_closed_form(self, widths):
        assert chart_volume_numeric(*widths) == pytest.approx(chart_volume(*widths), rel=1e-6)

    def test_mu_hat(self, small_box, genus2):
        expected = 4.0 * 0.01 * math.sinh(0.05) / (2.0 * math.pi * 4.0 * math.pi)
        assert mu_hat(small_box) == pytest.approx(expected)
        assert genus2.area == pytest.approx(4.0 * math.pi)

    def test_scaled_boxes(self, small_box):
        assert small_box.plus.eta2 == pytest.approx(0.3)
        assert small_box.minus.eta1 == pytest.approx(0.1 / 3.0)
        assert small_box.plus_plus.eta3 == pytest.approx(0.9)
        assert small_box.minus.volume < small_box.volume < small_box.plus.volume

    def test_reach(self):
        assert box_reach(0.0, 1.0, 0.0) == pytest.approx(0.5)


class TestFlowBoxValidation:
    @pytest.mark.parametrize("bad", [0.0, -0.1, math.inf, math.nan])
    def test_bad_width(self, genus2, bad):
        with pytest.raises(InvalidParameter):
            FlowBox(center=UnitTangent.at(1j, 0.0), eta1=0.1, eta2=bad, eta3=0.1, surface=genus2)


# ── membership ──────────────────────────────────────────────────


class TestMembership:
    def test_centre_is_inside(self, small_box):
        assert small_box.contains(small_box.center)
        assert box_contains(small_box, small_box.center)

    def test_short_flow_stays_inside(self, small_box):
        w = apply_flow(small_box.center, FlowKind.GEODESIC, 0.1 / 4.0)
        assert small_box.contains(w)

    def test_long_flow_leaves(self, small_box):
        w = apply_flow(small_box.center, FlowKind.GEODESIC, 0.2)
        assert not small_box.contains(w)

    def test_horocycle_directions(self, small_box):
        assert small_box.contains(apply_flow(small_box.center, FlowKind.STABLE, 0.04))
        assert not small_box.contains(apply_flow(small_box.center, FlowKind.UNSTABLE, 0.08))

    def test_group_translate_is_the_same_vector(self, small_box, genus2):
        g = genus2.generators[2] @ genus2.generators[0].inverse()
        moved = UnitTangent(g @ small_box.center.frame)
        assert small_box.contains(moved)

    def test_many_matches_single(self, small_box):
        vecs = [apply_flow(small_box.center, FlowKind.GEODESIC, s) for s in (-0.3, -0.01, 0.0, 0.02, 0.3)]
        frames = [v.frame.as_array() for v in vecs]
        assert list(small_box.contains_many(frames)) == [False, True, True, True, False]

    def test_chart_radius(self, genus2):
        box = FlowBox.cube(genus2, UnitTangent.at(1j, 0.0), 1.2)
        with pytest.raises(ChartRadiusExceeded):
            box.contains(box.center)


class TestTransverseBox:
    def test_rotated_centre(self, small_box):
        tb = transverse_box(small_box)
        assert tb.center.base_point == pytest.approx(small_box.center.base_point)
        assert tb.center.direction == pytest.approx((0.7 + math.pi / 2.0) % (2.0 * math.pi))
        assert (tb.eta1, tb.eta2, tb.eta3) == (small_box.eta1, small_box.eta2, small_box.eta3)

    def test_disjoint_from_the_original_centre(self, small_box):
        assert not transverse_box(small_box).contains(small_box.center)


# ── embeddedness ────────────────────────────────────────────────


class TestEmbedded:
    def test_small_box_is_embedded(self, genus2):
        assert is_embedded(FlowBox.cube(genus2, UnitTangent.at(1j, 0.0), 0.1))

    def test_box_wrapping_a_systole_is_not_embedded(self, genus2, census_g2_short):
        geo = min(census_g2_short.classes, key=lambda g: point_to_axis_distance(1j, g.axis))
        center = UnitTangent(axis_frame(geo.axis, genus2.basepoint))
        box = FlowBox(center=center, eta1=0.1, eta2=3.5, eta3=0.1, surface=genus2)
        assert not is_embedded(box)
