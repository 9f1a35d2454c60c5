"""Tests for the 2x2 matrix geometry in hypsurf.core.hyp."""

import math

import numpy as np
import pytest

from hypsurf.core.hyp import (
    FlowBoxCoords,
    FlowKind,
    GeodesicLine,
    Mat2,
    UnitTangent,
    apply_flow,
    axes_cross,
    axis,
    axis_frame,
    compose_flowbox,
    flow_matrix,
    flowbox_factor,
    geodesic_through,
    hyperbolic_distance,
    line_parameter,
    point_on_axis,
    point_to_axis_distance,
    rotate,
    trace_to_length,
)
from hypsurf.errors import DegenerateConfiguration, EllipticOrParabolic, InvalidParameter, NotFactorable


# ── Mat2 ────────────────────────────────────────────────────────


class TestMat2:
    def test_of_normalises_determinant(self):
        m = Mat2.of(2.0, 0.0, 0.0, 2.0)
        assert m == Mat2.identity()

    def test_of_picks_positive_leading_entry(self):
        m = Mat2.of(-2.0, -1.0, -1.0, -1.0)
        assert m == Mat2(2.0, 1.0, 1.0, 1.0)

    def test_of_rejects_negative_determinant(self):
        with pytest.raises(InvalidParameter):
            Mat2.of(1.0, 0.0, 0.0, -1.0)

    def test_product_and_inverse(self):
        m = Mat2.of(2.0, 1.0, 1.0, 1.0)
        assert (m @ m.inverse()).is_identity()
        assert m.power(3).approx_eq(m @ m @ m)
        assert m.power(-2).approx_eq(m.inverse() @ m.inverse())

    def test_distance_ignores_sign(self):
        m = Mat2(2.0, 1.0, 1.0, 1.0)
        flipped = Mat2(-2.0, -1.0, -1.0, -1.0)
        assert m.distance_to(flipped) == 0.0

    def test_act_on_boundary_infinity(self):
        m = Mat2.of(2.0, 1.0, 1.0, 1.0)
        assert m.act(math.inf) == pytest.approx(2.0)
        assert Mat2.identity().act(math.inf) == math.inf


# ── flows ───────────────────────────────────────────────────────


class TestFlows:
    def test_geodesic_flow_trace(self):
        assert flow_matrix(FlowKind.GEODESIC, 1.0).trace == pytest.approx(2.0 * math.cosh(0.5))
        assert flow_matrix("geodesic", 1.0).trace == pytest.approx(2.2552, abs=1e-4)

    @pytest.mark.parametrize("kind", ["geodesic", "stable", "unstable"])
    def test_one_parameter_group(self, kind):
        rng = np.random.default_rng(3)
        for r, s in rng.uniform(-2.0, 2.0, size=(20, 2)):
            lhs = flow_matrix(kind, r) @ flow_matrix(kind, s)
            assert lhs.approx_eq(flow_matrix(kind, r + s), 1e-12)

    def test_non_finite_parameter_rejected(self):
        with pytest.raises(InvalidParameter):
            flow_matrix("stable", math.nan)

    def test_geodesic_flow_moves_base_point_by_t(self):
        v = UnitTangent.at(0.3 + 2.0j, 1.1)
        w = apply_flow(v, FlowKind.GEODESIC, 0.75)
        assert hyperbolic_distance(v.base_point, w.base_point) == pytest.approx(0.75)

    def test_unit_tangent_round_trip(self):
        v = UnitTangent.at(-1.0 + 0.5j, 2.0)
        assert v.base_point == pytest.approx(-1.0 + 0.5j)
        assert v.direction == pytest.approx(2.0)

    def test_rotation(self):
        v = UnitTangent.at(1j, 0.25)
        assert rotate(v, math.pi / 2.0).direction == pytest.approx(0.25 + math.pi / 2.0)
        assert rotate(v, 2.0 * math.pi).frame.approx_eq(v.frame)

    def test_upward_vector_at_i_is_the_identity_frame(self):
        assert UnitTangent.at(1j, math.pi / 2.0).frame.is_identity()

    def test_commutation_identity(self):
        rng = np.random.default_rng(11)
        for r1, tp, r2, t in rng.uniform(-2.0, 2.0, size=(1000, 4)):
            lhs = (
                flow_matrix("unstable", r1)
                @ flow_matrix("geodesic", tp)
                @ flow_matrix("stable", r2)
                @ flow_matrix("geodesic", t)
            )
            rhs = (
                flow_matrix("geodesic", t)
                @ flow_matrix("unstable", r1 * math.exp(t))
                @ flow_matrix("geodesic", tp)
                @ flow_matrix("stable", r2 * math.exp(-t))
            )
            assert lhs.distance_to(rhs) <= 1e-10


# ── translation length and axes ─────────────────────────────────


class TestTraceToLength:
    def test_inverse_of_trace_formula(self):
        assert trace_to_length(2.0 * math.cosh(1.5)) == pytest.approx(3.0)

    def test_trace_three(self):
        assert trace_to_length(3.0) == pytest.approx(2.0 * math.acosh(1.5))
        assert trace_to_length(3.0) == pytest.approx(1.92485, abs=1e-5)

    def test_negative_trace_uses_absolute_value(self):
        assert trace_to_length(-3.0) == trace_to_length(3.0)

    def test_parabolic_rejected(self):
        with pytest.raises(EllipticOrParabolic):
            trace_to_length(2.0)


class TestAxis:
    def test_endpoints_are_fixed_points(self):
        m = Mat2.of(2.0, 1.0, 1.0, 1.0)
        line = axis(m)
        for x in (line.p_repel, line.p_attract):
            assert m.act(x) == pytest.approx(x)

    def test_attracting_endpoint(self):
        m = Mat2.of(2.0, 1.0, 1.0, 1.0)
        line = axis(m)
        x = 0.123
        for _ in range(60):
            x = m.act(x)
        assert x == pytest.approx(line.p_attract)

    def test_diagonal_axis(self):
        line = axis(flow_matrix("geodesic", 2.0))
        assert line.p_repel == 0.0
        assert line.p_attract == math.inf

    def test_parabolic_has_no_axis(self):
        with pytest.raises(EllipticOrParabolic):
            axis(flow_matrix("stable", 1.0))

    def test_degenerate_line_rejected(self):
        with pytest.raises(DegenerateConfiguration):
            GeodesicLine(1.0, 1.0)


class TestAxesCross:
    def test_crossing(self):
        assert axes_cross(GeodesicLine(0.0, math.inf), GeodesicLine(-1.0, 1.0))

    def test_disjoint(self):
        assert not axes_cross(GeodesicLine(0.0, 1.0), GeodesicLine(2.0, 3.0))

    def test_symmetric(self):
        a, b = GeodesicLine(-2.0, 0.5), GeodesicLine(0.0, 3.0)
        assert axes_cross(a, b) == axes_cross(b, a)

    def test_shared_endpoint_raises(self):
        with pytest.raises(DegenerateConfiguration):
            axes_cross(GeodesicLine(0.0, 1.0), GeodesicLine(1.0, 2.0))


# ── flow-box chart ──────────────────────────────────────────────


class TestFlowboxChart:
    def test_round_trip(self):
        rng = np.random.default_rng(5)
        for r1, t, r2 in rng.uniform(-1.0, 1.0, size=(200, 3)):
            got = flowbox_factor(compose_flowbox(FlowBoxCoords(r1, t, r2)))
            assert got.r1 == pytest.approx(r1, abs=1e-10)
            assert got.t == pytest.approx(t, abs=1e-10)
            assert got.r2 == pytest.approx(r2, abs=1e-10)

    def test_identity_is_the_origin(self):
        assert flowbox_factor(Mat2.identity()) == FlowBoxCoords(0.0, 0.0, 0.0)

    def test_outside_chart(self):
        with pytest.raises(NotFactorable):
            flowbox_factor(Mat2.of(0.0, -1.0, 1.0, 0.0))


# ── points and geodesics in H ───────────────────────────────────


class TestPointsAndLines:
    def test_vertical_distance(self):
        assert hyperbolic_distance(1j, math.e * 1j) == pytest.approx(1.0)

    def test_geodesic_through_vertical(self):
        line = geodesic_through(1j, 2j)
        assert line.p_repel == 0.0 and line.p_attract == math.inf

    def test_geodesic_through_circle(self):
        z1, z2 = -0.5 + 1j, 0.7 + 0.8j
        line = geodesic_through(z1, z2)
        assert point_to_axis_distance(z1, line) == pytest.approx(0.0, abs=1e-9)
        assert point_to_axis_distance(z2, line) == pytest.approx(0.0, abs=1e-9)
        assert line.p_repel < line.p_attract

    def test_axis_frame_parameterises_the_line(self):
        line = GeodesicLine(-1.0, 2.0)
        z = 0.3 + 0.4j
        frame = axis_frame(line, z)
        foot = point_on_axis(frame, 0.0)
        assert point_to_axis_distance(foot, line) == pytest.approx(0.0, abs=1e-9)
        assert hyperbolic_distance(z, foot) == pytest.approx(point_to_axis_distance(z, line))
        far = point_on_axis(frame, 1.25)
        assert line_parameter(frame, far) == pytest.approx(1.25)
        assert hyperbolic_distance(foot, far) == pytest.approx(1.25)
