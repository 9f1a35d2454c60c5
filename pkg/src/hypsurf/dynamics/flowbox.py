"""
Flow boxes on the unit tangent bundle of a surface.

The box of widths (eta1, eta2, eta3) about v is the image of
{h^u_r1 g_t h^s_r2 : |r1| < eta1/2, |t| < eta2/2, |r2| < eta3/2} under v.
A vector w of the surface lies in it when some lift gamma.w factors through
the chart of the centre within those bounds.

In the chart the Liouville measure (normalised to dA dtheta) has density
2 e^t, so a box has volume 4 eta1 eta3 sinh(eta2 / 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
from scipy import integrate

from hypsurf.config.logging_config import configure_logging
from hypsurf.config.settings_service import SettingsService
from hypsurf.core import batch
from hypsurf.core.hyp import Mat2, UnitTangent, hyperbolic_distance, rotate
from hypsurf.census.ball import ball_for
from hypsurf.errors import ChartRadiusExceeded, InvalidParameter
from hypsurf.surfaces.regular import SurfaceGroup, reduce_frames

logger = configure_logging(__name__)

MINUS_FACTOR = 1.0 / 3.0
PLUS_FACTOR = 3.0
PLUS_PLUS_FACTOR = 9.0


def chart_volume(eta1: float, eta2: float, eta3: float) -> float:
    """Closed-form Liouville volume of an (eta1, eta2, eta3) box."""
    return 4.0 * eta1 * eta3 * math.sinh(eta2 / 2.0)


@lru_cache(maxsize=256)
def chart_volume_numeric(eta1: float, eta2: float, eta3: float) -> float:
    """The same volume by integrating the chart density 2 e^t."""
    value, _ = integrate.tplquad(
        lambda r2, t, r1: 2.0 * math.exp(t),
        -eta1 / 2.0,
        eta1 / 2.0,
        -eta2 / 2.0,
        eta2 / 2.0,
        -eta3 / 2.0,
        eta3 / 2.0,
    )
    return float(value)


def box_reach(eta1: float, eta2: float, eta3: float) -> float:
    """Bound on d(base(v), base(w)) for w in the box about v."""
    return 2.0 * math.asinh(eta1 / 4.0) + eta2 / 2.0 + 2.0 * math.asinh(eta3 / 4.0)


@dataclass(frozen=True)
class FlowBox:
    center: UnitTangent
    eta1: float
    eta2: float
    eta3: float
    surface: SurfaceGroup = field(repr=False, compare=False)

    def __post_init__(self) -> None:
        for name in ("eta1", "eta2", "eta3"):
            value = getattr(self, name)
            if not (value > 0.0 and math.isfinite(value)):
                raise InvalidParameter(f"flow box width {name} must be positive, got {value!r}")

    @classmethod
    def cube(cls, surface: SurfaceGroup, center: UnitTangent, eta: float) -> FlowBox:
        return cls(center=center, eta1=eta, eta2=eta, eta3=eta, surface=surface)

    # ── derived boxes ──

    def scaled(self, factor: float) -> FlowBox:
        return FlowBox(
            center=self.center,
            eta1=self.eta1 * factor,
            eta2=self.eta2 * factor,
            eta3=self.eta3 * factor,
            surface=self.surface,
        )

    @property
    def minus(self) -> FlowBox:
        return self.scaled(MINUS_FACTOR)

    @property
    def plus(self) -> FlowBox:
        return self.scaled(PLUS_FACTOR)

    @property
    def plus_plus(self) -> FlowBox:
        return self.scaled(PLUS_PLUS_FACTOR)

    # ── geometry ──

    @property
    def half_widths(self) -> tuple[float, float, float]:
        return self.eta1 / 2.0, self.eta2 / 2.0, self.eta3 / 2.0

    @property
    def reach(self) -> float:
        return box_reach(self.eta1, self.eta2, self.eta3)

    @property
    def volume(self) -> float:
        return chart_volume(self.eta1, self.eta2, self.eta3)

    @cached_property
    def reduced_center(self) -> np.ndarray:
        """Centre frame moved into the fundamental domain."""
        frames, _ = reduce_frames(self.surface, self.center.frame.as_array())
        return frames[0]

    @property
    def center_point(self) -> complex:
        return complex(batch.base_points(self.reduced_center))

    def lifts(self, reach: float) -> np.ndarray:
        """Group elements gamma with d(c, gamma.P) <= reach possible, P the fundamental domain."""
        c = self.center_point
        o = self.surface.basepoint
        rho = self.surface.domain_radius
        radius = hyperbolic_distance(o, c) + reach + rho + 1e-9
        ball = ball_for(self.surface, radius)
        mats = ball.mats[ball.within(radius)]
        w = batch.act(mats, o)
        dist = np.arccosh(1.0 + np.abs(w - c) ** 2 / (2.0 * w.imag * c.imag))
        return mats[dist <= reach + rho + 1e-9]

    @cached_property
    def _contain_lifts(self) -> np.ndarray:
        return self.lifts(self.reach)

    def coords_inside(self, lifted: np.ndarray) -> np.ndarray:
        """Membership of frames already expressed over the lifted centre."""
        m = batch.mul(batch.inv(self.reduced_center), lifted)
        r1, t, r2, ok = batch.factor_many(m)
        h1, h2, h3 = self.half_widths
        return ok & (np.abs(r1) < h1) & (np.abs(t) < h2) & (np.abs(r2) < h3)

    def contains_many(self, frames) -> np.ndarray:
        """
        Membership of each frame (shape (N, 4)) in the box on the surface.

        Raises:
            ChartRadiusExceeded: the box reaches past ``flowbox.chart_radius``.
        """
        chart_radius = SettingsService().chart_radius
        if self.reach > chart_radius:
            raise ChartRadiusExceeded(
                f"box reach {self.reach:.4f} exceeds flowbox.chart_radius = {chart_radius}"
            )
        frames = np.atleast_2d(batch.as_stack(frames))
        if len(frames) == 0:
            return np.zeros(0, dtype=bool)
        reduced, _ = reduce_frames(self.surface, frames)
        inside = np.zeros(len(reduced), dtype=bool)
        for g in self._contain_lifts:
            inside |= self.coords_inside(batch.mul(g, reduced))
        return inside

    def contains(self, w: UnitTangent) -> bool:
        return bool(self.contains_many(w.frame.as_array())[0])


def box_contains(box: FlowBox, w: UnitTangent) -> bool:
    return box.contains(w)


def transverse_box(box: FlowBox) -> FlowBox:
    """Same widths about the centre rotated by 90 degrees."""
    return FlowBox(
        center=rotate(box.center, math.pi / 2.0),
        eta1=box.eta1,
        eta2=box.eta2,
        eta3=box.eta3,
        surface=box.surface,
    )


def box_grid(box: FlowBox, per_axis: int = 7, fill: float = 0.98) -> np.ndarray:
    """Frames of a per_axis^3 grid over the box about its reduced centre (corners included)."""
    h1, h2, h3 = (fill * h for h in box.half_widths)
    r1, t, r2 = np.meshgrid(
        np.linspace(-h1, h1, per_axis),
        np.linspace(-h2, h2, per_axis),
        np.linspace(-h3, h3, per_axis),
        indexing="ij",
    )
    chart = batch.compose_many(r1.ravel(), t.ravel(), r2.ravel())
    return batch.mul(box.reduced_center, chart)


def is_embedded(box: FlowBox, per_axis: int = 7) -> bool:
    """
    Sampled injectivity of the box chart.

    Exact when every nontrivial group element moves the centre by more than
    twice the box reach; otherwise the box grid is pushed through each short
    element and tested against the box.
    """
    reach = box.reach
    c = box.center_point
    lifts = box.lifts(2.0 * reach)
    moved = batch.act(lifts, c)
    disp = np.arccosh(np.maximum(1.0 + np.abs(moved - c) ** 2 / (2.0 * moved.imag * c.imag), 1.0))
    nontrivial = ~np.array([Mat2(*g).is_identity(1e-9) for g in lifts], dtype=bool)
    short = lifts[nontrivial & (disp <= 2.0 * reach + 1e-9)]
    if len(short) == 0:
        return True
    grid = box_grid(box, per_axis)
    for g in short:
        if box.coords_inside(batch.mul(g, grid)).any():
            logger.debug(f"box at {c:.6f} overlaps its translate by an element of displacement <= {2 * reach:.4f}")
            return False
    return True


def mu_hat(box: FlowBox) -> float:
    """Normalised Liouville measure of an embedded box."""
    return box.volume / (2.0 * math.pi * box.surface.area)
