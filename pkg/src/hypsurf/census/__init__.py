"""Closed geodesic census."""

from .ball import GroupBall, ball_for, enumerate_ball
from .geodesics import (
    CensusResult,
    ClosedGeodesic,
    count_in_band,
    enumerate_closed_geodesics,
    pgt_ratio_curve,
    systole,
)
