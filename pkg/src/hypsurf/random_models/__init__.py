"""Random ribbon-graph surfaces and the birthday / coupon-collector experiments."""

from hypsurf.random_models.bm import BMGeodesic, bm_geodesics, word_length, word_matrix
from hypsurf.random_models.probability import (
    BirthdayConfig,
    BirthdayRow,
    CouponRow,
    TransverseKind,
    birthday_exact,
    birthday_mc,
    birthday_sweep,
    coupon_collector_mc,
    coupon_sweep,
    cover_time_variance,
    harmonic_expectation,
)
from hypsurf.random_models.ribbon import (
    RibbonGraph,
    RibbonSample,
    exhaustive_genus_distribution,
    random_ribbon_graph,
    ribbon_genus,
    ribbon_samples,
)

__all__ = [
    "BMGeodesic",
    "BirthdayConfig",
    "BirthdayRow",
    "CouponRow",
    "RibbonGraph",
    "RibbonSample",
    "TransverseKind",
    "birthday_exact",
    "birthday_mc",
    "birthday_sweep",
    "bm_geodesics",
    "coupon_collector_mc",
    "coupon_sweep",
    "cover_time_variance",
    "exhaustive_genus_distribution",
    "harmonic_expectation",
    "random_ribbon_graph",
    "ribbon_genus",
    "ribbon_samples",
    "word_length",
    "word_matrix",
]
