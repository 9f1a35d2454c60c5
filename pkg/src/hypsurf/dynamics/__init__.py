"""Flow boxes, Liouville sampling, mixing, closing and nets."""

from hypsurf.dynamics.avoidance import (
    avoidance_curve,
    box_avoidance_stats,
    geodesic_frames,
    net_filter,
    transverse_pair_filter,
)
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
from hypsurf.dynamics.discs import TransversePairFamily, embedded_disc_center, transverse_pair_family
from hypsurf.dynamics.flowbox import FlowBox, box_contains, chart_volume, is_embedded, mu_hat, transverse_box
from hypsurf.dynamics.liouville import (
    MixingEstimate,
    liouville_sample,
    liouville_samples,
    mixing_curve,
    multiple_mixing,
)
from hypsurf.dynamics.net import DelaunayNet, build_delaunay_net

__all__ = [
    "ClosingHit",
    "DelaunayNet",
    "FlowBox",
    "MixingEstimate",
    "TransversePairFamily",
    "avoidance_curve",
    "box_avoidance_stats",
    "box_contains",
    "build_delaunay_net",
    "chart_volume",
    "BoxClosingCheck",
    "census_class_ids",
    "closing_box_check",
    "closing_census",
    "closing_census_union",
    "embedded_disc_center",
    "geodesic_frames",
    "is_embedded",
    "length_multiset_diff",
    "liouville_sample",
    "liouville_samples",
    "mixing_curve",
    "mu_hat",
    "multiple_mixing",
    "net_filter",
    "orbit_box_cover",
    "transverse_box",
    "transverse_pair_family",
]
