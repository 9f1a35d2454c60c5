"""Self-intersection and filling classification of closed geodesics."""

from hypsurf.topology.classify import ClassTopology, TopologyBin, classify_census, cumulative_counts, topology_bins
from hypsurf.topology.filling import ComplementAnalysis, is_filling
from hypsurf.topology.intersections import DoublePoint, IntersectionData, is_simple, self_intersections

__all__ = [
    "ClassTopology",
    "ComplementAnalysis",
    "DoublePoint",
    "IntersectionData",
    "TopologyBin",
    "classify_census",
    "cumulative_counts",
    "is_filling",
    "is_simple",
    "self_intersections",
    "topology_bins",
]
