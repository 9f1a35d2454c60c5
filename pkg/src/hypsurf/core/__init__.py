"""Matrix hyperbolic geometry in the upper half-plane."""

from .hyp import (
    FlowBoxCoords,
    FlowKind,
    GeodesicLine,
    Mat2,
    UnitTangent,
    apply_flow,
    axes_cross,
    axis,
    flow_matrix,
    flowbox_factor,
    trace_to_length,
)
