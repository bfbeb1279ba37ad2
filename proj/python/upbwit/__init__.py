"""UPB bound-entangled states, Gilbert closest-separable-state search and witnesses."""

from ._core import (
    NumericalFault,
    bgr_witness,
    build_state,
    enumerate_layouts,
    fit_decay,
    gilbert_witness,
    hs_distance,
    hyperplane_distance,
    partial_transpose,
    run_gilbert,
)

__all__ = [
    "NumericalFault",
    "bgr_witness",
    "build_state",
    "enumerate_layouts",
    "fit_decay",
    "gilbert_witness",
    "hs_distance",
    "hyperplane_distance",
    "partial_transpose",
    "run_gilbert",
]
