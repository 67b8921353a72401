"""Approximate Euclidean bipartite matching through isolating integer weights.

The package builds integer edge weights for points on a grid whose minimum
perfect matching is unique and within a chosen additive error of the
Euclidean optimum, extracts that matching from 2-adic determinant
valuations, and checks the supporting geometric facts exactly on small
instances.
"""

from .engines import (
    EngineReport,
    Matching,
    SolveResult,
    brute_force_min,
    det_v2,
    enumerate_matchings,
    hungarian_min,
    mvv_build_matrix,
    mvv_min,
    solve_delta_ewpm,
)
from .geometry import (
    ExactLength,
    GridPoint,
    Ordering,
    PerturbationParams,
    PointSetInstance,
    compare_exact,
    edge_length,
    has_collinear_triple,
    integer_sqrt,
    orientation,
    perturb,
    quad_diagonal_gap,
    segments_cross,
)
from .weights import (
    EdgeWeightAssignment,
    EllParams,
    choose_ell,
    d_ell_assignment,
    shift_nonnegative,
    w_ell_assignment,
    w_tv_assignment,
)

__version__ = "0.1.0"

__all__ = [
    "EngineReport",
    "Matching",
    "SolveResult",
    "brute_force_min",
    "det_v2",
    "enumerate_matchings",
    "hungarian_min",
    "mvv_build_matrix",
    "mvv_min",
    "solve_delta_ewpm",
    "ExactLength",
    "GridPoint",
    "Ordering",
    "PerturbationParams",
    "PointSetInstance",
    "compare_exact",
    "edge_length",
    "has_collinear_triple",
    "integer_sqrt",
    "orientation",
    "perturb",
    "quad_diagonal_gap",
    "segments_cross",
    "EdgeWeightAssignment",
    "EllParams",
    "choose_ell",
    "d_ell_assignment",
    "shift_nonnegative",
    "w_ell_assignment",
    "w_tv_assignment",
]
