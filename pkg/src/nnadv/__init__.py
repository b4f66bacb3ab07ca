"""Worst-case grid instances for the nearest-neighbor TSP heuristic.

Builds a doubling family of 2-row grid instances on which the
nearest-neighbor rule can be forced into tours a logarithmic factor
longer than optimum, executes the rule under explicit tie-breaking
policies, machine-certifies the forced tours exactly, and reproduces
the approximation-ratio tables.
"""
from ._kernels import BACKEND
from .construction import (
    CertificationError,
    CertificationReport,
    ConstructionRecord,
    base_tour,
    build_adversarial_tour,
    certify_adversarial_tour,
    jump_length,
    length_recurrence_rhs,
    predicted_tour_length,
)
from .engine import (
    Adversarial,
    AdversarialTargetIllegal,
    IndexOrder,
    Lexicographic,
    NnrStep,
    NnrTrace,
    SweepRow,
    TieBreakPolicy,
    TourPath,
    ValidationVerdict,
    close_tour,
    dumps_tour,
    loads_tour,
    measure_length,
    run_nearest_neighbor,
    start_sweep,
    validate_tour,
)
from .family import (
    Instance,
    UnitGraph,
    build_unit_graph,
    family_columns,
    family_instance,
    family_size,
    grid_instance,
    rescale,
)
from .metrics import (
    REL_TOL,
    Comparison,
    ConditionReport,
    ConditionViolation,
    DisconnectedGraphError,
    DistanceValue,
    GraphicMetric,
    LpMetric,
    MetricSpec,
    ScaledPoint,
    check_metric_conditions,
    check_triangle_inequality,
    compare,
    graphic_distance,
    lp_distance,
    parse_metric,
)
from .optimum import (
    DP_LIMIT,
    LOWER_BOUND_NOTE,
    BoundValues,
    RatioRow,
    RatioTable,
    exact_optimum,
    is_full_grid,
    perimeter_tour,
    ratio_bounds,
    ratio_table,
)
from .perturb import StrictifyFailure, perturb
from .svg import render_svg
from .tsplib import dumps_tsplib, loads_tsplib

__version__ = "0.1.0"
