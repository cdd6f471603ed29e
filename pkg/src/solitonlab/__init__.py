"""Translating-soliton profiles in flat Euclidean and Lorentzian products.

Reduced-ODE phase portraits, solution classification, profile and surface
construction, and finite-difference verification of the graph equation.
"""

from .core import (
    BARRIER_TOL,
    FlowParams,
    PhaseState,
    Region,
    Termination,
    TerminationKind,
    Trajectory,
    boost,
    causal_sign,
    critical_concavity,
    critical_line,
    region_of,
    reparametrize_unit_gradient,
    rhs,
    rhs_wing,
    rotational,
)
from .engine import (
    EventKind,
    EventRecord,
    IntegratorConfig,
    bowl_series_coeffs,
    bowl_start,
    comparison_blowup_bound,
    detect_blowup,
    eval_series,
    integrate,
    integrate_series,
    merge_bidirectional,
)
from .classify import (
    LimitsReport,
    SeparatrixResult,
    SolutionClass,
    SolutionClassTag,
    classify,
    compute_bowl,
    compute_separatrix,
    integrate_bidirectional,
    limits_report,
)
from .verify import (
    ConvergenceReport,
    DegeneracyError,
    GridField,
    ResidualStats,
    convergence_order,
    residual_fund_eq,
    residual_keyODE,
    sample_radial_field,
    smoothness_scan,
)
from .geometry import (
    HybridField,
    ProfileCurve,
    WingResult,
    bowl_curve,
    build_graph,
    build_hybrid,
    build_spindle,
    build_wing,
    center_profile_eval,
    quadrant_of,
    timelike_family_from_strip,
)

__version__ = "0.1.0"

__all__ = [
    "BARRIER_TOL",
    "FlowParams",
    "PhaseState",
    "Region",
    "Termination",
    "TerminationKind",
    "Trajectory",
    "boost",
    "causal_sign",
    "critical_concavity",
    "critical_line",
    "region_of",
    "reparametrize_unit_gradient",
    "rhs",
    "rhs_wing",
    "rotational",
    "EventKind",
    "EventRecord",
    "IntegratorConfig",
    "bowl_series_coeffs",
    "bowl_start",
    "comparison_blowup_bound",
    "detect_blowup",
    "eval_series",
    "integrate",
    "integrate_series",
    "merge_bidirectional",
    "LimitsReport",
    "SeparatrixResult",
    "SolutionClass",
    "SolutionClassTag",
    "classify",
    "compute_bowl",
    "compute_separatrix",
    "integrate_bidirectional",
    "limits_report",
    "ConvergenceReport",
    "DegeneracyError",
    "GridField",
    "ResidualStats",
    "convergence_order",
    "residual_fund_eq",
    "residual_keyODE",
    "sample_radial_field",
    "smoothness_scan",
    "HybridField",
    "ProfileCurve",
    "WingResult",
    "bowl_curve",
    "build_graph",
    "build_hybrid",
    "build_spindle",
    "build_wing",
    "center_profile_eval",
    "quadrant_of",
    "timelike_family_from_strip",
]
