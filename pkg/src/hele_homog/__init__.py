"""Homogenized free-boundary velocities in space-time periodic media.

A numerics toolkit around the oscillatory one-phase free-boundary law
V = g(x/eps, t/eps) |Du+|: expression-defined media, the 1D front reduction
with obstacle dynamics and flatness functionals, planar/matching-wave
geometry, radial comparison barriers, nonlinear time rescalings, and a 2D
strip simulator with Hausdorff convergence diagnostics.
"""

from .errors import ExpressionError, NumericalError, ValidationError
from .medium import (
    BUILTIN_MEDIA,
    Medium,
    MediumBounds,
    PeriodicityReport,
    builtin_medium,
    check_periodicity,
    estimate_bounds,
    eval_scaled,
    format_expr,
    parse_medium,
)
from .geometry import (
    AdmissibilityReport,
    ConeGeometry,
    GridCoverReport,
    MatchingWave,
    Ordering,
    PlanarClass,
    PlanarWave,
    cone_geometry,
    geometry_report_dict,
    grid_cover_check,
    in_cone,
    matching_wave,
    planar_admissible_range,
    planar_eval,
    translation_order,
    verify_admissibility,
    xi_samples,
)
from .barriers import (
    BarrierReport,
    PerturbedContractingField,
    RadialContracting,
    RadialExpanding,
    RadialPerturbation,
    check_expanding_fbc,
    check_superbarrier,
    closing_criterion,
    contracting_barrier,
    contracting_radius,
    expanding_barrier,
    expansion_radius,
    nondegeneracy_bound,
    radial_perturbation,
    rational_bound_check,
    thin_cylinder_margin,
    thin_cylinder_phi,
)
from .timescale import (
    SubScaling,
    SuperScaling,
    ThetaShift,
    f_sub,
    f_sub_deriv,
    f_super,
    f_super_deriv,
    lambert_w0,
    theta_shift,
    theta_shift_deriv,
)
from .homog1d import (
    CandidateReport,
    FlatnessCheckReport,
    FlatnessTrace,
    FrontProblem,
    FrontTrace,
    ObstacleFront,
    Side,
    VelocityCurve,
    VelocityEstimate,
    effective_velocity,
    flatness_lipschitz_check,
    harmonic_mean_oracle,
    homogenized_candidates,
    integrate_front,
    obstacle_front,
    velocity_curve,
)
from .hs2d import (
    FrontGraph,
    HausdorffReport,
    PairDistance,
    SimConfig,
    SimHistory,
    StripDomain,
    convergence_study,
    flatness2d,
    hausdorff,
    simulate,
    step,
)

__version__ = "1.0.0"

__all__ = [
    "BUILTIN_MEDIA",
    "AdmissibilityReport",
    "BarrierReport",
    "CandidateReport",
    "ConeGeometry",
    "ExpressionError",
    "FlatnessCheckReport",
    "FlatnessTrace",
    "FrontGraph",
    "FrontProblem",
    "FrontTrace",
    "GridCoverReport",
    "HausdorffReport",
    "MatchingWave",
    "Medium",
    "MediumBounds",
    "NumericalError",
    "ObstacleFront",
    "Ordering",
    "PairDistance",
    "PeriodicityReport",
    "PerturbedContractingField",
    "PlanarClass",
    "PlanarWave",
    "RadialContracting",
    "RadialExpanding",
    "RadialPerturbation",
    "Side",
    "SimConfig",
    "SimHistory",
    "StripDomain",
    "SubScaling",
    "SuperScaling",
    "ThetaShift",
    "ValidationError",
    "VelocityCurve",
    "VelocityEstimate",
    "builtin_medium",
    "check_expanding_fbc",
    "check_periodicity",
    "check_superbarrier",
    "closing_criterion",
    "cone_geometry",
    "contracting_barrier",
    "contracting_radius",
    "convergence_study",
    "effective_velocity",
    "estimate_bounds",
    "eval_scaled",
    "expanding_barrier",
    "expansion_radius",
    "f_sub",
    "f_sub_deriv",
    "f_super",
    "f_super_deriv",
    "flatness2d",
    "flatness_lipschitz_check",
    "format_expr",
    "geometry_report_dict",
    "grid_cover_check",
    "harmonic_mean_oracle",
    "hausdorff",
    "homogenized_candidates",
    "in_cone",
    "integrate_front",
    "lambert_w0",
    "matching_wave",
    "nondegeneracy_bound",
    "obstacle_front",
    "parse_medium",
    "planar_admissible_range",
    "planar_eval",
    "radial_perturbation",
    "rational_bound_check",
    "simulate",
    "step",
    "theta_shift",
    "theta_shift_deriv",
    "thin_cylinder_margin",
    "thin_cylinder_phi",
    "translation_order",
    "velocity_curve",
    "verify_admissibility",
    "xi_samples",
]
