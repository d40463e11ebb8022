"""Ricci curvature, prescribed Ricci curvature and Ricci iteration for
homogeneous metrics on spheres and complex projective spaces."""

from .ancient import AncientStatus, AncientTrace, ancient_iterate, berger_form, classify_ancient_su2
from .einstein import EinsteinEntry, einstein_list, is_einstein, sp1_uniqueness_scan
from .errors import (
    HopfRicciError,
    NoConvergence,
    OutsideDomain,
    PathFailure,
    RootSelectionAmbiguous,
    ScalingFailure,
    SingularDenominator,
)
from .geometry import (
    DiagonalForm3,
    FamilyKind,
    FibrationFamily,
    FourParamForm,
    FourParamMetric,
    Su2Metric,
    TwoSummandForm,
    TwoSummandMetric,
    canonicalize_gauge,
    positivity_check,
    ricci_four_param,
    ricci_su2,
    ricci_two_summand,
)
from .iteration import (
    FMapConfig,
    IterationTrace,
    TraceStatus,
    f_inverse,
    f_map,
    iterate_four_param,
    iterate_four_param_near_round,
    iterate_su2,
    iterate_two_summand,
)
from .prescribed import (
    c_function,
    solvability_predicates,
    solve_four_param_homotopy,
    solve_su2,
    solve_two_summand,
    spu1_closed_form,
)
