"""Steklov eigenfunction expansions for Laplace boundary value problems on rectangles."""

from .geometry import GeometryError, Rectangle, Side, SIDES
from .spectrum import (
    FamilyTag,
    GLOBAL_SORTED,
    PER_FAMILY,
    RootFindError,
    Spectrum,
    SpectrumError,
    SteklovMode,
    boundary_norm_constant,
    build_spectrum,
    build_spectrum_by_count,
    char_residual,
    eigenvalue_of,
    find_roots,
    load_spectrum,
    make_mode,
    mode_normal_derivative,
    mode_value,
    save_spectrum,
    scale_mode,
    spectrum_from_json,
    spectrum_to_json,
)
from .boundary import (
    BoundaryFunction,
    CornerMismatchError,
    QuadratureError,
    SteklovCoefficients,
    boundary_partial_sum,
    corner_bilinear_reduction,
    eval_boundary,
    integrate_boundary,
    parse_expression,
    steklov_coefficients,
)
from .catalog import (
    BUILTIN_NAMES,
    ExactSolution,
    boundary_data_from_spec,
    builtin_boundary,
    exact_solution_for,
)
from .solvers import (
    BoundaryGradientWarning,
    IncompatibleDataError,
    ProblemKind,
    SteklovApproximation,
    grid_points,
    neumann_mean_tolerance,
    solve,
    solve_dirichlet,
    solve_neumann,
    solve_robin,
)
from .analysis import (
    CheckResult,
    ErrorReport,
    NormKind,
    SuiteReport,
    TolProfile,
    boundary_error,
    boundary_l2,
    boundary_sup,
    coefficient_tail,
    convergence_study,
    dnorm_sq,
    interior_l2,
    interior_sup,
    invariant_suite,
    monotone_boundary_trend,
    neumann_bound,
    pointwise_table,
    robin_bound,
    robin_dnorm_tail_sq,
    spectral_tail,
)

__all__ = [name for name in dir() if not name.startswith("_")]

__version__ = "0.1.0"
