"""Dual Orlicz curvature measures of polytopes and the dual Orlicz-Minkowski problem."""

__version__ = "0.1.0"

from .sphere_quadrature import (
    QuadratureError,
    SphericalGrid,
    build_grid,
    default_grid,
    integrate,
    sphere_area,
)
from .orlicz_pairs import (
    A_DECREASING,
    B_INCREASING,
    OrliczPair,
    PairError,
    RadialAdditionError,
    RadialAdditionSpec,
    ValidationReport,
    addition_residual,
    load_table_pair,
    make_power_pair,
    parse_function_spec,
    parse_pair_spec,
    radial_addition,
    table_pair,
    validate_pair,
)
from .body_kernel import (
    HalfspacePolytope,
    InvalidBodyError,
    RadialSampleBody,
    convex_hull_of_radial,
    dilate,
    facet_areas,
    hypercube,
    load_json,
    make_polytope,
    polar,
    prune,
    radial_distance,
    radial_function,
    radial_gauss_assignment,
    regular_polygon,
    save_json,
    support_function,
    to_csv_2d,
    to_obj,
    vertices,
    volume,
    wulff_shape,
)
from .measure_engine import (
    CurvatureMeasure,
    DiscreteSphericalMeasure,
    HemisphereCheck,
    MeasureError,
    cone_volume_measure,
    dual_orlicz_curvature_measure,
    dual_orlicz_mixed_volume,
    dual_orlicz_quermassintegral,
    hemisphere_certificate,
    hemisphere_concentration_check,
    integrate_against_curvature,
    load_measure,
    save_measure,
    surface_area_measure,
)
from .minkowski_solver import (
    CONVERGED,
    DEGENERATE,
    INVALID_PAIR,
    MAX_ITERS,
    SolveReport,
    SolverConfig,
    SolverError,
    constraint_directional_derivative,
    objective_phi,
    rescale_to_constraint,
    solve_dual_orlicz_minkowski,
    stationarity_residual,
)
