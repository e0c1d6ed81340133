from annulus_conformal.core import bilinear, composite, discrepancy, errors, outer_map
from annulus_conformal.core.bilinear import (
    BilinearParams,
    CirclePairGeometry,
    bilinear_derivative,
    bilinear_inverse,
    eval_bilinear,
    solve_bilinear_params,
)
from annulus_conformal.core.composite import (
    AnnulusGrid,
    CompositeMap,
    HoleImage,
    HoleTarget,
    annulus_grid,
    build_composite,
    composite_from_geometry,
    eval_composite,
    hole_center,
    hole_radius,
    inner_hole_image,
    solve_e,
    solve_r1,
)
from annulus_conformal.core.discrepancy import (
    BenchmarkCase,
    DiscrepancyReport,
    Table1Row,
    asymptotic_amplitude,
    benchmark_cases,
    closed_form_for,
    discrepancy_at,
    discrepancy_closed_form,
    leading_amplitude,
    max_discrepancy,
    reproduce_table1,
    table1_outer_map,
    touching_discrepancy,
    touching_limit,
    touching_max_discrepancy,
)
from annulus_conformal.core.errors import (
    BadShapeError,
    ConformalMapError,
    DegenerateDerivativeError,
    DomainViolationError,
    InconsistentSolutionError,
    NoRootError,
    NonConvergenceError,
    NonRealTargetError,
    OverlappingCirclesError,
    PoleInputError,
    WrongFamilyError,
)
from annulus_conformal.core.outer_map import (
    CurvatureExtremes,
    HypotrochoidSpec,
    LaurentMap,
    PolygonSpec,
    boundary_point,
    curvature_extremes,
    eval_laurent,
    generalized_binomial,
    hypotrochoid_bounds,
    hypotrochoid_map,
    is_concave_at_max,
    laurent_derivative,
    normalize_map,
    outer_radius,
    sample_boundary,
    schwarz_christoffel_map,
    straight_edge_m,
)
