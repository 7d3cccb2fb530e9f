"""Pareto set/front sampling for the multi-objective elastic net, with a
Bezier-simplex surrogate for interactive hyper-parameter exploration."""

__version__ = "0.1.0"

from .simplex import (  # noqa: F401
    FaceIndex,
    MultiIndex,
    WeightVector,
    bernstein_value,
    embed_face,
    enumerate_multi_indices,
    face_coordinates,
    grid_points,
    multinomial_coefficient,
)
from .elasticnet import (  # noqa: F401
    ConvergenceError,
    ElasticNetProblem,
    Hyperparams,
    ParetoSample,
    SampleMeta,
    SolverConfig,
    hyperparams_to_weight,
    objectives,
    perturbed_objectives,
    sample_pareto,
    solve_scalarized,
    weight_to_hyperparams,
)
from .bezier import (  # noqa: F401
    BezierSimplexModel,
    FitReport,
    FitResult,
    degree_sweep,
    evaluate,
    fit_all_at_once,
    mse,
    restrict_to_face,
    train_test_split,
)
from .diagnostics import (  # noqa: F401
    check_hoelder_bound,
    check_weak_dominance,
    remark_solution_path,
    subgradient_certificate,
)
