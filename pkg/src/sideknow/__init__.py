"""Side-knowledge toolkit: constraint compilation from unlabeled examples,
constrained ridge regression, and complexity bounds with Monte Carlo
cross-validation."""

from .config import DEFAULT_TOLERANCES, Tolerances
from .core import (
    BoundReport,
    ConstraintSet,
    EllipsoidConstraint,
    HalfSpace,
    L1PredictionBlock,
    LabeledDataset,
    LinearModel,
    SOConstraint,
    UnlabeledSet,
    constraint_set_from_dict,
    constraint_set_to_dict,
    load_constraint_set,
    load_dataset,
    load_unlabeled,
    save_constraint_set,
    seeded_rng,
    validate,
)
from .constraints import (
    GraphSpec,
    PairSpec,
    compile_chance_soc,
    compile_graph_laplacian,
    compile_linf_box,
    compile_must_link,
    compile_poset,
    compile_quadratic_form,
    compile_quadratic_pairwise,
    compile_robust_soc,
    compile_sparsity_l1,
    inverse_normal_cdf,
)
from .geometry import (
    kahan_combine,
    project_ball,
    project_ellipsoid,
    project_halfspace,
    project_soc,
    sample_intersection,
    simplex_trace_min,
    trace_min_gamma,
    volume_min_gamma,
)
from .bounds import (
    EUCLIDEAN,
    LowerBoundConstants,
    NormPair,
    cap_fraction,
    circumscribing_matrix,
    covering_ellipsoid_product,
    covering_linear_quadratic,
    covering_polygonal,
    covering_single_halfspace,
    dudley_rademacher_from_covering,
    enumerate_cross_polytope,
    generalization_bound,
    lattice_count_cross_polytope,
    rademacher_conic,
    rademacher_dual_halfspace,
    rademacher_ellipsoid_lower,
    rademacher_ellipsoid_upper,
    rademacher_quadratic_dual,
)
from .rademacher import estimate_empirical_rademacher, sup_linear
from .erm import cross_validate_lambda, fit_constrained_ridge, predict_rmse
from .experiment import (
    ExperimentConfig,
    ExperimentResult,
    build_knowledge_constraints,
    desk_config,
    generate_synthetic,
    paper_config,
    run_experiment,
)
from .solver import ConsensusProblem, InfeasibleSetError, SolverError, SolverOptions

__version__ = "0.1.0"
