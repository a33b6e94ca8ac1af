"""Frank-Wolfe solvers driven by dual maximization oracles for
graph-structured convex optimization, with PGD baselines, a brute-force
verification oracle, synthetic instance generation, and a benchmark CLI.
"""

from .baselines import PgdConfig, best_pgd, random_pgd
from .constraints import (
    DEFAULT_ENUMERATION_CAP,
    ConstraintModel,
    SupportSet,
    normalize_support,
    project_to_support_ball,
    random_feasible_support,
)
from .dmo import (
    DmoParams,
    DmoResult,
    dmo_ratio,
    exact_lmo_support,
    guarantee_floor,
    support_to_direction,
    top_g_plus_optimal_visit,
    top_g_plus_visit,
)
from .errors import (
    ConfigError,
    DegenerateDirectionError,
    EdgeListParseError,
    EnumerationCapError,
    GenerationError,
    GscoError,
    NumericError,
    RangeError,
)
from .graph import Graph, load_edge_list, save_edge_list, small_world_graph
from .objective import (
    InstanceSpec,
    LeastSquaresObjective,
    generate_instance,
    lipschitz_constant,
    load_instance,
    save_instance,
)
from .solver import (
    IterationRecord,
    IterationTrace,
    SolverConfig,
    backtracking_eta,
    compute_z,
    demyanov_rubinov_eta,
    solve,
    step,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConstraintModel",
    "DEFAULT_ENUMERATION_CAP",
    "DegenerateDirectionError",
    "DmoParams",
    "DmoResult",
    "EdgeListParseError",
    "EnumerationCapError",
    "GenerationError",
    "Graph",
    "GscoError",
    "InstanceSpec",
    "IterationRecord",
    "IterationTrace",
    "LeastSquaresObjective",
    "NumericError",
    "PgdConfig",
    "RangeError",
    "SolverConfig",
    "SupportSet",
    "backtracking_eta",
    "best_pgd",
    "compute_z",
    "demyanov_rubinov_eta",
    "dmo_ratio",
    "exact_lmo_support",
    "generate_instance",
    "guarantee_floor",
    "lipschitz_constant",
    "load_edge_list",
    "load_instance",
    "normalize_support",
    "project_to_support_ball",
    "random_feasible_support",
    "random_pgd",
    "save_edge_list",
    "save_instance",
    "small_world_graph",
    "solve",
    "step",
    "support_to_direction",
    "top_g_plus_optimal_visit",
    "top_g_plus_visit",
]
