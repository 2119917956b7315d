"""Evolutionarily stable strategies against pure mutations for symmetric games.

The package offers three routes to a solution: a pure-strategy preprocessing
pass, a mixed-integer piecewise-linearized feasibility model solved by a
built-in branch-and-bound solver, and a support-enumeration oracle that also
serves as ground truth in tests and experiments.
"""

from .analysis import (
    Condition,
    ConditionOutcome,
    InvasionResult,
    Tolerances,
    approximation_error,
    check_conditions,
    find_all_pure_esspm,
    find_pure_esspm,
    invasion_test,
    nash_epsilon,
)
from .enumeration import EsspmCertificate, enumerate_esspm, solve_support
from .game import (
    GameMatrix,
    GameParseError,
    MixedStrategy,
    Support,
    normalize,
    read_game,
    utility,
    write_game,
)
from .generators import (
    CancerParams,
    cancer_game,
    chicken,
    counterexample_game,
    mutation_population,
    random_cancer_params,
    rock_paper_scissors,
    uniform_random,
)
from .model import (
    BuildParams,
    LinearRow,
    ModelIR,
    SquareTerm,
    Variable,
    build_model,
    export_lp,
    linearization_error_bound,
    linearize_quadratic_form,
    verify_assignment,
)
from .pipeline import (
    BatchConfig,
    BatchStats,
    EsspmOutcome,
    Infeasible,
    LimitReached,
    MixedEsspm,
    PureEsspm,
    run_batch,
    solve_one,
    solve_record,
)
from .simplex import SolverError, lp_relax
from .solver import (
    SolveLimits,
    SolveResult,
    SolveStats,
    SolveStatus,
    extract_strategy,
    solve,
)
from .cli import cli_main

__version__ = "0.1.0"

__all__ = [
    "Condition",
    "ConditionOutcome",
    "InvasionResult",
    "Tolerances",
    "approximation_error",
    "check_conditions",
    "find_all_pure_esspm",
    "find_pure_esspm",
    "invasion_test",
    "nash_epsilon",
    "EsspmCertificate",
    "enumerate_esspm",
    "solve_support",
    "GameMatrix",
    "GameParseError",
    "MixedStrategy",
    "Support",
    "normalize",
    "read_game",
    "utility",
    "write_game",
    "CancerParams",
    "cancer_game",
    "chicken",
    "counterexample_game",
    "mutation_population",
    "random_cancer_params",
    "rock_paper_scissors",
    "uniform_random",
    "BuildParams",
    "LinearRow",
    "ModelIR",
    "SquareTerm",
    "Variable",
    "build_model",
    "export_lp",
    "linearization_error_bound",
    "linearize_quadratic_form",
    "verify_assignment",
    "BatchConfig",
    "BatchStats",
    "EsspmOutcome",
    "Infeasible",
    "LimitReached",
    "MixedEsspm",
    "PureEsspm",
    "run_batch",
    "solve_one",
    "solve_record",
    "SolverError",
    "lp_relax",
    "SolveLimits",
    "SolveResult",
    "SolveStats",
    "SolveStatus",
    "extract_strategy",
    "solve",
    "cli_main",
    "__version__",
]
