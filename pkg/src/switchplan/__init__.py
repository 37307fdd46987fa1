"""Two-regime stochastic production planning: value functions, feedback
rates and simulation."""

from ._backend import BACKEND
from .analysis import (
    SCENARIOS,
    ComparisonReport,
    DominanceReport,
    ScenarioSpec,
    pointwise_dominance,
    regime_comparison,
    run_sensitivity_scenario,
    single_regime_solve,
    validate_scenario,
)
from .config import ConfigError, RunConfig, parse_config, serialize_config
from .coupling import CouplingCoefficients, LambdaPair, compute_lambdas, eval_g, eval_g_partial
from .elliptic_solver import (
    FieldPair,
    SolveReport,
    SolverOptions,
    discrete_residual,
    initial_iterate,
    solve_coupled,
    subsolution_profile,
    sweep,
)
from .k_solver import KParameters, KSolveError, solve_k, verify_subsolution_inequalities
from .model_types import (
    HoldingCostSpec,
    ParameterError,
    RegimeParameters,
    SolverGrid,
    build_grid,
    eval_holding_cost,
    validate_params,
)
from .pipeline import PipelineResult, run_pipeline
from .regime_sim import (
    SimConfig,
    Trajectory,
    ensemble_stats,
    interpolate_rate,
    simulate_path,
    simulate_regimes,
    step_regime,
)
from .value_recovery import (
    BoundReport,
    PolicyResult,
    assemble_policy,
    optimal_rate,
    recover_value,
    upper_bound,
    verify_bounds,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
