"""Exponents -> shifts -> relaxation -> value functions, in one call."""

from __future__ import annotations

from dataclasses import dataclass

from .coupling import LambdaPair, compute_lambdas
from .elliptic_solver import FieldPair, SolveReport, SolverOptions, solve_coupled
from .k_solver import KParameters, resolve_exponents
from .model_types import HoldingCostSpec, RegimeParameters, SolverGrid, build_grid
from .value_recovery import BoundReport, PolicyResult, assemble_policy, verify_bounds


@dataclass(frozen=True)
class PipelineResult:
    policy: PolicyResult
    fields: FieldPair
    report: SolveReport
    kp: KParameters
    lambdas: LambdaPair
    bounds: BoundReport


def run_pipeline(
    params: RegimeParameters,
    costs: HoldingCostSpec,
    n_points: int = 100,
    options: SolverOptions | None = None,
    scan: tuple[int, int, int] = (200, 50, 50),
    *,
    grid: SolverGrid | None = None,
    kp: KParameters | None = None,
    bound_tol: float = 1e-6,
    warn: bool = True,
    k_strategy: str = "auto",
) -> PipelineResult:
    """Solve one parameter set end to end.

    ``params`` are used as given; validate them first with
    :func:`~switchplan.model_types.validate_params` (the single-regime
    baselines deliberately use zero switching rates). ``k_strategy`` is
    passed to :func:`~switchplan.k_solver.resolve_exponents` unless ``kp``
    is given.
    """
    grid = build_grid(params.R, n_points) if grid is None else grid
    kp = resolve_exponents(params, costs, k_strategy) if kp is None else kp
    lambdas = compute_lambdas(params, costs, kp, scan)
    fields, report = solve_coupled(params, costs, grid, kp, lambdas, options)
    policy = assemble_policy(fields.u1, fields.u2, kp.K1, kp.K2,
                             params.sigma1, params.sigma2, grid)
    bounds = verify_bounds(policy, bound_tol, warn=warn)
    return PipelineResult(policy, fields, report, kp, lambdas, bounds)
