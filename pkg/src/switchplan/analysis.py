"""Sensitivity scenarios, static-vs-switching comparison and dominance reports."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .elliptic_solver import SolverOptions
from .model_types import HoldingCostSpec, ParameterError, RegimeParameters, validate_params
from .pipeline import PipelineResult, run_pipeline
from .value_recovery import PolicyResult

DOMINANCE_TOL = 1e-7


@dataclass(frozen=True)
class DominanceReport:
    max_violation: float
    violating_nodes: int
    tolerance: float
    label: str = "z_upper >= z_lower"

    @property
    def passed(self) -> bool:
        return self.max_violation <= self.tolerance


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: str
    params: RegimeParameters
    costs: HoldingCostSpec
    n_points: int = 100
    options: SolverOptions = field(default_factory=SolverOptions)
    scan: tuple[int, int, int] = (200, 50, 50)
    k_strategy: str = "auto"


def _hypothesis_failures(scenario: str, p: RegimeParameters, c: HoldingCostSpec) -> list[str]:
    checks = {
        "s1": [(p.alpha1 == p.alpha2, "alpha1 == alpha2"),
               (c.c1 == c.c2, "c1 == c2"),
               (p.sigma1 > p.sigma2, "sigma1 > sigma2")],
        "s2": [(p.sigma1 == p.sigma2, "sigma1 == sigma2"),
               (c.c1 == c.c2, "c1 == c2"),
               (p.alpha1 < p.alpha2, "alpha1 < alpha2")],
        "s3": [(p.alpha1 == p.alpha2, "alpha1 == alpha2"),
               (p.sigma1 == p.sigma2, "sigma1 == sigma2"),
               (c.c1 > c.c2, "c1 > c2")],
        "s4": [(p.sigma1 > p.sigma2, "sigma1 > sigma2"),
               (p.alpha1 < p.alpha2, "alpha1 < alpha2"),
               (c.c1 > c.c2, "c1 > c2")],
    }
    if scenario not in checks:
        raise ParameterError(f"unknown scenario {scenario!r}; expected one of s1, s2, s3, s4")
    return [msg for ok, msg in checks[scenario] if not ok]


def validate_scenario(spec: ScenarioSpec) -> ScenarioSpec:
    """Raise ParameterError unless the scenario's ordering hypotheses hold."""
    validate_params(spec.params, spec.costs)
    failed = _hypothesis_failures(spec.scenario, spec.params, spec.costs)
    if failed:
        raise ParameterError(
            f"scenario {spec.scenario} hypotheses not satisfied: " + ", ".join(failed)
        )
    return spec


def _preset(sid, a1, a2, al1, al2, s1, s2, M1, M2, R, c1, c2):
    return ScenarioSpec(
        sid,
        RegimeParameters(a1=a1, a2=a2, alpha1=al1, alpha2=al2, sigma1=s1, sigma2=s2,
                         M1=M1, M2=M2, R=R),
        HoldingCostSpec(c1, c2),
    )


SCENARIOS: dict[str, ScenarioSpec] = {
    "s1": _preset("s1", 0.6, 0.5, 0.3, 0.3, 1.0, 0.7, 1.0, 1.0, 20.0, 1.0, 1.0),
    "s2": _preset("s2", 0.6, 0.5, 0.3, 0.7, 1.0, 1.0, 1.0, 1.0, 20.0, 1.0, 1.0),
    "s3": _preset("s3", 0.6, 0.9, 0.3, 0.3, 1.0, 1.0, 5.0, 1.0, 20.0, 5.0, 1.0),
    "s4": _preset("s4", 0.6, 0.9, 0.3, 0.8, 1.0, 0.3, 5.0, 1.0, 10.0, 5.0, 1.0),
}


def pointwise_dominance(z_upper, z_lower, tolerance: float = DOMINANCE_TOL,
                        label: str = "z_upper >= z_lower") -> DominanceReport:
    """Check ``z_upper >= z_lower`` node by node."""
    zu = np.asarray(z_upper, dtype=float)
    zl = np.asarray(z_lower, dtype=float)
    if zu.shape != zl.shape:
        raise ValueError(f"grid mismatch: {zu.shape} vs {zl.shape}")
    gap = zl - zu
    return DominanceReport(
        max_violation=float(np.max(gap)),
        violating_nodes=int(np.count_nonzero(gap > tolerance)),
        tolerance=float(tolerance),
        label=label,
    )


def _solve(spec: ScenarioSpec, params: RegimeParameters | None = None,
           costs: HoldingCostSpec | None = None, warn: bool = True) -> PipelineResult:
    return run_pipeline(
        spec.params if params is None else params,
        spec.costs if costs is None else costs,
        spec.n_points, spec.options, spec.scan, warn=warn, k_strategy=spec.k_strategy,
    )


def run_sensitivity_scenario(spec: ScenarioSpec, *, tolerance: float = DOMINANCE_TOL,
                             check_hypotheses: bool = True) -> tuple[DominanceReport, PipelineResult]:
    """Solve and check ``z1 >= z2`` (scenarios s1-s3)."""
    if check_hypotheses:
        if spec.scenario not in ("s1", "s2", "s3"):
            raise ParameterError("sensitivity scenarios are s1, s2 and s3")
        validate_scenario(spec)
    result = _solve(spec)
    report = pointwise_dominance(result.policy.z1, result.policy.z2, tolerance, "z1 >= z2")
    return report, result


def static_params(params: RegimeParameters, regime: int) -> RegimeParameters:
    """Both regimes cloned from one slice, no switching."""
    a, alpha, sigma, M = params.regime(regime)
    return replace(params, a1=0.0, a2=0.0, alpha1=alpha, alpha2=alpha,
                   sigma1=sigma, sigma2=sigma, M1=M, M2=M)


def single_regime_solve(params: RegimeParameters, costs: HoldingCostSpec, regime: int,
                        n_points: int = 100, options: SolverOptions | None = None,
                        scan: tuple[int, int, int] = (200, 50, 50),
                        *, full: bool = False, k_strategy: str = "auto"):
    """Value function of one regime without switching.

    Returns the regime-1 field of the decoupled solve, or the whole
    :class:`PipelineResult` with ``full=True``.
    """
    c = costs.coefficient(regime)
    sp = static_params(params, regime)
    sc = replace(costs, c1=c, c2=c)
    options = SolverOptions() if options is None else options
    try:
        result = run_pipeline(sp, sc, n_points, options, scan, warn=False, k_strategy=k_strategy)
    except FloatingPointError:
        if options.mode != "sub-solution":
            raise
        # exp(K R^2) below the double range: start from u = 1 instead
        warnings.warn(
            f"regime {regime} sub-solution underflows; starting from the super-solution",
            RuntimeWarning,
            stacklevel=2,
        )
        result = run_pipeline(sp, sc, n_points, replace(options, mode="super-solution"), scan,
                              warn=False, k_strategy=k_strategy)
    return result if full else result.policy.z1


@dataclass(frozen=True)
class ComparisonReport:
    static_over_z1: DominanceReport
    z1_over_z2: DominanceReport
    z2_over_static: DominanceReport
    z_static1: np.ndarray = field(repr=False)
    z_static2: np.ndarray = field(repr=False)
    coupled: PolicyResult = field(repr=False)
    converged: bool = True

    @property
    def links(self) -> tuple[DominanceReport, DominanceReport, DominanceReport]:
        return (self.static_over_z1, self.z1_over_z2, self.z2_over_static)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.links)


def regime_comparison(spec: ScenarioSpec, *, tolerance: float = DOMINANCE_TOL,
                      check_hypotheses: bool = True) -> ComparisonReport:
    """Check ``zbar1 >= z1 >= z2 >= zunder2`` with static baselines at a = 0."""
    if check_hypotheses:
        validate_scenario(replace(spec, scenario="s4"))
    coupled = _solve(spec)
    hi = single_regime_solve(spec.params, spec.costs, 1, spec.n_points, spec.options,
                             spec.scan, full=True, k_strategy=spec.k_strategy)
    lo = single_regime_solve(spec.params, spec.costs, 2, spec.n_points, spec.options,
                             spec.scan, full=True, k_strategy=spec.k_strategy)
    pol = coupled.policy
    return ComparisonReport(
        static_over_z1=pointwise_dominance(hi.policy.z1, pol.z1, tolerance, "zbar1 >= z1"),
        z1_over_z2=pointwise_dominance(pol.z1, pol.z2, tolerance, "z1 >= z2"),
        z2_over_static=pointwise_dominance(pol.z2, lo.policy.z1, tolerance, "z2 >= zunder2"),
        z_static1=hi.policy.z1,
        z_static2=lo.policy.z1,
        coupled=pol,
        converged=coupled.report.converged and hi.report.converged and lo.report.converged,
    )

