"""Value functions, feedback rates and quadratic upper bounds."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .model_types import SolverGrid


@dataclass(frozen=True)
class PolicyResult:
    z1: np.ndarray
    z2: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    grid: SolverGrid = field(repr=False)
    u1: np.ndarray | None = field(default=None, repr=False)
    u2: np.ndarray | None = field(default=None, repr=False)


@dataclass(frozen=True)
class BoundReport:
    max_violation1: float
    max_violation2: float
    bound_tol: float

    @property
    def passed1(self) -> bool:
        return self.max_violation1 <= self.bound_tol

    @property
    def passed2(self) -> bool:
        return self.max_violation2 <= self.bound_tol

    @property
    def passed(self) -> bool:
        return self.passed1 and self.passed2


def recover_value(u, sigma: float) -> np.ndarray:
    """``z = -2 sigma^2 ln u``; exactly 0 where ``u == 1``."""
    u = np.asarray(u, dtype=float)
    if np.any(u <= 0):
        raise ValueError("u must be > 0 everywhere")
    # + 0.0 turns -0.0 into 0.0
    return -2.0 * sigma**2 * np.log(u) + 0.0


def optimal_rate(z, grid: SolverGrid) -> np.ndarray:
    """``p* = -dz/dx / 2``: central differences inside, one-sided at the ends."""
    z = np.asarray(z, dtype=float)
    if z.shape != (grid.n_points,):
        raise ValueError("field length must match the grid")
    return -0.5 * np.gradient(z, grid.dx, edge_order=1)


def upper_bound(K: float, sigma: float, grid: SolverGrid) -> np.ndarray:
    if not K < 0:
        raise ValueError("K must be < 0")
    B = -2.0 * sigma**2 * K * (grid.R**2 - grid.x**2)
    B[[0, -1]] = 0.0
    return B


def verify_bounds(policy: PolicyResult, bound_tol: float = 1e-6, *, warn: bool = True) -> BoundReport:
    """Largest ``z_j - B_j`` per regime; a violation warns but never raises."""
    report = BoundReport(
        float(np.max(policy.z1 - policy.B1)),
        float(np.max(policy.z2 - policy.B2)),
        float(bound_tol),
    )
    if warn and not report.passed:
        warnings.warn(
            f"value function exceeds its quadratic bound by "
            f"{max(report.max_violation1, report.max_violation2):.3g}; "
            "the input data should be revisited",
            RuntimeWarning,
            stacklevel=2,
        )
    return report


def assemble_policy(u1, u2, K1: float, K2: float, sigma1: float, sigma2: float,
                    grid: SolverGrid) -> PolicyResult:
    z1 = recover_value(u1, sigma1)
    z2 = recover_value(u2, sigma2)
    return PolicyResult(
        z1=z1,
        z2=z2,
        p1=optimal_rate(z1, grid),
        p2=optimal_rate(z2, grid),
        B1=upper_bound(K1, sigma1, grid),
        B2=upper_bound(K2, sigma2, grid),
        grid=grid,
        u1=np.asarray(u1, dtype=float),
        u2=np.asarray(u2, dtype=float),
    )
