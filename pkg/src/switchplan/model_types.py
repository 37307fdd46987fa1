"""Problem parameters, holding costs and the spatial grid.

Everything here is immutable; downstream modules assume inputs have been
passed through :func:`validate_params`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


class ParameterError(ValueError):
    """Raised when a parameter violates a model constraint."""


@dataclass(frozen=True)
class RegimeParameters:
    """Regime-dependent scalars of the two-regime production model.

    Attributes:
        a1, a2: switching rates out of regime 1 and regime 2.
        alpha1, alpha2: discount rates.
        sigma1, sigma2: inventory volatilities.
        M1, M2: quadratic caps on the holding costs, ``f_i(x) <= M_i x**2``.
        R: radius of the admissible inventory interval ``[-R, R]``.
    """

    a1: float
    a2: float
    alpha1: float
    alpha2: float
    sigma1: float
    sigma2: float
    M1: float
    M2: float
    R: float

    def regime(self, i: int) -> tuple[float, float, float, float]:
        """Return ``(a, alpha, sigma, M)`` for regime ``i``."""
        if i == 1:
            return self.a1, self.alpha1, self.sigma1, self.M1
        if i == 2:
            return self.a2, self.alpha2, self.sigma2, self.M2
        raise ValueError(f"regime must be 1 or 2, got {i!r}")

    def sigma(self, i: int) -> float:
        return self.regime(i)[2]


@dataclass(frozen=True)
class HoldingCostSpec:
    """Holding costs ``f_i(x) = c_i * x**2``.

    Only the scaled quadratic family is supported; ``kind`` is kept so other
    convex families can be added behind :func:`eval_holding_cost`.
    """

    c1: float
    c2: float
    kind: str = "quadratic-scaled"

    def coefficient(self, i: int) -> float:
        if i == 1:
            return self.c1
        if i == 2:
            return self.c2
        raise ValueError(f"regime must be 1 or 2, got {i!r}")


@dataclass(frozen=True)
class SolverGrid:
    """Uniform symmetric grid on ``[-R, R]``."""

    R: float
    n_points: int
    x: np.ndarray = field(repr=False, compare=False)

    @property
    def dx(self) -> float:
        return 2.0 * self.R / (self.n_points - 1)

    def __len__(self) -> int:
        return self.n_points


_POSITIVE_FIELDS = ("a1", "a2", "alpha1", "alpha2", "sigma1", "sigma2", "M1", "M2", "R")


def validate_params(raw: RegimeParameters, costs: HoldingCostSpec) -> RegimeParameters:
    """Check every model constraint, fail-fast on the first violation.

    Returns ``raw`` unchanged when valid. The error message names the
    violated constraint, e.g. ``"sigma2 must be > 0"`` or ``"c1 exceeds M1"``.
    """
    for name in _POSITIVE_FIELDS:
        value = getattr(raw, name)
        if not np.isfinite(value) or not value > 0:
            raise ParameterError(f"{name} must be > 0")
    if costs.kind != "quadratic-scaled":
        raise ParameterError(f"unsupported holding cost kind {costs.kind!r}")
    for i in (1, 2):
        c = costs.coefficient(i)
        if not np.isfinite(c) or not c > 0:
            raise ParameterError(f"c{i} must be > 0")
        if c > raw.regime(i)[3]:
            raise ParameterError(f"c{i} exceeds M{i}")
    return raw


def build_grid(R: float, n_points: int) -> SolverGrid:
    """Uniform grid of ``n_points`` nodes from ``-R`` to ``R``.

    Nodes are filled symmetrically so that ``x[i] == -x[n-1-i]`` holds
    exactly, and the endpoints are exactly ``-R`` and ``R``.
    """
    if int(n_points) != n_points or n_points < 3:
        raise ParameterError("n_points must be an integer >= 3")
    if not R > 0:
        raise ParameterError("R must be > 0")
    n_points = int(n_points)
    dx = 2.0 * R / (n_points - 1)
    half = np.arange(n_points // 2) * dx - R
    if n_points % 2:
        x = np.concatenate([half, [0.0], -half[::-1]])
    else:
        x = np.concatenate([half, -half[::-1]])
    x.setflags(write=False)
    return SolverGrid(R=float(R), n_points=n_points, x=x)


def eval_holding_cost(costs: HoldingCostSpec, regime: int, x):
    """Holding cost ``c_regime * x**2``; accepts scalars or arrays."""
    return costs.coefficient(regime) * np.square(x)
