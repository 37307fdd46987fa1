"""Coupling nonlinearities of the log-transformed system and the shifts
``Lambda_i`` that make the relaxation monotone.

With ``t`` standing for ``u1`` and ``s`` for ``u2``::

    g1(x, t, s) = f1(x)/s1^4 t + 2(a1+al1)/s1^2 t ln t - 2 a1 s2^2/s1^4 t ln s
    g2(x, t, s) = f2(x)/s2^4 s + 2(a2+al2)/s2^2 s ln s - 2 a2 s1^2/s2^4 s ln t
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .k_solver import KParameters
from .model_types import HoldingCostSpec, RegimeParameters, eval_holding_cost

LAMBDA_FLOOR = -1e-8


@dataclass(frozen=True)
class LambdaPair:
    lambda1: float
    lambda2: float
    scan_resolution: tuple[int, int, int]
    max_partial1: float
    max_partial2: float


@dataclass(frozen=True)
class CouplingCoefficients:
    """Scalar coefficients shared by ``g``, its partials and the kernels.

    ``g_i = u_i * (F_i(x) + own_i * ln u_i - cross_i * ln u_other)`` with
    ``F_i = f_i / sigma_i**4``.
    """

    own1: float
    cross1: float
    scale1: float
    own2: float
    cross2: float
    scale2: float

    @classmethod
    def from_params(cls, p: RegimeParameters) -> "CouplingCoefficients":
        s1sq, s2sq = p.sigma1**2, p.sigma2**2
        return cls(
            own1=2.0 * (p.a1 + p.alpha1) / s1sq,
            cross1=2.0 * p.a1 * s2sq / s1sq**2,
            scale1=1.0 / s1sq**2,
            own2=2.0 * (p.a2 + p.alpha2) / s2sq,
            cross2=2.0 * p.a2 * s1sq / s2sq**2,
            scale2=1.0 / s2sq**2,
        )

    def forcing(self, costs: HoldingCostSpec, regime: int, x) -> np.ndarray:
        scale = self.scale1 if regime == 1 else self.scale2
        return scale * eval_holding_cost(costs, regime, x)


def _check_positive(t, s):
    if np.any(np.asarray(t) <= 0) or np.any(np.asarray(s) <= 0):
        raise ValueError("t and s must be > 0")


def eval_g(regime: int, x, t, s, params: RegimeParameters, costs: HoldingCostSpec):
    _check_positive(t, s)
    cc = CouplingCoefficients.from_params(params)
    if regime == 1:
        F = cc.forcing(costs, 1, x)
        return F * t + cc.own1 * t * np.log(t) - cc.cross1 * t * np.log(s)
    if regime == 2:
        F = cc.forcing(costs, 2, x)
        return F * s + cc.own2 * s * np.log(s) - cc.cross2 * s * np.log(t)
    raise ValueError(f"regime must be 1 or 2, got {regime!r}")


def eval_g_partial(regime: int, x, t, s, params: RegimeParameters, costs: HoldingCostSpec):
    """``dg1/dt`` for regime 1, ``dg2/ds`` for regime 2."""
    _check_positive(t, s)
    cc = CouplingCoefficients.from_params(params)
    if regime == 1:
        F = cc.forcing(costs, 1, x)
        return F + cc.own1 * (1.0 + np.log(t)) - cc.cross1 * np.log(s)
    if regime == 2:
        F = cc.forcing(costs, 2, x)
        return F + cc.own2 * (1.0 + np.log(s)) - cc.cross2 * np.log(t)
    raise ValueError(f"regime must be 1 or 2, got {regime!r}")


def _log_linspace(log_lo, n):
    """``ln`` of ``linspace(exp(log_lo), 1, n)``, exact at the lower end even
    when ``exp(log_lo)`` underflows."""
    with np.errstate(divide="ignore"):
        out = np.log(np.linspace(np.exp(log_lo), 1.0, n))
    out[0] = log_lo
    out[-1] = 0.0
    return out


def compute_lambdas(
    params: RegimeParameters,
    costs: HoldingCostSpec,
    kp: KParameters,
    resolution: tuple[int, int, int] = (200, 50, 50),
) -> LambdaPair:
    """Scan the partials over x in [-R, R] and the bracket ranges of t, s.

    For each x, ``t`` runs over ``[exp(K1 (R^2 - x^2)), 1]`` and ``s`` over
    ``[exp(K2 (R^2 - x^2)), 1]``. The shifts are the negated maxima. A
    non-positive maximum would give a non-negative shift, which the monotone
    scheme cannot use; it is clamped to ``LAMBDA_FLOOR`` with a warning.
    """
    n_x, n_t, n_s = (int(v) for v in resolution)
    if min(n_x, n_t, n_s) < 2:
        raise ValueError("scan resolution components must be >= 2")
    R = params.R
    cc = CouplingCoefficients.from_params(params)
    xs = np.linspace(-R, R, n_x)
    F1 = cc.forcing(costs, 1, xs)
    F2 = cc.forcing(costs, 2, xs)
    max1 = -np.inf
    max2 = -np.inf
    for xi, f1, f2 in zip(xs, F1, F2):
        span = R * R - xi * xi
        lt = _log_linspace(kp.K1 * span, n_t)[:, None]
        ls = _log_linspace(kp.K2 * span, n_s)[None, :]
        max1 = max(max1, float(np.max(f1 + cc.own1 * (1.0 + lt) - cc.cross1 * ls)))
        max2 = max(max2, float(np.max(f2 + cc.own2 * (1.0 + ls) - cc.cross2 * lt)))
    lam1, lam2 = -max1, -max2
    if max1 <= 0 or max2 <= 0:
        warnings.warn(
            "scanned maximum of the coupling partial is <= 0; clamping Lambda",
            RuntimeWarning,
            stacklevel=2,
        )
        lam1 = LAMBDA_FLOOR if max1 <= 0 else lam1
        lam2 = LAMBDA_FLOOR if max2 <= 0 else lam2
    return LambdaPair(lam1, lam2, (n_x, n_t, n_s), max1, max2)
