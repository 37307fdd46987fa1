"""Exponents of the sub-solution profile ``exp(K_i (R**2 - x**2))``.

The pair ``(K1, K2)`` is the negative root of two coupled quadratics.
Newton with step halving finds it; a non-negative root triggers a restart
from a more negative guess. Eliminating ``K1`` turns the system into a
quartic in ``K2``, which settles whether a negative root exists at all.

Plugging the profile into the transformed equations gives, per regime,
``x**2 * r_i(K) + side_i(K) >= 0`` on ``[-R, R]``. Zero residuals
``r_i`` plus non-negative ``side_i`` are sufficient, not necessary, and
for some parameter sets no negative root exists. :func:`inequality_exponents`
then finds the pair with the tightest quadratic bound that satisfies the
pointwise inequalities directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model_types import RegimeParameters


class KSolveError(RuntimeError):
    """The negative root could not be located."""


@dataclass(frozen=True)
class KParameters:
    K1: float
    K2: float
    S1: float
    S2: float
    residual_norm: float
    restarts: int = 0
    source: str = "lemma"


@dataclass(frozen=True)
class SubsolutionReport:
    """Values of the two sub-solution side conditions (must be >= 0)."""

    value1: float
    value2: float

    @property
    def passed1(self) -> bool:
        return self.value1 >= 0.0

    @property
    def passed2(self) -> bool:
        return self.value2 >= 0.0

    @property
    def passed(self) -> bool:
        return self.passed1 and self.passed2


def _coefficients(p: RegimeParameters):
    s1sq, s2sq = p.sigma1**2, p.sigma2**2
    s1q, s2q = s1sq**2, s2sq**2
    lin1 = 2.0 * (p.a1 + p.alpha1) / s1sq
    lin2 = 2.0 * (p.a2 + p.alpha2) / s2sq
    const1 = p.M1 / s1q
    const2 = p.M2 / s2q
    cross1 = 2.0 * p.a1 * s2sq / s1q
    cross2 = 2.0 * p.a2 * s1sq / s2q
    return lin1, lin2, const1, const2, cross1, cross2


def k_residuals(K1: float, K2: float, params: RegimeParameters) -> tuple[float, float]:
    lin1, lin2, const1, const2, cross1, cross2 = _coefficients(params)
    r1 = 4.0 * K1 * K1 + lin1 * K1 - const1 - cross1 * K2
    r2 = 4.0 * K2 * K2 + lin2 * K2 - const2 - cross2 * K1
    return r1, r2


def k_jacobian(K1: float, K2: float, params: RegimeParameters) -> np.ndarray:
    lin1, lin2, _, _, cross1, cross2 = _coefficients(params)
    return np.array([[8.0 * K1 + lin1, -cross1], [-cross2, 8.0 * K2 + lin2]])


def _newton(x0, params, tol, step_tol, max_iter, max_halvings):
    x = np.asarray(x0, dtype=float)
    r = np.array(k_residuals(x[0], x[1], params))
    norm = np.max(np.abs(r))
    for _ in range(max_iter):
        if norm <= tol:
            return x, norm
        J = k_jacobian(x[0], x[1], params)
        try:
            step = np.linalg.solve(J, r)
        except np.linalg.LinAlgError:
            raise KSolveError("singular Jacobian") from None
        if not np.all(np.isfinite(step)):
            raise KSolveError("singular Jacobian")
        lam = 1.0
        for _ in range(max_halvings + 1):
            trial = x - lam * step
            r_trial = np.array(k_residuals(trial[0], trial[1], params))
            norm_trial = np.max(np.abs(r_trial))
            if norm_trial < norm:
                break
            lam *= 0.5
        else:
            # no decrease along the Newton direction
            if norm <= 10 * tol:
                return x, norm
            raise KSolveError("Newton stalled at a non-zero residual")
        x, r, norm = trial, r_trial, norm_trial
        if lam * np.max(np.abs(step)) <= step_tol:
            break
    return x, norm


def boundary_scales(K1: float, K2: float, R: float) -> tuple[float, float]:
    return math.exp(K1 * R * R), math.exp(K2 * R * R)


def solve_k(
    params: RegimeParameters,
    initial_guess: tuple[float, float] = (-1.0, -1.0),
    *,
    tol: float = 1e-10,
    step_tol: float = 1e-12,
    max_iter: int = 100,
    max_halvings: int = 30,
    max_retries: int = 50,
) -> KParameters:
    """Damped Newton for the negative root ``K1, K2 < 0``.

    When Newton lands on a root with a non-negative component (or fails to
    reach ``tol``), the guess is shifted by ``-1`` in each component and the
    solve repeated, up to ``max_retries`` times.
    """
    guess = np.asarray(initial_guess, dtype=float)
    if guess.shape != (2,) or np.any(guess >= 0):
        raise ValueError("initial guess components must be < 0")
    for attempt in range(max_retries + 1):
        try:
            root, norm = _newton(guess, params, tol, step_tol, max_iter, max_halvings)
        except KSolveError:
            pass
        else:
            if norm <= tol and root[0] < 0 and root[1] < 0:
                return _make(root[0], root[1], norm, params, attempt)
        guess = guess - 1.0
    roots = k_real_roots(params, tol=tol)
    negative = [r for r in roots if r[0] < 0 and r[1] < 0]
    if negative:
        K1, K2 = negative[0]
        norm = max(abs(v) for v in k_residuals(K1, K2, params))
        return _make(K1, K2, norm, params, max_retries + 1)
    listed = ", ".join(f"({a:.6g}, {b:.6g})" for a, b in roots) or "none"
    raise KSolveError(f"the system has no root with K1, K2 < 0 (real roots: {listed})")


def _make(K1, K2, norm, params, restarts, source="lemma"):
    K1, K2 = float(K1), float(K2)
    S1, S2 = boundary_scales(K1, K2, params.R)
    return KParameters(K1, K2, S1, S2, float(norm), restarts=restarts, source=source)


def k_real_roots(params: RegimeParameters, *, tol: float = 1e-10) -> list[tuple[float, float]]:
    """All real roots, via elimination of ``K1`` and Newton polishing.

    Roots are returned sorted by ``K1``; only those whose polished residual
    is within ``tol`` are kept.
    """
    lin1, lin2, const1, const2, cross1, cross2 = _coefficients(params)
    candidates = []
    if cross2 != 0.0:
        k1_of_k2 = np.poly1d([4.0, lin2, -const2]) / cross2
        quartic = 4.0 * k1_of_k2 * k1_of_k2 + lin1 * k1_of_k2 - const1 - np.poly1d([cross1, 0.0])
        for z in quartic.roots:
            if abs(z.imag) <= 1e-7 * max(1.0, abs(z)):
                candidates.append((k1_of_k2(z.real), z.real))
    else:
        # regime 2 decouples
        for k2 in np.roots([4.0, lin2, -const2]):
            if abs(k2.imag) > 0:
                continue
            for k1 in np.roots([4.0, lin1, -(const1 + cross1 * k2.real)]):
                if abs(k1.imag) == 0:
                    candidates.append((k1.real, k2.real))
    roots = []
    for c in candidates:
        try:
            x, norm = _newton(np.array(c, dtype=float), params, tol, 1e-14, 50, 30)
        except KSolveError:
            continue
        if norm <= tol and not any(abs(x[0] - a) < 1e-8 and abs(x[1] - b) < 1e-8 for a, b in roots):
            roots.append((float(x[0]), float(x[1])))
    return sorted(roots)


def subsolution_margin(K1: float, K2: float, params: RegimeParameters,
                       costs=None, n_dims: int = 1) -> tuple[float, float]:
    """Minimum over ``[-R, R]`` of ``(u'' - g) / u`` for the exponential profile.

    Non-negative in both components means ``exp(K_i (R**2 - x**2))`` is a
    sub-solution. Uses ``M_i`` as the cost coefficient unless ``costs`` is
    given.
    """
    lin1, lin2, const1, const2, cross1, cross2 = _coefficients(params)
    if costs is not None:
        const1 = costs.c1 / params.sigma1**4
        const2 = costs.c2 / params.sigma2**4
    R2 = params.R * params.R
    r1 = 4.0 * K1 * K1 + lin1 * K1 - const1 - cross1 * K2
    r2 = 4.0 * K2 * K2 + lin2 * K2 - const2 - cross2 * K1
    side1 = -lin1 * R2 * K1 - 2.0 * n_dims * K1 + cross1 * R2 * K2
    side2 = -lin2 * R2 * K2 - 2.0 * n_dims * K2 + cross2 * R2 * K1
    # linear in x**2, so the minimum sits at x = 0 or x = +-R
    return min(side1, side1 + R2 * r1), min(side2, side2 + R2 * r2)


def inequality_exponents(params: RegimeParameters, costs=None, *, max_exponent: float = 700.0,
                         margin: float = 1e-8) -> KParameters:
    """Negative pair satisfying the pointwise sub-solution inequalities with
    the smallest ``sigma1**2 |K1| + sigma2**2 |K2|`` (tightest bounds).

    ``max_exponent`` caps ``|K_i| R**2`` so the profile stays representable.
    """
    import warnings

    from scipy.optimize import minimize

    R2 = params.R * params.R
    kmax = max_exponent / R2
    w = np.array([params.sigma1**2, params.sigma2**2])

    def cons(K):
        return np.array(subsolution_margin(K[0], K[1], params, costs)) - margin

    best = None
    for g1 in np.linspace(-0.9 * kmax, -0.02 * kmax, 6):
        for g2 in np.linspace(-0.9 * kmax, -0.02 * kmax, 6):
            with warnings.catch_warnings():
                # SLSQP clips trial points to the box and says so
                warnings.simplefilter("ignore", RuntimeWarning)
                res = minimize(lambda K: -w @ K, (g1, g2), jac=lambda K: -w, method="SLSQP",
                               bounds=[(-kmax, -1e-12)] * 2,
                               constraints=[{"type": "ineq", "fun": cons}],
                               options={"ftol": 1e-14, "maxiter": 500})
            K = res.x
            if np.all(K < 0) and np.min(subsolution_margin(K[0], K[1], params, costs)) >= 0:
                if best is None or -w @ K < -w @ best:
                    best = K
    if best is None:
        raise KSolveError(
            "no exponential sub-solution with |K| R^2 <= %g exists" % max_exponent
        )
    norm = max(abs(v) for v in k_residuals(best[0], best[1], params))
    return _make(best[0], best[1], norm, params, 0, source="inequality")


def resolve_exponents(params: RegimeParameters, costs=None, strategy: str = "auto") -> KParameters:
    """Pick the sub-solution exponents used by the solver.

    ``"lemma"`` insists on the negative root reached by :func:`solve_k`.
    ``"inequality"`` always uses :func:`inequality_exponents`. ``"auto"``
    takes, among all negative roots that yield a genuine sub-solution, the
    one with the tightest bound, and falls back to the inequality search
    when there is none.
    """
    if strategy == "lemma":
        return solve_k(params)
    if strategy == "inequality":
        return inequality_exponents(params, costs)
    if strategy != "auto":
        raise ValueError("strategy must be 'auto', 'lemma' or 'inequality'")
    w = (params.sigma1**2, params.sigma2**2)
    usable = [
        r for r in k_real_roots(params)
        if r[0] < 0 and r[1] < 0 and min(subsolution_margin(r[0], r[1], params, costs)) >= 0
    ]
    if not usable:
        return inequality_exponents(params, costs)
    K1, K2 = min(usable, key=lambda r: -(w[0] * r[0] + w[1] * r[1]))
    norm = max(abs(v) for v in k_residuals(K1, K2, params))
    return _make(K1, K2, norm, params, 0)


def verify_subsolution_inequalities(
    kp: KParameters, params: RegimeParameters, n_dims: int = 1
) -> SubsolutionReport:
    """Evaluate the two side conditions that make the exponential profile a
    sub-solution once the quadratic equations hold.

    They do *not* hold for every negative pair: the cross term carries the
    sign of the other exponent, so a failure here is a property of the
    parameters, not necessarily a root-finding error.
    """
    p = params
    R2 = p.R * p.R
    s1sq, s2sq = p.sigma1**2, p.sigma2**2
    v1 = (
        -2.0 * (p.a1 + p.alpha1) * R2 / s1sq * kp.K1
        - 2.0 * kp.K1 * n_dims
        + 2.0 * p.a1 * s2sq * R2 / s1sq**2 * kp.K2
    )
    v2 = (
        -2.0 * (p.a2 + p.alpha2) * R2 / s2sq * kp.K2
        - 2.0 * kp.K2 * n_dims
        + 2.0 * p.a2 * s1sq * R2 / s2sq**2 * kp.K1
    )
    return SubsolutionReport(float(v1), float(v2))
