"""Property-based checks of the model invariants."""

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from switchplan import KSolveError, RegimeParameters, solve_k
from switchplan.analysis import pointwise_dominance
from switchplan.config import parse_config, serialize_config
from switchplan.coupling import compute_lambdas
from switchplan.elliptic_solver import SolverOptions, solve_coupled
from switchplan.k_solver import KParameters, k_jacobian, k_residuals, resolve_exponents, subsolution_margin
from switchplan.model_types import HoldingCostSpec, build_grid, eval_holding_cost
from switchplan.regime_sim import step_regime
from switchplan.value_recovery import optimal_rate, recover_value

pos = st.floats(0.05, 3.0)
rate = st.floats(0.05, 2.0)
vol = st.floats(0.3, 2.0)
radius = st.floats(1.0, 20.0)


@st.composite
def problems(draw, max_R=20.0):
    p = RegimeParameters(a1=draw(rate), a2=draw(rate), alpha1=draw(rate), alpha2=draw(rate),
                         sigma1=draw(vol), sigma2=draw(vol), M1=draw(pos), M2=draw(pos),
                         R=draw(st.floats(1.0, max_R)))
    c = HoldingCostSpec(p.M1 * draw(st.floats(0.1, 1.0)), p.M2 * draw(st.floats(0.1, 1.0)))
    return p, c


@given(c=st.floats(0.0, 10.0), regime=st.sampled_from([1, 2]), x=st.floats(-1e3, 1e3))
def test_holding_cost_is_even(c, regime, x):
    spec = HoldingCostSpec(c, c)
    assert eval_holding_cost(spec, regime, np.array([x]))[0] == eval_holding_cost(spec, regime, np.array([-x]))[0]


@given(problems(), st.integers(3, 200))
def test_holding_cost_below_cap(pc, n):
    p, c = pc
    x2 = np.square(build_grid(p.R, n).x)
    assert np.all(eval_holding_cost(c, 1, np.sqrt(x2)) <= p.M1 * x2)
    assert np.all(eval_holding_cost(c, 2, np.sqrt(x2)) <= p.M2 * x2)


@given(radius, st.integers(3, 2000))
def test_grid_symmetry(R, n):
    x = build_grid(R, n).x
    assert np.all(x + x[::-1] == 0.0)


@given(a=rate, alpha=rate, sigma=vol, M=pos)
def test_identical_regimes_give_equal_exponents(a, alpha, sigma, M):
    p = RegimeParameters(a, a, alpha, alpha, sigma, sigma, M, M, 5.0)
    kp = solve_k(p)
    assert abs(kp.K1 - kp.K2) <= 1e-10
    lin = 2 * alpha / sigma**2
    assert kp.K1 == pytest.approx((-lin - math.sqrt(lin * lin + 16 * M / sigma**4)) / 8, abs=1e-10)


@settings(max_examples=60, deadline=None)
@given(problems())
def test_solve_k_never_returns_a_bad_root(pc):
    p, _ = pc
    try:
        kp = solve_k(p)
    except KSolveError:
        return
    assert kp.K1 < 0 and kp.K2 < 0
    assert max(abs(r) for r in k_residuals(kp.K1, kp.K2, p)) <= 1e-10


@given(problems(), st.floats(-5.0, -0.01), st.floats(-5.0, -0.01))
def test_jacobian_matches_finite_differences(pc, K1, K2):
    p, _ = pc
    J = k_jacobian(K1, K2, p)
    h = 1e-6
    for j, e in enumerate(([h, 0.0], [0.0, h])):
        up = np.array(k_residuals(K1 + e[0], K2 + e[1], p))
        dn = np.array(k_residuals(K1 - e[0], K2 - e[1], p))
        fd = (up - dn) / (2 * h)
        np.testing.assert_allclose(J[:, j], fd, rtol=1e-6, atol=1e-6 * (1 + np.abs(J).max()))


@settings(max_examples=25, deadline=None)
@given(problems())
def test_resolved_exponents_are_subsolutions(pc):
    p, c = pc
    try:
        kp = resolve_exponents(p, c)
    except KSolveError as exc:
        # small sigma with large R can need |K| R^2 beyond the double range
        assert "|K| R^2 <= 700" in str(exc)
        return
    assert kp.K1 < 0 and kp.K2 < 0
    assert min(subsolution_margin(kp.K1, kp.K2, p, c)) >= 0


@settings(max_examples=25, deadline=None)
@given(problems(), st.floats(-2.0, -0.01), st.floats(-2.0, -0.01),
       st.integers(3, 20), st.integers(2, 10), st.integers(2, 10))
def test_lambda_scan_refinement_never_lowers_the_maximum(pc, K1, K2, nx, nt, ns):
    p, c = pc
    kp = KParameters(K1, K2, 0.0, 0.0, 0.0)
    coarse = compute_lambdas(p, c, kp, (nx, nt, ns))
    fine = compute_lambdas(p, c, kp, (2 * nx - 1, 2 * nt - 1, 2 * ns - 1))
    for a, b in ((coarse.max_partial1, fine.max_partial1), (coarse.max_partial2, fine.max_partial2)):
        assert b >= a - 1e-12 * abs(a)
    assert coarse.lambda1 < 0 and coarse.lambda2 < 0


@settings(max_examples=20, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(problems(max_R=6.0), st.integers(5, 40), st.integers(1, 300))
def test_relaxation_keeps_boundary_and_bracket(pc, n, sweeps):
    p, c = pc
    kp = resolve_exponents(p, c)
    assume(math.exp(min(kp.K1, kp.K2) * p.R**2) > 1e-300)
    grid = build_grid(p.R, n)
    lam = compute_lambdas(p, c, kp)
    fields, rep = solve_coupled(p, c, grid, kp, lam, SolverOptions(max_iter=sweeps))
    assert fields.u1[0] == fields.u1[-1] == fields.u2[0] == fields.u2[-1] == 1.0
    assert rep.monotone_violations == 0 and rep.bracket_violations == 0
    assert np.all(fields.u1 <= 1 + 1e-12) and np.all(fields.u2 <= 1 + 1e-12)


@given(st.lists(st.floats(1e-12, 1.0), min_size=1, max_size=50), vol)
def test_value_round_trip_and_sign(u, sigma):
    u = np.array(u)
    z = recover_value(u, sigma)
    assert np.all(z >= 0)
    np.testing.assert_allclose(np.exp(-z / (2 * sigma**2)), u, rtol=1e-14)


@given(st.floats(1e-300, 1e-12), vol)
def test_value_round_trip_for_tiny_fields(u, sigma):
    # exp(ln u) amplifies the rounding of ln u by |ln u|
    z = recover_value(np.array([u]), sigma)
    back = np.exp(-z / (2 * sigma**2))[0]
    assert abs(back - u) <= 4 * np.finfo(float).eps * abs(math.log(u)) * u


@given(radius, st.integers(3, 300), st.floats(-5.0, 5.0), st.floats(-50.0, 50.0))
def test_rate_of_quadratic_is_exact_inside(R, n, c, shift):
    grid = build_grid(R, n)
    p = optimal_rate(c * (R * R - grid.x**2) + shift, grid)
    np.testing.assert_allclose(p[1:-1], c * grid.x[1:-1], atol=1e-9 * (1 + abs(c) * R * R + abs(shift)))


@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30),
       st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30), st.floats(0.0, 1.0))
def test_dominance_pass_iff_violation_within_tolerance(a, b, tol):
    m = min(len(a), len(b))
    rep = pointwise_dominance(a[:m], b[:m], tol)
    assert rep.passed == (rep.max_violation <= tol)
    assert rep.violating_nodes == sum(y - x > tol for x, y in zip(a[:m], b[:m]))


@given(st.sampled_from([1, 2]), st.floats(0.0, 0.99), st.floats(0.0, 0.99), st.floats(0.0, 1.0,
                                                                                       exclude_max=True))
def test_switch_rule(regime, p1, p2, u):
    new = step_regime(regime, 1.0, p1, p2, u)
    threshold = p1 if regime == 1 else p2
    assert (new != regime) == (u < threshold)


@settings(deadline=None)
@given(problems(), st.integers(3, 500), st.floats(1e-12, 1e-2), st.integers(1, 10**7),
       st.sampled_from(["sub-solution", "super-solution"]), st.floats(1e-4, 0.05),
       st.integers(0, 2**63 - 1), st.booleans(), st.sampled_from(["auto", "lemma", "inequality"]))
def test_config_round_trip(pc, n, eps, max_iter, mode, dt, seed, strict, ks):
    p, c = pc
    assume(max(p.a1, p.a2) * dt < 1)
    text = serialize_config(parse_config(
        f"problem: {{a1: {p.a1!r}, a2: {p.a2!r}, alpha1: {p.alpha1!r}, alpha2: {p.alpha2!r},"
        f" sigma1: {p.sigma1!r}, sigma2: {p.sigma2!r}, M1: {p.M1!r}, M2: {p.M2!r}, R: {p.R!r},"
        f" c1: {c.c1!r}, c2: {c.c2!r}}}\n"
        f"grid: {{n_points: {n}}}\n"
        f"solver: {{eps_conv: {eps!r}, max_iter: {max_iter}, mode: {mode}, k_strategy: {ks}}}\n"
        f"sim: {{dt: {dt!r}, seed: {seed}}}\n"
        f"output: {{strict: {str(strict).lower()}}}\n"))
    cfg = parse_config(text)
    assert parse_config(serialize_config(cfg)) == cfg
    assert cfg.params == p and cfg.costs == c and cfg.sim.seed == seed
