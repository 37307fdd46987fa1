"""Independent reference computations.

Nothing here imports the package: each oracle rebuilds its quantity from
the model formulas with a different algorithm than the production code.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
import scipy.sparse as sps
import scipy.sparse.linalg as spl

SCENARIO_DATA = {
    "s1": dict(a1=0.6, a2=0.5, alpha1=0.3, alpha2=0.3, sigma1=1.0, sigma2=0.7,
               M1=1.0, M2=1.0, R=20.0, c1=1.0, c2=1.0),
    "s2": dict(a1=0.6, a2=0.5, alpha1=0.3, alpha2=0.7, sigma1=1.0, sigma2=1.0,
               M1=1.0, M2=1.0, R=20.0, c1=1.0, c2=1.0),
    "s3": dict(a1=0.6, a2=0.9, alpha1=0.3, alpha2=0.3, sigma1=1.0, sigma2=1.0,
               M1=5.0, M2=1.0, R=20.0, c1=5.0, c2=1.0),
    "s4": dict(a1=0.6, a2=0.9, alpha1=0.3, alpha2=0.8, sigma1=1.0, sigma2=0.3,
               M1=5.0, M2=1.0, R=10.0, c1=5.0, c2=1.0),
}


def k_residuals_mp(K1, K2, d, dps=50):
    """Both quadratic residuals in arbitrary precision."""
    with mpmath.workdps(dps):
        K1, K2 = mpmath.mpf(K1), mpmath.mpf(K2)
        s1, s2 = mpmath.mpf(d["sigma1"]), mpmath.mpf(d["sigma2"])
        a1, a2 = mpmath.mpf(d["a1"]), mpmath.mpf(d["a2"])
        al1, al2 = mpmath.mpf(d["alpha1"]), mpmath.mpf(d["alpha2"])
        r1 = (4 * K1**2 + 2 * (a1 + al1) * s1**2 / s1**4 * K1 - d["M1"] / s1**4
              - 2 * a1 * s2**2 / s1**4 * K2)
        r2 = (4 * K2**2 + 2 * (a2 + al2) * s2**2 / s2**4 * K2 - d["M2"] / s2**4
              - 2 * a2 * s1**2 / s2**4 * K1)
        return r1, r2


def k_grid_oracle(d, lo=-10.0, levels=12):
    """Negative root by residual minimisation on successively refined grids.

    Starts from a 401x401 grid over ``[lo, 0)^2``; each level keeps the
    best cell and zooms in. Returns ``(K1, K2, residual)``.
    """
    def resid(K1, K2):
        s1, s2 = d["sigma1"], d["sigma2"]
        r1 = (4 * K1**2 + 2 * (d["a1"] + d["alpha1"]) / s1**2 * K1 - d["M1"] / s1**4
              - 2 * d["a1"] * s2**2 / s1**4 * K2)
        r2 = (4 * K2**2 + 2 * (d["a2"] + d["alpha2"]) / s2**2 * K2 - d["M2"] / s2**4
              - 2 * d["a2"] * s1**2 / s2**4 * K1)
        return np.maximum(np.abs(r1), np.abs(r2))

    a1_lo, a1_hi, a2_lo, a2_hi = lo, -1e-12, lo, -1e-12
    n = 401
    for _ in range(levels):
        g1 = np.linspace(a1_lo, a1_hi, n)
        g2 = np.linspace(a2_lo, a2_hi, n)
        G1, G2 = np.meshgrid(g1, g2, indexing="ij")
        r = resid(G1, G2)
        i, j = np.unravel_index(np.argmin(r), r.shape)
        h1 = (a1_hi - a1_lo) / (n - 1) * 4
        h2 = (a2_hi - a2_lo) / (n - 1) * 4
        a1_lo, a1_hi = min(g1[i] - h1, -1e-15), min(g1[i] + h1, -1e-15)
        a2_lo, a2_hi = min(g2[j] - h2, -1e-15), min(g2[j] + h2, -1e-15)
        n = 81
    return float(g1[i]), float(g2[j]), float(r[i, j])


def g_mp(regime, x, t, s, d, c, dps=40):
    """Coupling function in arbitrary precision from its defining formula."""
    with mpmath.workdps(dps):
        x, t, s = mpmath.mpf(x), mpmath.mpf(t), mpmath.mpf(s)
        s1, s2 = mpmath.mpf(d["sigma1"]), mpmath.mpf(d["sigma2"])
        if regime == 1:
            return (c * x**2 / s1**4 * t + 2 * (d["a1"] + d["alpha1"]) / s1**2 * t * mpmath.log(t)
                    - 2 * d["a1"] * s2**2 / s1**4 * t * mpmath.log(s))
        return (c * x**2 / s2**4 * s + 2 * (d["a2"] + d["alpha2"]) / s2**2 * s * mpmath.log(s)
                - 2 * d["a2"] * s1**2 / s2**4 * s * mpmath.log(t))


def newton_fields(d, n_points, tol=1e-9, max_iter=200):
    """Solve the discrete coupled system directly with Newton in ``w = ln u``.

    The residual is ``(lap u) / u - g(u) / u`` on interior nodes, which is
    O(1) even where ``u`` is astronomically small. If Newton from ``w = 0``
    fails, the costs are ramped up geometrically from 0.1% in forty
    warm-started stages.
    Returns ``(x, u1, u2)``.
    """
    try:
        return _newton_fields(d, n_points, tol, max_iter, 1.0, None)
    except RuntimeError:
        pass
    w = None
    for theta in np.geomspace(1e-3, 1.0, 40):
        x, u1, u2 = _newton_fields(d, n_points, tol, max_iter, theta, w)
        w = np.concatenate([np.log(u1[1:-1]), np.log(u2[1:-1])])
    return x, u1, u2


def _newton_fields(d, n_points, tol, max_iter, theta, w0):
    R = d["R"]
    x = np.linspace(-R, R, n_points)
    dx = x[1] - x[0]
    n = n_points - 2
    xi = x[1:-1]
    s1, s2 = d["sigma1"], d["sigma2"]
    A = theta * d["c1"] * xi**2 / s1**4
    B = 2 * (d["a1"] + d["alpha1"]) / s1**2
    C = 2 * d["a1"] * s2**2 / s1**4
    D = theta * d["c2"] * xi**2 / s2**4
    E = 2 * (d["a2"] + d["alpha2"]) / s2**2
    F = 2 * d["a2"] * s1**2 / s2**4
    lap = sps.diags([np.ones(n - 1), -2 * np.ones(n), np.ones(n - 1)], [-1, 0, 1]) / dx**2
    bc = np.zeros(n)
    bc[0] = bc[-1] = 1 / dx**2
    eye = sps.eye(n)

    def residual(w):
        w1, w2 = w[:n], w[n:]
        if np.max(w) > 700 or np.min(w) < -740:
            nan = np.full(2 * n, np.inf)
            return nan, None, None, None, None
        u1, u2 = np.exp(w1), np.exp(w2)
        q1 = (lap @ u1 + bc) / u1
        q2 = (lap @ u2 + bc) / u2
        return np.concatenate([q1 - (A + B * w1 - C * w2), q2 - (D + E * w2 - F * w1)]), q1, q2, u1, u2

    w = np.zeros(2 * n) if w0 is None else w0.copy()
    for _ in range(max_iter):
        r, q1, q2, u1, u2 = residual(w)
        if np.max(np.abs(r)) < tol:
            break
        J11 = sps.diags(1 / u1) @ lap @ sps.diags(u1) - sps.diags(q1) - B * eye
        J22 = sps.diags(1 / u2) @ lap @ sps.diags(u2) - sps.diags(q2) - E * eye
        J = sps.bmat([[J11, C * eye], [F * eye, J22]]).tocsc()
        step = spl.spsolve(J, r)
        if not np.all(np.isfinite(step)):
            raise RuntimeError("oracle Newton hit a singular Jacobian")
        lam = 1.0
        while lam > 1e-6:
            trial = w - lam * step
            if np.linalg.norm(residual(trial)[0]) < np.linalg.norm(r):
                break
            lam /= 2
        else:
            raise RuntimeError(f"oracle Newton line search failed at residual {np.max(np.abs(r)):.3g}")
        w = trial
    else:
        raise RuntimeError("oracle Newton did not converge")
    one = np.ones(1)
    return x, np.concatenate([one, np.exp(w[:n]), one]), np.concatenate([one, np.exp(w[n:]), one])


def newton_values(d, n_points):
    x, u1, u2 = newton_fields(d, n_points)
    z1 = -2 * d["sigma1"] ** 2 * np.log(u1)
    z2 = -2 * d["sigma2"] ** 2 * np.log(u2)
    return x, z1 + 0.0, z2 + 0.0


def brownian_exit_time(R, x0, sigma):
    """Mean exit time of ``sigma W`` from ``(-R, R)``."""
    return (R * R - x0 * x0) / sigma**2


def chain_occupation(a1, a2):
    """Stationary probability of regime 1."""
    return a2 / (a1 + a2)


def symmetric_k(a, alpha, sigma, M):
    """Negative root of the scalar quadratic obtained when both regimes coincide."""
    lin = 2 * (a + alpha) / sigma**2 - 2 * a / sigma**2
    return (-lin - math.sqrt(lin * lin + 16 * M / sigma**4)) / 8
