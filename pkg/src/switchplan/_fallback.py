"""NumPy implementations of the kernels in ``_kernels.pyx``.

Same signatures and return tuples. The relaxation sweep is vectorised by
treating the left-to-right Gauss-Seidel pass as a first-order linear
recurrence in the update, so results agree with the compiled loop to
rounding, not bit for bit. The path and chain walkers are plain loops and reproduce the
compiled results exactly.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.signal import lfilter

MONO_SLACK = 1e-12


def relax(u1, u2, lu1, lu2, F1, F2, own1, cross1, own2, cross2, lam1, lam2, dx,
          floor1, floor2, eps, max_iter, stop_rule, audit_monotone):
    dx2 = dx * dx
    den1 = -2.0 / dx2 + lam1
    den2 = -2.0 / dx2 + lam2
    # with v = u_old + d:  d[i] = -res[i] / den + k * d[i-1],  d[0] = 0
    k1 = -1.0 / (dx2 * den1)
    k2 = -1.0 / (dx2 * den2)
    F1i, F2i = np.asarray(F1)[1:-1], np.asarray(F2)[1:-1]
    fl1, fl2 = np.asarray(floor1)[1:-1], np.asarray(floor2)[1:-1]
    prev = math.inf
    mono = brk = 0
    d1 = d2 = dl = 0.0
    converged = False
    status = 0
    k = 0
    with np.errstate(divide="ignore", invalid="ignore"):
        while k < max_iter:
            k += 1
            t, s = u1[1:-1].copy(), u2[1:-1].copy()
            lt, ls = lu1[1:-1].copy(), lu2[1:-1].copy()
            g1 = t * (F1i + own1 * lt - cross1 * ls)
            g2 = s * (F2i + own2 * ls - cross2 * lt)
            # correction form: a zero residual leaves the iterate bit-for-bit unchanged
            r1 = (u1[2:] - 2.0 * t + u1[:-2]) / dx2 - g1
            r2 = (u2[2:] - 2.0 * s + u2[:-2]) / dx2 - g2
            v1 = t + lfilter([1.0], [1.0, -k1], -r1 / den1)
            v2 = s + lfilter([1.0], [1.0, -k2], -r2 / den2)
            if not (np.all(v1 > 0) and np.all(v2 > 0)
                    and np.all(np.isfinite(v1)) and np.all(np.isfinite(v2))):
                status = -1
                break
            lv1, lv2 = np.log(v1), np.log(v2)
            if audit_monotone:
                mono += int(np.count_nonzero(v1 < t * (1.0 - MONO_SLACK)))
                mono += int(np.count_nonzero(v2 < s * (1.0 - MONO_SLACK)))
            brk += int(np.count_nonzero((v1 < fl1 * (1.0 - MONO_SLACK)) | (v1 > 1.0 + MONO_SLACK)))
            brk += int(np.count_nonzero((v2 < fl2 * (1.0 - MONO_SLACK)) | (v2 > 1.0 + MONO_SLACK)))
            d1 = float(np.max(np.abs(v1 - t)))
            d2 = float(np.max(np.abs(v2 - s)))
            dl = float(max(np.max(np.abs(lv1 - lt)), np.max(np.abs(lv2 - ls))))
            u1[1:-1], u2[1:-1] = v1, v2
            lu1[1:-1], lu2[1:-1] = lv1, lv2
            if stop_rule == 0:
                if d1 < eps and d2 < eps:
                    converged = True
                    break
            else:
                if dl == 0.0:
                    converged = True
                    break
                rho = dl / prev
                prev = dl
                if dl < eps and rho < 1.0 and dl * rho / (1.0 - rho) < eps:
                    converged = True
                    break
    return k, converged, d1, d2, dl, mono, brk, status


def _rate(x, p1, p2, regime, y, xmin, dx, linear):
    n = len(x)
    j = math.floor((y - xmin) / dx)
    j = min(max(j, 0), n - 2)
    if linear:
        w = (y - x[j]) / (x[j + 1] - x[j])
        p = p1 if regime == 1 else p2
        return p[j] + w * (p[j + 1] - p[j])
    if abs(y - x[j]) > abs(x[j + 1] - y):
        j += 1
    return p1[j] if regime == 1 else p2[j]


def advance_path(y, regime, k, uniforms, normals, x, p1, p2, R, sigma1, sigma2,
                 a1dt, a2dt, dt, sqrt_dt, t_max, linear, ts, ys, regs):
    m = len(uniforms)
    xmin = float(x[0])
    dx = (float(x[-1]) - float(x[0])) / (len(x) - 1)
    x = x.tolist()
    p1 = p1.tolist()
    p2 = p2.tolist()
    u = uniforms.tolist()
    z = normals.tolist()
    status = 0
    j = 0
    while j < m:
        if abs(y) >= R:
            status = 1
            break
        if k * dt >= t_max:
            status = 2
            break
        if regime == 1:
            if u[j] < a1dt:
                regime = 2
        elif u[j] < a2dt:
            regime = 1
        p = _rate(x, p1, p2, regime, y, xmin, dx, linear)
        sig = sigma1 if regime == 1 else sigma2
        y = y + p * dt + sig * sqrt_dt * z[j]
        k += 1
        ts[j] = k * dt
        ys[j] = y
        regs[j] = regime
        j += 1
    if status == 0:
        if abs(y) >= R:
            status = 1
        elif k * dt >= t_max:
            status = 2
    return j, y, regime, k, status


def chain_walk(uniforms, a1dt, a2dt, regime, out):
    for j, r in enumerate(uniforms.tolist()):
        if regime == 1:
            if r < a1dt:
                regime = 2
        elif r < a2dt:
            regime = 1
        out[j] = regime
    return regime
