# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.

Must stay operation-for-operation equivalent to ``_fallback``; the test
suite runs both and compares.
"""

from libc.math cimport log, fabs, floor, INFINITY

cdef double MONO_SLACK = 1e-12


def relax(double[::1] u1, double[::1] u2, double[::1] lu1, double[::1] lu2,
          const double[::1] F1, const double[::1] F2,
          double own1, double cross1, double own2, double cross2,
          double lam1, double lam2, double dx,
          const double[::1] floor1, const double[::1] floor2,
          double eps, long max_iter, int stop_rule, bint audit_monotone):
    """Gauss-Seidel relaxation sweeps, in place, until the stop rule fires.

    ``stop_rule`` 0: max |u^k - u^(k-1)| < eps for both fields.
    ``stop_rule`` 1: the same in ln u, plus the geometric tail estimate
    ``delta * rho / (1 - rho) < eps`` with ``rho`` the last delta ratio.

    Returns (iterations, converged, delta1, delta2, delta_log,
    monotone_violations, bracket_violations, status); status -1 flags a
    non-positive or non-finite iterate.
    """
    cdef Py_ssize_t n = u1.shape[0]
    cdef Py_ssize_t i
    cdef long k = 0
    cdef double dx2 = dx * dx
    cdef double den1 = -2.0 / dx2 + lam1
    cdef double den2 = -2.0 / dx2 + lam2
    cdef double t, s, lt, ls, g1, g2, v1, v2, lv1, lv2
    cdef double d1 = 0.0, d2 = 0.0, dl = 0.0, prev = INFINITY, rho
    cdef long mono = 0, brk = 0
    cdef int converged = 0, status = 0

    with nogil:
        while k < max_iter:
            k += 1
            d1 = 0.0
            d2 = 0.0
            dl = 0.0
            for i in range(1, n - 1):
                t = u1[i]
                s = u2[i]
                lt = lu1[i]
                ls = lu2[i]
                g1 = t * (F1[i] + own1 * lt - cross1 * ls)
                g2 = s * (F2[i] + own2 * ls - cross2 * lt)
                v1 = (g1 + lam1 * t - (u1[i - 1] + u1[i + 1]) / dx2) / den1
                v2 = (g2 + lam2 * s - (u2[i - 1] + u2[i + 1]) / dx2) / den2
                if not (v1 > 0.0 and v2 > 0.0 and v1 < INFINITY and v2 < INFINITY):
                    status = -1
                    break
                lv1 = log(v1)
                lv2 = log(v2)
                if audit_monotone:
                    if v1 < t * (1.0 - MONO_SLACK):
                        mono += 1
                    if v2 < s * (1.0 - MONO_SLACK):
                        mono += 1
                if v1 < floor1[i] * (1.0 - MONO_SLACK) or v1 > 1.0 + MONO_SLACK:
                    brk += 1
                if v2 < floor2[i] * (1.0 - MONO_SLACK) or v2 > 1.0 + MONO_SLACK:
                    brk += 1
                d1 = max(d1, fabs(v1 - t))
                d2 = max(d2, fabs(v2 - s))
                dl = max(dl, max(fabs(lv1 - lt), fabs(lv2 - ls)))
                u1[i] = v1
                u2[i] = v2
                lu1[i] = lv1
                lu2[i] = lv2
            if status != 0:
                break
            if stop_rule == 0:
                if d1 < eps and d2 < eps:
                    converged = 1
                    break
            else:
                if dl == 0.0:
                    converged = 1
                    break
                rho = dl / prev
                prev = dl
                if dl < eps and rho < 1.0 and dl * rho / (1.0 - rho) < eps:
                    converged = 1
                    break
    return k, bool(converged), d1, d2, dl, mono, brk, status


cdef inline double _rate(const double[::1] x, const double[::1] p1, const double[::1] p2,
                         int regime, double y, double xmin, double dx, bint linear) nogil:
    cdef Py_ssize_t n = x.shape[0]
    cdef Py_ssize_t j = <Py_ssize_t>floor((y - xmin) / dx)
    cdef double w
    if j < 0:
        j = 0
    elif j > n - 2:
        j = n - 2
    if linear:
        w = (y - x[j]) / (x[j + 1] - x[j])
        if regime == 1:
            return p1[j] + w * (p1[j + 1] - p1[j])
        return p2[j] + w * (p2[j + 1] - p2[j])
    if fabs(y - x[j]) > fabs(x[j + 1] - y):
        j = j + 1
    if regime == 1:
        return p1[j]
    return p2[j]


def advance_path(double y, int regime, long k,
                 const double[::1] uniforms, const double[::1] normals,
                 const double[::1] x, const double[::1] p1, const double[::1] p2,
                 double R, double sigma1, double sigma2, double a1dt, double a2dt,
                 double dt, double sqrt_dt, double t_max, bint linear,
                 double[::1] ts, double[::1] ys, long[::1] regs):
    """Advance one Euler-Maruyama path over a chunk of pre-drawn variates.

    Returns (steps_taken, y, regime, k, status) with status 0 = still
    running, 1 = boundary exit, 2 = horizon reached.
    """
    cdef Py_ssize_t m = uniforms.shape[0]
    cdef Py_ssize_t j = 0
    cdef double xmin = x[0]
    cdef double dx = (x[x.shape[0] - 1] - x[0]) / (x.shape[0] - 1)
    cdef double p, sig
    cdef int status = 0
    with nogil:
        while j < m:
            if fabs(y) >= R:
                status = 1
                break
            if k * dt >= t_max:
                status = 2
                break
            if regime == 1:
                if uniforms[j] < a1dt:
                    regime = 2
            else:
                if uniforms[j] < a2dt:
                    regime = 1
            p = _rate(x, p1, p2, regime, y, xmin, dx, linear)
            sig = sigma1 if regime == 1 else sigma2
            y = y + p * dt + sig * sqrt_dt * normals[j]
            k += 1
            ts[j] = k * dt
            ys[j] = y
            regs[j] = regime
            j += 1
        if status == 0:
            if fabs(y) >= R:
                status = 1
            elif k * dt >= t_max:
                status = 2
    return j, y, regime, k, status


def chain_walk(const double[::1] uniforms, double a1dt, double a2dt, int regime,
               long[::1] out):
    """Regime sequence driven by one uniform per step."""
    cdef Py_ssize_t j
    cdef Py_ssize_t m = uniforms.shape[0]
    with nogil:
        for j in range(m):
            if regime == 1:
                if uniforms[j] < a1dt:
                    regime = 2
            else:
                if uniforms[j] < a2dt:
                    regime = 1
            out[j] = regime
    return regime
