"""Time the compiled kernels against the NumPy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--json out.json]

Each case is run on identical inputs with both backends; the best of
``--repeat`` wall-clock timings is reported with the speed-up and the
largest difference between the two results.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from switchplan import _fallback
from switchplan.analysis import SCENARIOS
from switchplan.coupling import CouplingCoefficients, compute_lambdas
from switchplan.elliptic_solver import subsolution_profile
from switchplan.k_solver import resolve_exponents
from switchplan.model_types import build_grid

try:
    from switchplan import _kernels
except ImportError:  # extension not built
    _kernels = None


def relax_case(n_points: int, sweeps: int):
    spec = SCENARIOS["s1"]
    p, c = spec.params, spec.costs
    grid = build_grid(p.R, n_points)
    kp = resolve_exponents(p, c)
    lam = compute_lambdas(p, c, kp)
    cc = CouplingCoefficients.from_params(p)
    F1 = np.ascontiguousarray(cc.forcing(c, 1, grid.x))
    F2 = np.ascontiguousarray(cc.forcing(c, 2, grid.x))
    lo1, lo2 = subsolution_profile(grid, kp)

    def run(mod):
        u1, u2 = lo1.copy(), lo2.copy()
        lu1, lu2 = np.log(u1), np.log(u2)
        lu1[[0, -1]] = 0.0
        lu2[[0, -1]] = 0.0
        mod.relax(u1, u2, lu1, lu2, F1, F2, cc.own1, cc.cross1, cc.own2, cc.cross2,
                  lam.lambda1, lam.lambda2, grid.dx, lo1, lo2, 0.0, sweeps, 1, True)
        return np.concatenate([lu1, lu2])

    return f"relax n={n_points} sweeps={sweeps}", run


def path_case(n_steps: int):
    grid = build_grid(10.0, 100)
    p1 = -0.5 * grid.x
    p2 = -0.3 * grid.x
    rng = np.random.default_rng(7)
    uniforms = rng.random(n_steps)
    normals = rng.standard_normal(n_steps)

    def run(mod):
        ts = np.empty(n_steps)
        ys = np.empty(n_steps)
        rs = np.empty(n_steps, dtype=np.int64)
        mod.advance_path(0.0, 1, 0, uniforms, normals, np.ascontiguousarray(grid.x), p1, p2,
                         10.0, 1.0, 0.7, 0.006, 0.005, 0.01, 0.1, 1e12, False, ts, ys, rs)
        return ys

    return f"advance_path steps={n_steps}", run


def chain_case(n_steps: int):
    uniforms = np.random.default_rng(3).random(n_steps)

    def run(mod):
        out = np.empty(n_steps, dtype=np.int64)
        mod.chain_walk(uniforms, 0.006, 0.005, 1, out)
        return out.astype(float)

    return f"chain_walk steps={n_steps}", run


def best_time(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", help="also write the results to this file")
    args = ap.parse_args(argv)
    if _kernels is None:
        raise SystemExit("compiled extension not available; build with pip install -e .")

    cases = [relax_case(100, 2000), relax_case(397, 2000), path_case(200_000), chain_case(1_000_000)]
    rows = []
    print(f"{'case':34s} {'compiled s':>11s} {'fallback s':>11s} {'speed-up':>9s} {'max diff':>10s}")
    for name, run in cases:
        tc, rc = best_time(lambda: run(_kernels), args.repeat)
        tf, rf = best_time(lambda: run(_fallback), args.repeat)
        diff = float(np.max(np.abs(rc - rf)))
        rows.append({"case": name, "compiled_s": tc, "fallback_s": tf,
                     "speedup": tf / tc, "max_abs_diff": diff})
        print(f"{name:34s} {tc:11.4f} {tf:11.4f} {tf / tc:9.1f} {diff:10.2e}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
