"""Euler-Maruyama simulation of the controlled inventory under regime switching.

Each step first updates the regime (one uniform draw), then moves the
inventory with the feedback rate of the new regime (one normal draw).
Path ``k`` of an ensemble uses ``numpy.random.default_rng(seed + k)``;
variates are drawn in fixed-size chunks, uniforms before normals, so a
path is a pure function of ``(seed, config, policy)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .model_types import RegimeParameters
from .value_recovery import PolicyResult

CHUNK = 4096


@dataclass(frozen=True)
class SimConfig:
    dt: float = 0.01
    t_max: float = 100.0
    x0: float = 0.0
    seed: int = 0
    n_paths: int = 1
    regime0: int = 1
    interpolation: str = "nearest"


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    regime: np.ndarray
    stopped: bool
    stop_time: float | None
    stop_reason: str

    @property
    def samples(self):
        return list(zip(self.t.tolist(), self.y.tolist(), self.regime.tolist()))


@dataclass
class EnsembleSummary:
    stop_times: np.ndarray
    stop_reasons: list[str]
    mean_exit_time: float
    var_exit_time: float
    boundary_fraction: float
    regime1_fraction: float
    regime2_fraction: float
    histogram_counts: np.ndarray
    histogram_edges: np.ndarray
    mean_abs_y: float
    trajectories: list[Trajectory] = field(default_factory=list, repr=False)


def validate_sim_config(config: SimConfig, params: RegimeParameters) -> SimConfig:
    if not config.dt > 0 or not config.dt <= config.t_max:
        raise ValueError("need 0 < dt <= t_max")
    if not abs(config.x0) < params.R:
        raise ValueError("initial inventory must satisfy |x0| < R")
    if params.a1 * config.dt >= 1 or params.a2 * config.dt >= 1:
        raise ValueError("a_i * dt must be < 1 for valid switching probabilities")
    if config.regime0 not in (1, 2):
        raise ValueError("regime0 must be 1 or 2")
    if config.interpolation not in ("nearest", "linear"):
        raise ValueError("interpolation must be 'nearest' or 'linear'")
    if int(config.n_paths) < 1:
        raise ValueError("n_paths must be >= 1")
    return config


def step_regime(current: int, dt: float, a1: float, a2: float, uniform_draw: float) -> int:
    if current == 1:
        return 2 if uniform_draw < a1 * dt else 1
    if current == 2:
        return 1 if uniform_draw < a2 * dt else 2
    raise ValueError(f"regime must be 1 or 2, got {current!r}")


def interpolate_rate(policy: PolicyResult, y: float, regime: int, *, linear: bool = False) -> float:
    """Nearest-node lookup (ties go to the lower index), or linear."""
    grid = policy.grid
    if abs(y) > grid.R:
        raise ValueError("|y| must be <= R")
    if regime not in (1, 2):
        raise ValueError(f"regime must be 1 or 2, got {regime!r}")
    x = grid.x
    j = min(max(math.floor((y - x[0]) / grid.dx), 0), grid.n_points - 2)
    p = policy.p1 if regime == 1 else policy.p2
    if linear:
        w = (y - x[j]) / (x[j + 1] - x[j])
        return float(p[j] + w * (p[j + 1] - p[j]))
    if abs(y - x[j]) > abs(x[j + 1] - y):
        j += 1
    return float(p[j])


def simulate_path(policy: PolicyResult, params: RegimeParameters, config: SimConfig,
                  *, seed: int | None = None) -> Trajectory:
    """Run one path until ``|y| >= R`` or ``t >= t_max``."""
    validate_sim_config(config, params)
    if not math.isclose(policy.grid.R, params.R):
        raise ValueError("policy grid radius differs from params.R")
    rng = np.random.default_rng(config.seed if seed is None else seed)
    x = np.ascontiguousarray(policy.grid.x, dtype=float)
    p1 = np.ascontiguousarray(policy.p1, dtype=float)
    p2 = np.ascontiguousarray(policy.p2, dtype=float)
    dt = float(config.dt)
    sqrt_dt = math.sqrt(dt)
    linear = config.interpolation == "linear"
    y, regime, k, status = float(config.x0), int(config.regime0), 0, 0
    ts, ys, rs = [np.zeros(1)], [np.array([y])], [np.array([regime], dtype=np.int64)]
    while status == 0:
        uniforms = rng.random(CHUNK)
        normals = rng.standard_normal(CHUNK)
        bt = np.empty(CHUNK)
        by = np.empty(CHUNK)
        br = np.empty(CHUNK, dtype=np.int64)
        n, y, regime, k, status = kernels.advance_path(
            y, regime, k, uniforms, normals, x, p1, p2,
            float(params.R), float(params.sigma1), float(params.sigma2),
            float(params.a1) * dt, float(params.a2) * dt, dt, sqrt_dt,
            float(config.t_max), linear, bt, by, br,
        )
        ts.append(bt[:n])
        ys.append(by[:n])
        rs.append(br[:n])
    t = np.concatenate(ts)
    reason = "boundary" if status == 1 else "horizon"
    return Trajectory(
        t=t,
        y=np.concatenate(ys),
        regime=np.concatenate(rs),
        stopped=True,
        stop_time=float(t[-1]),
        stop_reason=reason,
    )


def simulate_regimes(a1: float, a2: float, dt: float, n_steps: int, seed: int = 0,
                     regime0: int = 1) -> np.ndarray:
    """Regime labels of the discretised chain alone, one uniform per step."""
    if a1 * dt >= 1 or a2 * dt >= 1:
        raise ValueError("a_i * dt must be < 1")
    rng = np.random.default_rng(seed)
    out = np.empty(n_steps, dtype=np.int64)
    regime = int(regime0)
    for start in range(0, n_steps, CHUNK):
        stop = min(start + CHUNK, n_steps)
        chunk = np.empty(stop - start, dtype=np.int64)
        regime = kernels.chain_walk(rng.random(stop - start), a1 * dt, a2 * dt, regime, chunk)
        out[start:stop] = chunk
    return out


def ensemble_stats(policy: PolicyResult, params: RegimeParameters, config: SimConfig,
                   *, keep_paths: bool = False, n_bins: int = 20) -> EnsembleSummary:
    """Aggregate ``n_paths`` independent paths (seeds ``seed + k``)."""
    validate_sim_config(config, params)
    stop_times = np.empty(config.n_paths)
    reasons: list[str] = []
    finals = np.empty(config.n_paths)
    regime1_steps = 0
    total_steps = 0
    abs_y_sum = 0.0
    abs_y_count = 0
    kept = []
    for k in range(config.n_paths):
        traj = simulate_path(policy, params, config, seed=config.seed + k)
        stop_times[k] = traj.stop_time
        reasons.append(traj.stop_reason)
        finals[k] = traj.y[-1]
        # regime in force during each step
        regime1_steps += int(np.count_nonzero(traj.regime[1:] == 1))
        total_steps += len(traj.regime) - 1
        abs_y_sum += float(np.sum(np.abs(traj.y)))
        abs_y_count += len(traj.y)
        if keep_paths:
            kept.append(traj)
    exits = stop_times[[r == "boundary" for r in reasons]]
    R = params.R
    counts, edges = np.histogram(np.clip(finals, -R, R), bins=n_bins, range=(-R, R))
    r1 = regime1_steps / total_steps if total_steps else float(config.regime0 == 1)
    return EnsembleSummary(
        stop_times=stop_times,
        stop_reasons=reasons,
        mean_exit_time=float(np.mean(exits)) if exits.size else math.nan,
        var_exit_time=float(np.var(exits, ddof=1)) if exits.size > 1 else math.nan,
        boundary_fraction=exits.size / config.n_paths,
        regime1_fraction=r1,
        regime2_fraction=1.0 - r1,
        histogram_counts=counts,
        histogram_edges=edges,
        mean_abs_y=abs_y_sum / abs_y_count,
        trajectories=kept,
    )
