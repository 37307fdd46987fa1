"""CSV, metadata sidecars and SVG figures."""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .value_recovery import PolicyResult

FIELD_COLUMNS = ("x", "u1", "u2", "z1", "z2", "B1", "B2", "p1", "p2")


def _fmt(v) -> str:
    return "%.17g" % v


def _write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write {path}: {exc.strerror}") from None
    return path


def fields_table(policy: PolicyResult) -> np.ndarray:
    if policy.u1 is None or policy.u2 is None:
        raise ValueError("policy carries no u fields; build it with assemble_policy")
    cols = (policy.grid.x, policy.u1, policy.u2, policy.z1, policy.z2, policy.B1, policy.B2,
            policy.p1, policy.p2)
    return np.column_stack([np.asarray(c, dtype=float) for c in cols])


def write_meta(path, items: dict) -> Path:
    """``key = value`` lines in insertion order."""
    lines = []
    for key, value in items.items():
        if isinstance(value, float):
            value = _fmt(value)
        elif isinstance(value, (tuple, list)):
            value = ", ".join(_fmt(v) if isinstance(v, float) else str(v) for v in value)
        lines.append(f"{key} = {value}")
    return _write_text(path, "\n".join(lines) + "\n")


def write_fields_csv(policy: PolicyResult, report, path, *, kp=None, lambdas=None) -> Path:
    """Write the node table and a ``.meta`` sidecar next to it."""
    table = fields_table(policy)
    rows = [",".join(FIELD_COLUMNS)]
    rows += [",".join(_fmt(v) for v in row) for row in table]
    path = _write_text(path, "\n".join(rows) + "\n")
    meta = {}
    if kp is not None:
        meta.update(K1=kp.K1, K2=kp.K2, K_source=kp.source)
    if lambdas is not None:
        meta.update(Lambda1=lambdas.lambda1, Lambda2=lambdas.lambda2)
    if report is not None:
        meta.update(
            converged=report.converged,
            iterations=report.iterations,
            mode=report.mode,
            stop_rule=report.stop_rule,
            final_log_delta=report.final_log_delta,
            residual1=report.residual_norm[0],
            residual2=report.residual_norm[1],
        )
    write_meta(path.with_suffix(".meta"), meta)
    return path


def write_trajectory_csv(traj, path) -> Path:
    rows = ["t,y,regime"]
    rows += [f"{_fmt(t)},{_fmt(y)},{int(r)}" for t, y, r in zip(traj.t, traj.y, traj.regime)]
    return _write_text(path, "\n".join(rows) + "\n")


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "switchplan"
    plt.rcParams["svg.fonttype"] = "none"
    return plt


def render_plots(policy: PolicyResult, trajectory=None, out_dir=".", *, R: float | None = None) -> list[Path]:
    """``policy.svg`` (values with bounds; rates) and, if given, ``trajectory.svg``."""
    plt = _pyplot()
    out_dir = Path(out_dir)
    os.makedirs(out_dir, exist_ok=True)
    x = policy.grid.x
    written = []

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    ax1.plot(x, policy.z1, label="z1")
    ax1.plot(x, policy.z2, label="z2")
    ax1.plot(x, policy.B1, "--", label="B1")
    ax1.plot(x, policy.B2, "--", label="B2")
    ax1.set_xlabel("x")
    ax1.set_title("value functions and bounds")
    ax1.legend()
    ax2.plot(x, policy.p1, label="p1")
    ax2.plot(x, policy.p2, label="p2")
    ax2.set_xlabel("x")
    ax2.set_title("optimal production rates")
    ax2.legend()
    fig.tight_layout()
    path = out_dir / "policy.svg"
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    written.append(path)

    if trajectory is not None:
        R = policy.grid.R if R is None else R
        fig, ax = plt.subplots(figsize=(8, 4))
        ax.plot(trajectory.t, trajectory.y, lw=0.8)
        for level in (R, -R):
            ax.axhline(level, color="k", ls=":")
        ax.set_xlabel("t")
        ax.set_ylabel("y")
        ax.set_title("inventory path")
        path = out_dir / "trajectory.svg"
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)
        written.append(path)
    return written
