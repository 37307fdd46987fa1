"""Command-line entry point ``switchplan``.

Exit codes: 0 success, 1 numerical or I/O failure (or a failed check under
``--strict``), 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import io
from .analysis import ScenarioSpec, regime_comparison, run_sensitivity_scenario
from .config import ConfigError, RunConfig, load_config
from .k_solver import KSolveError
from .model_types import ParameterError
from .pipeline import run_pipeline
from .regime_sim import ensemble_stats, simulate_path

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="switchplan", description="Two-regime production planning solver.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("config", help="YAML run configuration")
        p.add_argument("--out", help="output directory (overrides output.dir)")
        p.add_argument("--strict", action="store_true",
                       help="fail with exit 1 on bound or dominance violations")

    common(sub.add_parser("solve", help="solve and write fields, metadata and plots"))
    common(sub.add_parser("simulate", help="solve, then simulate inventory paths"))
    p = sub.add_parser("sensitivity", help="check z1 >= z2 for scenario s1, s2 or s3")
    common(p)
    p.add_argument("--scenario", required=True, choices=("s1", "s2", "s3"))
    common(sub.add_parser("compare", help="check the static/switching chain (s4)"))
    return parser


def _out_dir(cfg: RunConfig, args) -> Path:
    return Path(args.out if args.out else cfg.out_dir)


def _spec(cfg: RunConfig, scenario: str) -> ScenarioSpec:
    return ScenarioSpec(scenario, cfg.params, cfg.costs, cfg.n_points, cfg.solver, cfg.scan,
                        cfg.k_strategy)


def _solve(cfg: RunConfig, out: Path):
    res = run_pipeline(cfg.params, cfg.costs, cfg.n_points, cfg.solver, cfg.scan,
                       k_strategy=cfg.k_strategy)
    io.write_fields_csv(res.policy, res.report, out / "fields.csv", kp=res.kp, lambdas=res.lambdas)
    return res


def _cmd_solve(cfg, out, strict):
    res = _solve(cfg, out)
    io.render_plots(res.policy, None, out)
    print(f"converged={res.report.converged} iterations={res.report.iterations} "
          f"K1={res.kp.K1:.10g} K2={res.kp.K2:.10g} K_source={res.kp.source} "
          f"bounds_ok={res.bounds.passed}")
    if not res.report.converged:
        return EXIT_FAILURE
    if strict and not res.bounds.passed:
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_simulate(cfg, out, strict):
    res = _solve(cfg, out)
    if not res.report.converged:
        print("solver did not converge; no simulation run", file=sys.stderr)
        return EXIT_FAILURE
    first = simulate_path(res.policy, cfg.params, cfg.sim)
    io.write_trajectory_csv(first, out / "trajectory.csv")
    io.render_plots(res.policy, first, out)
    stats = ensemble_stats(res.policy, cfg.params, cfg.sim)
    io.write_meta(out / "ensemble.meta", {
        "n_paths": cfg.sim.n_paths,
        "seed": cfg.sim.seed,
        "boundary_fraction": stats.boundary_fraction,
        "mean_exit_time": stats.mean_exit_time,
        "var_exit_time": stats.var_exit_time,
        "regime1_fraction": stats.regime1_fraction,
        "mean_abs_y": stats.mean_abs_y,
        "final_histogram_counts": [int(c) for c in stats.histogram_counts],
        "final_histogram_edges": [float(e) for e in stats.histogram_edges],
    })
    print(f"paths={cfg.sim.n_paths} boundary_fraction={stats.boundary_fraction:.6g} "
          f"mean_exit_time={stats.mean_exit_time:.6g}")
    if strict and not res.bounds.passed:
        return EXIT_FAILURE
    return EXIT_OK


def _report_line(rep):
    status = "PASS" if rep.passed else "FAIL"
    return f"{status} {rep.label}: max_violation={rep.max_violation:.6g} violating_nodes={rep.violating_nodes}"


def _cmd_sensitivity(cfg, out, strict, scenario):
    rep, res = run_sensitivity_scenario(_spec(cfg, scenario))
    io.write_fields_csv(res.policy, res.report, out / "fields.csv", kp=res.kp, lambdas=res.lambdas)
    io.render_plots(res.policy, None, out)
    io.write_meta(out / "dominance.meta", {
        "scenario": scenario, "check": rep.label, "max_violation": rep.max_violation,
        "violating_nodes": rep.violating_nodes, "tolerance": rep.tolerance, "passed": rep.passed,
    })
    print(_report_line(rep))
    if not res.report.converged:
        return EXIT_FAILURE
    if strict and not rep.passed:
        return EXIT_FAILURE
    return EXIT_OK


def _cmd_compare(cfg, out, strict):
    rep = regime_comparison(_spec(cfg, "s4"))
    meta = {"converged": rep.converged}
    for i, link in enumerate(rep.links, 1):
        meta.update({f"link{i}": link.label, f"link{i}_max_violation": link.max_violation,
                     f"link{i}_passed": link.passed})
        print(_report_line(link))
    io.write_meta(out / "comparison.meta", meta)
    io.render_plots(rep.coupled, None, out)
    if not rep.converged:
        return EXIT_FAILURE
    if strict and not rep.passed:
        return EXIT_FAILURE
    return EXIT_OK


def run_command(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    if not argv:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if isinstance(exc.code, int) else EXIT_USAGE
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE
    try:
        cfg = load_config(args.config)
        if args.strict:
            cfg = replace(cfg, strict=True)
        out = _out_dir(cfg, args)
        if args.command == "solve":
            return _cmd_solve(cfg, out, cfg.strict)
        if args.command == "simulate":
            return _cmd_simulate(cfg, out, cfg.strict)
        if args.command == "sensitivity":
            return _cmd_sensitivity(cfg, out, cfg.strict, args.scenario)
        return _cmd_compare(cfg, out, cfg.strict)
    except (ConfigError, ParameterError) as exc:
        print(f"switchplan: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KSolveError, FloatingPointError) as exc:
        print(f"switchplan: numerical failure: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as exc:
        print(f"switchplan: {exc}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
