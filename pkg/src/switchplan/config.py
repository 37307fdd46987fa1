"""YAML run configuration: parsing with defaults, validation and round-trip.

Schema (all sections optional except the problem keys)::

    problem:  a1 a2 alpha1 alpha2 sigma1 sigma2 M1 M2 R [c1 c2]
    grid:     n_points
    solver:   eps_conv max_iter mode stop_rule k_strategy
    scan:     n_x n_t n_s
    sim:      dt t_max x0 seed n_paths regime0 interpolation
    output:   dir strict

``c1``/``c2`` default to ``M1``/``M2`` (the costs sit on their caps).
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields

import yaml

from .elliptic_solver import SolverOptions
from .model_types import HoldingCostSpec, RegimeParameters, validate_params
from .regime_sim import SimConfig, validate_sim_config

PROBLEM_KEYS = ("sigma1", "sigma2", "a1", "a2", "alpha1", "alpha2", "M1", "M2", "R")
K_STRATEGIES = ("auto", "lemma", "inequality")
SECTIONS = ("problem", "grid", "solver", "scan", "sim", "output")


class ConfigError(ValueError):
    """Malformed or invalid configuration."""


@dataclass(frozen=True)
class RunConfig:
    params: RegimeParameters
    costs: HoldingCostSpec
    n_points: int = 100
    solver: SolverOptions = field(default_factory=SolverOptions)
    scan: tuple[int, int, int] = (200, 50, 50)
    sim: SimConfig = field(default_factory=SimConfig)
    out_dir: str = "out"
    strict: bool = False
    k_strategy: str = "auto"


def _number(path, value, kind=float):
    if isinstance(value, str):
        # YAML 1.1 reads "1e-6" (no dot) as a string
        try:
            value = float(value)
        except ValueError:
            pass
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if kind is int:
        if isinstance(value, int):
            # exact for 64-bit seeds, which a float would round
            return value
        if not float(value).is_integer():
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        return int(value)
    return float(value)


def _section(doc, name):
    sec = doc.get(name) or {}
    if not isinstance(sec, dict):
        raise ConfigError(f"{name}: expected a mapping")
    return sec


def _reject_unknown(name, sec, allowed):
    extra = sorted(set(sec) - set(allowed))
    if extra:
        raise ConfigError(f"{name}: unknown key(s): {', '.join(map(str, extra))}")


def parse_config(text: str) -> RunConfig:
    """Parse and validate a YAML document."""
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"YAML parse error: {exc}") from None
    doc = {} if doc is None else doc
    if not isinstance(doc, dict):
        raise ConfigError("top level must be a mapping")
    _reject_unknown("<root>", doc, SECTIONS)

    prob = _section(doc, "problem")
    _reject_unknown("problem", prob, PROBLEM_KEYS + ("c1", "c2"))
    for key in PROBLEM_KEYS:
        if key not in prob:
            raise ConfigError(f"missing required key: {key}")
    vals = {k: _number(f"problem.{k}", prob[k]) for k in PROBLEM_KEYS}
    params = RegimeParameters(**vals)
    costs = HoldingCostSpec(
        _number("problem.c1", prob.get("c1", vals["M1"])),
        _number("problem.c2", prob.get("c2", vals["M2"])),
    )
    try:
        validate_params(params, costs)
    except ValueError as exc:
        raise ConfigError(f"problem: {exc}") from None

    grid = _section(doc, "grid")
    _reject_unknown("grid", grid, ("n_points",))
    n_points = _number("grid.n_points", grid.get("n_points", 100), int)
    if n_points < 3:
        raise ConfigError("grid.n_points: must be >= 3")

    sol = _section(doc, "solver")
    _reject_unknown("solver", sol, ("eps_conv", "max_iter", "mode", "stop_rule", "k_strategy"))
    base = SolverOptions()
    try:
        solver = SolverOptions(
            eps_conv=_number("solver.eps_conv", sol.get("eps_conv", base.eps_conv)),
            max_iter=_number("solver.max_iter", sol.get("max_iter", base.max_iter), int),
            mode=str(sol.get("mode", base.mode)),
            stop_rule=str(sol.get("stop_rule", base.stop_rule)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from None
    k_strategy = str(sol.get("k_strategy", "auto"))
    if k_strategy not in K_STRATEGIES:
        raise ConfigError(f"solver.k_strategy: must be one of {K_STRATEGIES}")

    sc = _section(doc, "scan")
    _reject_unknown("scan", sc, ("n_x", "n_t", "n_s"))
    scan = tuple(_number(f"scan.{k}", sc.get(k, d), int)
                 for k, d in (("n_x", 200), ("n_t", 50), ("n_s", 50)))
    if min(scan) < 2:
        raise ConfigError("scan: every resolution must be >= 2")

    sm = _section(doc, "sim")
    names = [f.name for f in fields(SimConfig)]
    _reject_unknown("sim", sm, names)
    sim_base = SimConfig()
    kw = {}
    for name in names:
        default = getattr(sim_base, name)
        v = sm.get(name, default)
        if isinstance(default, str):
            kw[name] = str(v)
        else:
            kw[name] = _number(f"sim.{name}", v, type(default))
    sim = SimConfig(**kw)
    try:
        validate_sim_config(sim, params)
    except ValueError as exc:
        raise ConfigError(f"sim: {exc}") from None

    out = _section(doc, "output")
    _reject_unknown("output", out, ("dir", "strict"))
    strict = out.get("strict", False)
    if not isinstance(strict, bool):
        raise ConfigError("output.strict: expected true or false")

    return RunConfig(params, costs, n_points, solver, scan, sim,
                     str(out.get("dir", "out")), strict, k_strategy)


def config_to_dict(cfg: RunConfig) -> dict:
    p = cfg.params
    problem = {k: getattr(p, k) for k in ("a1", "a2", "alpha1", "alpha2", "sigma1",
                                          "sigma2", "M1", "M2", "R")}
    problem.update(c1=cfg.costs.c1, c2=cfg.costs.c2)
    return {
        "problem": problem,
        "grid": {"n_points": cfg.n_points},
        "solver": {"eps_conv": cfg.solver.eps_conv, "max_iter": cfg.solver.max_iter,
                   "mode": cfg.solver.mode, "stop_rule": cfg.solver.stop_rule,
                   "k_strategy": cfg.k_strategy},
        "scan": dict(zip(("n_x", "n_t", "n_s"), cfg.scan)),
        "sim": {f.name: getattr(cfg.sim, f.name) for f in fields(SimConfig)},
        "output": {"dir": cfg.out_dir, "strict": cfg.strict},
    }


def serialize_config(cfg: RunConfig) -> str:
    # PyYAML writes floats with repr(), which round-trips binary64 exactly
    return yaml.safe_dump(config_to_dict(cfg), sort_keys=False)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)
