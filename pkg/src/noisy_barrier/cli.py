"""Command-line experiment driver.

Subcommands:

* ``noisy-barrier run <config>``: execute one experiment described by a
  flat ``key = value`` config file and write CSV artifacts (plus one PNG
  per experiment) into the output directory.
* ``noisy-barrier list``: print the built-in problems.

Experiment kinds: ``solve`` (continuation runs with per-iteration
trajectories), ``stoptest`` (fixed-mu stopping-test studies), ``activeset``
(fixed-mu active-set identification), ``radii`` (closed-form attraction
radius sweeps and noise-level maps), ``scatter`` (last-iterate clouds with
noisy and true gradients).

Re-running a config reproduces every CSV byte for byte; floats are printed
with 17 significant digits and files use LF line endings.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import figures
from .analysis import NoCrossing, active_set_report, constants_illustrative, radii_sweep
from .barrier import HessianMode, RegularizationFailed
from .linalg import NotPositiveDefinite
from .noise import GradModel, NoiseSpec, NoisyOracle
from .step import HalvingCapExceeded
from .problems import (
    Problem,
    UnknownProblem,
    harkerp2,
    illustrative,
    lookup,
    registry,
    synthetic_quadratic,
)
from .solver import (
    FixedMu,
    Heuristic,
    MuStrategy,
    Periodic,
    SolverConfig,
    StoppingTestOnly,
    Trajectory,
    solve_continuation,
    solve_fixed_mu,
    trajectory_csv,
)

MAX_DIMENSION = 2000
KINDS = ("solve", "stoptest", "activeset", "radii", "scatter")


class ConfigError(ValueError):
    """Raised for unreadable, unknown, or out-of-range config entries."""


@dataclass
class ExperimentConfig:
    kind: str
    problem: Problem
    noise: NoiseSpec
    solver: SolverConfig
    seeds: list[int]
    name: str
    out: str
    mu: float
    radii_mu: float
    radii_eps_g: float
    radii_eps_h: float
    grid_eps_g_max: float
    grid_eps_h_max: float
    grid_points: int


def parse_config_text(text: str) -> dict[str, str]:
    """Flat `key = value` lines; `#` starts a comment; later keys may not repeat."""
    entries: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        if key in entries:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        entries[key] = value
    return entries


def _take(entries: dict[str, str], key: str, parse: Callable, default=None):
    if key not in entries:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    raw = entries.pop(key)
    try:
        return parse(raw)
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"key {key!r}: cannot parse {raw!r} ({exc})") from None


def _parse_bool(raw: str) -> bool:
    low = raw.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise ValueError("expected true/false")


def _parse_float_list(raw: str) -> list[float]:
    return [float(tok) for tok in raw.split(",") if tok.strip()]


def _parse_int_list(raw: str) -> list[int]:
    return [int(tok) for tok in raw.split(",") if tok.strip()]


def _build_problem(entries: dict[str, str]) -> Problem:
    name = _take(entries, "problem", str)
    if name == "harkerp2":
        n = _take(entries, "problem.n", int)
        return harkerp2(n)
    if name == "illustrative":
        c1 = _take(entries, "problem.c1", float, default=1.0)
        c2 = _take(entries, "problem.c2", float, default=1.0)
        return illustrative(c1, c2)
    if name == "synthetic-quadratic":
        diag = _take(entries, "problem.diag", _parse_float_list)
        shift = _take(entries, "problem.shift", _parse_float_list)
        if len(diag) != len(shift):
            raise ConfigError("problem.diag and problem.shift must have equal length")
        return synthetic_quadratic(len(diag), diag=diag, shift=shift)
    try:
        return lookup(name)
    except UnknownProblem:
        raise ConfigError(
            f"unknown problem {name!r}; see `noisy-barrier list`"
        ) from None


def _build_noise(entries: dict[str, str]) -> NoiseSpec:
    model = _take(entries, "noise.grad_model", GradModel, default=GradModel.SPHERE_SURFACE)
    try:
        return NoiseSpec(
            eps_f=_take(entries, "noise.eps_f", float, default=0.0),
            eps_g=_take(entries, "noise.eps_g", float, default=0.0),
            eps_h=_take(entries, "noise.eps_h", float, default=0.0),
            grad_model=model,
            seed=_take(entries, "noise.seed", int, default=0),
        )
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}") from None


def _build_strategy(entries: dict[str, str]) -> MuStrategy:
    name = _take(entries, "solver.mu_strategy", str, default="heuristic")
    period = _take(entries, "solver.period", int, default=40)
    if name == "heuristic":
        return Heuristic()
    if name == "periodic":
        return Periodic(period)
    if name == "stopping_test":
        return StoppingTestOnly()
    if name == "fixed":
        return FixedMu()
    raise ConfigError(
        f"unknown solver.mu_strategy {name!r}; "
        "expected heuristic, periodic, stopping_test, or fixed"
    )


def _build_solver(entries: dict[str, str]) -> SolverConfig:
    strategy = _build_strategy(entries)
    mode = _take(
        entries, "solver.hessian_mode", HessianMode, default=HessianMode.PRIMAL_DUAL
    )
    try:
        return SolverConfig(
            eps_r=_take(entries, "solver.eps_r", float),
            nu=_take(entries, "solver.nu", float, default=1e-6),
            tau=_take(entries, "solver.tau", float, default=0.995),
            tau_min=_take(entries, "solver.tau_min", float, default=0.99),
            gamma=_take(entries, "solver.gamma", float, default=0.99),
            kappa_sigma=_take(entries, "solver.kappa_sigma", float, default=1e4),
            kappa_mu=_take(entries, "solver.kappa_mu", float, default=10.0),
            kappa_dec=_take(entries, "solver.kappa_dec", float, default=0.1),
            n_mu=_take(entries, "solver.n_mu", int, default=10),
            mu0=_take(entries, "solver.mu0", float, default=0.1),
            mu_min=_take(entries, "solver.mu_min", float, default=1e-8),
            max_inner=_take(entries, "solver.max_inner", int, default=5000),
            hessian_mode=mode,
            mu_strategy=strategy,
            adaptive_nu=_take(entries, "solver.adaptive_nu", _parse_bool, default=True),
        )
    except ValueError as exc:
        raise ConfigError(f"solver: {exc}") from None


def build_config(entries: dict[str, str]) -> ExperimentConfig:
    """Validate the parsed entries and assemble the full experiment setup."""
    kind = _take(entries, "kind", str)
    if kind not in KINDS:
        raise ConfigError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")
    needs_solver = kind != "radii"
    problem = _build_problem(entries)
    if problem.n > MAX_DIMENSION:
        raise ConfigError(
            f"problem dimension {problem.n} exceeds the dense-algebra cap {MAX_DIMENSION}"
        )
    noise = _build_noise(entries)
    if needs_solver:
        solver = _build_solver(entries)
        solver.validate_against(noise)
    else:
        # radii is closed-form arithmetic; a placeholder keeps the type simple
        solver = SolverConfig(eps_r=1.0)
        for key in list(entries):
            if key.startswith("solver."):
                entries.pop(key)
    cfg = ExperimentConfig(
        kind=kind,
        problem=problem,
        noise=noise,
        solver=solver,
        seeds=_take(entries, "seeds", _parse_int_list, default=[noise.seed]),
        name=_take(entries, "name", str, default=f"{kind}-{problem.name}"),
        out=_take(entries, "out", str, default="."),
        mu=_take(entries, "mu", float, default=0.1),
        radii_mu=_take(entries, "radii.mu", float, default=1e-6),
        radii_eps_g=_take(entries, "radii.eps_g", float, default=0.02),
        radii_eps_h=_take(entries, "radii.eps_h", float, default=0.01),
        grid_eps_g_max=_take(entries, "radii.grid_eps_g_max", float, default=0.05),
        grid_eps_h_max=_take(entries, "radii.grid_eps_h_max", float, default=0.05),
        grid_points=_take(entries, "radii.grid_points", int, default=6),
    )
    if entries:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(entries))}")
    if not cfg.seeds:
        raise ConfigError("seeds list is empty")
    if cfg.mu <= 0 or cfg.radii_mu <= 0:
        raise ConfigError("mu values must be positive")
    if cfg.kind == "activeset" and cfg.problem.solution is None:
        raise ConfigError(f"problem {cfg.problem.name} carries no solution metadata")
    if cfg.kind == "scatter" and cfg.problem.n < 2:
        raise ConfigError("scatter needs a problem with at least two variables")
    return cfg


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


class ArtifactSink:
    """Tracks written files so a failed run can remove its partial output."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.written: list[Path] = []

    def path(self, filename: str) -> Path:
        p = self.out_dir / filename
        self.written.append(p)
        return p

    def csv(self, filename: str, header: list[str], rows) -> Path:
        p = self.path(filename)
        lines = [",".join(header)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        p.write_text("\n".join(lines) + "\n", newline="\n")
        return p

    def text(self, filename: str, content: str) -> Path:
        p = self.path(filename)
        p.write_text(content, newline="\n")
        return p

    def discard_all(self) -> None:
        for p in self.written:
            try:
                p.unlink()
            except FileNotFoundError:
                pass


def _oracle_for_seed(cfg: ExperimentConfig, seed: int) -> NoisyOracle:
    spec = NoiseSpec(
        eps_f=cfg.noise.eps_f,
        eps_g=cfg.noise.eps_g,
        eps_h=cfg.noise.eps_h,
        grad_model=cfg.noise.grad_model,
        seed=seed,
    )
    return NoisyOracle(cfg.problem, spec)


def _geomean(values: np.ndarray) -> float:
    with np.errstate(divide="ignore"):
        return float(np.exp(np.mean(np.log(values))))


def _run_solve(cfg: ExperimentConfig, sink: ArtifactSink) -> None:
    summary_rows = []
    traces = []
    for seed in cfg.seeds:
        oracle = _oracle_for_seed(cfg, seed)
        traj = solve_continuation(oracle, cfg.solver)
        sink.text(f"{cfg.name}_seed{seed}_trajectory.csv", trajectory_csv(traj))
        first, last = traj.records[0], traj.records[-1]
        summary_rows.append(
            [
                seed,
                traj.termination,
                len(traj),
                last.f_evals,
                first.grad_tilde_norm,
                last.grad_tilde_norm,
                first.grad_tilde_scaled,
                last.grad_tilde_scaled,
                last.t1,
                last.t2,
            ]
        )
        traces.append((f"seed {seed}", [r.grad_tilde_scaled for r in traj.records]))
    sink.csv(
        f"{cfg.name}_summary.csv",
        [
            "seed", "termination", "ter", "f_evals", "grad_norm_first",
            "grad_norm_last", "grad_scaled_first", "grad_scaled_last",
            "t1_last", "t2_last",
        ],
        summary_rows,
    )
    figures.save_solve_trace(sink.path(f"{cfg.name}_trace.png"), traces)


def _run_stoptest(cfg: ExperimentConfig, sink: ArtifactSink) -> None:
    rows = []
    first_traj: Optional[Trajectory] = None
    for seed in cfg.seeds:
        oracle = _oracle_for_seed(cfg, seed)
        traj = solve_fixed_mu(oracle, cfg.solver, cfg.mu, cfg.problem.x0)
        if first_traj is None:
            first_traj = traj
        idx = traj.first_trigger()
        tail = traj.records[-10:]
        geo_norm = _geomean(np.array([r.grad_tilde_norm for r in tail]))
        geo_scaled = _geomean(np.array([r.grad_tilde_scaled for r in tail]))
        if idx is None:
            rows.append([seed, -1, "none", math.nan, math.nan, math.nan, geo_norm, geo_scaled])
        else:
            r = traj.records[idx]
            cond = "i" if r.cond_i else "ii"
            rows.append([seed, idx, cond, r.grad_tilde_scaled, r.t1, r.t2, geo_norm, geo_scaled])
    sink.csv(
        f"{cfg.name}_stoptest.csv",
        [
            "seed", "trigger_iter", "cond", "scaled_at_trigger",
            "t1_at_trigger", "t2_at_trigger", "geomean_grad_norm",
            "geomean_grad_scaled",
        ],
        rows,
    )
    figures.save_stoptest_trace(
        sink.path(f"{cfg.name}_stoptest.png"),
        [r.grad_tilde_scaled for r in first_traj.records],
        [r.t1 for r in first_traj.records],
        [r.t2 for r in first_traj.records],
        first_traj.first_trigger(),
    )


def _run_activeset(cfg: ExperimentConfig, sink: ArtifactSink) -> None:
    rows = []
    first_series = None
    active = list(cfg.problem.solution.active_strict)
    for seed in cfg.seeds:
        oracle = _oracle_for_seed(cfg, seed)
        traj = solve_fixed_mu(oracle, cfg.solver, cfg.mu, cfg.problem.x0)
        report = active_set_report(traj, cfg.problem.solution, window=10)
        rows.append(
            [seed, report.mu, report.window, report.window_max, report.empty_active_set]
        )
        if first_series is None and active:
            first_series = [float(np.max(r.x[active])) for r in traj.records]
    sink.csv(
        f"{cfg.name}_activeset.csv",
        ["seed", "mu", "window", "window_max", "empty_active_set"],
        rows,
    )
    if first_series is not None:
        figures.save_active_trace(
            sink.path(f"{cfg.name}_active.png"), first_series, cfg.mu
        )


def _run_radii(cfg: ExperimentConfig, sink: ArtifactSink) -> None:
    mu = cfg.radii_mu

    def constants_of(bar: float):
        return constants_illustrative(mu, bar)

    sweep = radii_sweep(constants_of, cfg.radii_eps_g, cfg.radii_eps_h)
    sink.csv(
        f"{cfg.name}_radii_sweep.csv",
        ["bar_delta", "delta_minus", "delta_plus", "feasible"],
        (
            [b, dm, dp, bool(fe)]
            for b, dm, dp, fe in zip(
                sweep.grid, sweep.delta_minus_grid, sweep.delta_plus_grid,
                sweep.feasible_grid,
            )
        ),
    )
    sink.csv(
        f"{cfg.name}_radii_summary.csv",
        ["mu", "eps_g", "eps_h", "delta1_min", "delta2_max"],
        [[mu, cfg.radii_eps_g, cfg.radii_eps_h, sweep.delta1_min, sweep.delta2_max]],
    )
    grid_rows = []
    for eps_g in np.linspace(0.0, cfg.grid_eps_g_max, cfg.grid_points):
        for eps_h in np.linspace(0.0, cfg.grid_eps_h_max, cfg.grid_points):
            try:
                rep = radii_sweep(constants_of, float(eps_g), float(eps_h))
                grid_rows.append([eps_g, eps_h, rep.delta1_min, rep.delta2_max])
            except NoCrossing:
                grid_rows.append([eps_g, eps_h, math.nan, math.nan])
    sink.csv(
        f"{cfg.name}_radii_grid.csv",
        ["eps_g", "eps_h", "delta1_min", "delta2_max"],
        grid_rows,
    )
    figures.save_radii_curves(sink.path(f"{cfg.name}_radii.png"), sweep)


def _run_scatter(cfg: ExperimentConfig, sink: ArtifactSink) -> None:
    # a scatter is a single-run visualization; extra seeds are ignored
    oracle = _oracle_for_seed(cfg, cfg.seeds[0])
    traj = solve_fixed_mu(oracle, cfg.solver, cfg.mu, cfg.problem.x0)
    tail = traj.records[-200:]
    iterates = [[r.x[0], r.x[1]] for r in tail]
    noisy = [[r.grad_tilde[0], r.grad_tilde[1]] for r in tail]
    true = []
    for r in tail:
        g = cfg.problem.eval_g(r.x) - r.mu / r.x
        true.append([g[0], g[1]])
    sink.csv(f"{cfg.name}_iterates.csv", ["x0", "x1"], iterates)
    sink.csv(f"{cfg.name}_grad_noisy.csv", ["g0", "g1"], noisy)
    sink.csv(f"{cfg.name}_grad_true.csv", ["g0", "g1"], true)
    figures.save_scatter_panels(
        sink.path(f"{cfg.name}_scatter.png"), iterates, noisy, true
    )


_RUNNERS = {
    "solve": _run_solve,
    "stoptest": _run_stoptest,
    "activeset": _run_activeset,
    "radii": _run_radii,
    "scatter": _run_scatter,
}


def run(config_path, out=None, seed_override: Optional[int] = None) -> int:
    """Execute one experiment config; returns a process exit status."""
    try:
        text = Path(config_path).read_text()
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return 1
    sink = None
    try:
        cfg = build_config(parse_config_text(text))
        if seed_override is not None:
            cfg.seeds = [seed_override]
        out_dir = Path(out) if out is not None else Path(cfg.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        sink = ArtifactSink(out_dir)
        _RUNNERS[cfg.kind](cfg, sink)
    except (
        ConfigError,
        ValueError,
        NoCrossing,
        RegularizationFailed,
        HalvingCapExceeded,
        NotPositiveDefinite,
        OSError,
    ) as exc:
        if sink is not None:
            sink.discard_all()
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for p in sink.written:
        print(p)
    return 0


def list_problems() -> int:
    """Print the registry: name, dimension, and available metadata."""
    for name, ctor in registry().items():
        p = ctor()
        tags = []
        if p.solution is not None:
            tags.append("solution")
        if p.central_path is not None:
            tags.append("central-path")
        extra = f"  [{', '.join(tags)}]" if tags else ""
        print(f"{name}  n={p.n}{extra}")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="noisy-barrier",
        description="Interior-point experiments with bounded oracle noise.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run_parser = sub.add_parser("run", help="run one experiment config file")
    run_parser.add_argument("config", help="path to a key = value config file")
    run_parser.add_argument(
        "--out", default=None, help="output directory (default: config's `out`, else cwd)"
    )
    run_parser.add_argument(
        "--seed-override",
        type=int,
        default=None,
        help="replace the config's seed list with this single seed",
    )
    sub.add_parser("list", help="list built-in problems")
    args = parser.parse_args(argv)
    if args.command == "list":
        return list_problems()
    return run(args.config, out=args.out, seed_override=args.seed_override)


if __name__ == "__main__":
    sys.exit(main())
