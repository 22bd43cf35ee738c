"""Interior-point solver loops over the noisy barrier subproblems.

Two entry points:

* solve_fixed_mu runs the relaxed-Armijo barrier loop at a single mu
  (the workhorse for stopping-test and active-set experiments, which
  deliberately run far past the point of diminishing returns).
* solve_continuation drives mu from mu0 down to mu_min by factors of
  kappa_dec, warm-starting each stage from the previous one, with the
  stage-advance rule picked by the configured strategy.

Every iteration appends a complete IterateRecord, so all stopping-test
quantities, line-search numbers and primal-dual residuals are
reconstructible from the trajectory alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import linalg
from .barrier import HessianMode, assemble_hessian, eval_barrier
from .step import (
    dual_fraction_to_boundary,
    fraction_to_boundary,
    relaxed_armijo_search,
)
from .stopping import StopReport, evaluate_stop


@dataclass(frozen=True)
class FixedMu:
    """Never decrease the barrier parameter; run max_inner iterations."""


@dataclass(frozen=True)
class Periodic:
    """Decrease the barrier parameter every `period` iterations."""

    period: int = 40

    def __post_init__(self):
        if self.period < 1:
            raise ValueError(f"period must be >= 1, got {self.period}")


@dataclass(frozen=True)
class Heuristic:
    """Decrease when C1 and C2 hold, or n_mu iterations after C1 first held."""


@dataclass(frozen=True)
class StoppingTestOnly:
    """Decrease as soon as the practical stopping test triggers."""


MuStrategy = Union[FixedMu, Periodic, Heuristic, StoppingTestOnly]


@dataclass(frozen=True)
class SolverConfig:
    eps_r: float
    nu: float = 1e-6
    tau: float = 0.995
    tau_min: float = 0.99
    gamma: float = 0.99
    kappa_sigma: float = 1e4
    kappa_mu: float = 10.0
    kappa_dec: float = 0.1
    n_mu: int = 10
    mu0: float = 0.1
    mu_min: float = 1e-8
    max_inner: int = 5000
    hessian_mode: HessianMode = HessianMode.PRIMAL_DUAL
    mu_strategy: MuStrategy = Heuristic()
    adaptive_nu: bool = True
    halving_cap: int = 60

    def __post_init__(self):
        if not 0 < self.nu < 0.5:
            raise ValueError(f"nu must lie in (0, 1/2), got {self.nu}")
        if self.eps_r <= 0:
            raise ValueError(f"eps_r must be positive, got {self.eps_r}")
        for name in ("tau", "tau_min", "gamma", "kappa_dec"):
            v = getattr(self, name)
            if not 0 < v < 1:
                raise ValueError(f"{name} must lie in (0, 1), got {v}")
        if self.kappa_sigma < 1:
            raise ValueError(f"kappa_sigma must be >= 1, got {self.kappa_sigma}")
        if self.kappa_mu <= 0:
            raise ValueError(f"kappa_mu must be positive, got {self.kappa_mu}")
        if self.n_mu < 0:
            raise ValueError(f"n_mu must be >= 0, got {self.n_mu}")
        if self.mu0 <= 0 or self.mu_min <= 0:
            raise ValueError("mu0 and mu_min must be positive")
        if self.max_inner < 1:
            raise ValueError(f"max_inner must be >= 1, got {self.max_inner}")

    def validate_against(self, spec) -> None:
        """Check the noise-dependent constraint eps_r > 2 * eps_f."""
        if self.eps_r <= 2.0 * spec.eps_f:
            raise ValueError(
                f"eps_r = {self.eps_r} must exceed 2*eps_f = {2.0 * spec.eps_f}"
            )


@dataclass(frozen=True)
class IterateRecord:
    outer: int
    inner: int
    mu: float
    x: np.ndarray
    z: np.ndarray
    alpha: float
    alpha_max: float
    alpha_dual: float
    lam: float
    f_evals: int
    grad_tilde_norm: float
    grad_tilde_scaled: float
    sigma_min_g: float
    t1: float
    t2: float
    nu_k: float
    cond_i: bool
    cond_ii: bool
    c1: bool
    c2: bool
    # appended diagnostics beyond the core schema
    nu_hat1: float
    nu_hat2: float
    compl_inf: float
    phi_tilde: float
    armijo_lhs: float
    armijo_rhs: float
    halvings: int
    pd_res1: float
    pd_res2: float
    grad_tilde: np.ndarray
    d: np.ndarray


@dataclass
class Trajectory:
    records: list[IterateRecord] = field(default_factory=list)
    termination: str = ""
    final_x: Optional[np.ndarray] = None
    final_z: Optional[np.ndarray] = None
    final_mu: float = 0.0

    def __len__(self) -> int:
        return len(self.records)

    def first_trigger(self) -> Optional[int]:
        """Index of the first record where the practical stopping test held."""
        for i, r in enumerate(self.records):
            if r.cond_i or r.cond_ii:
                return i
        return None

    def write_csv(self, path) -> None:
        with open(path, "w", newline="\n") as fh:
            fh.write(trajectory_csv(self))


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def trajectory_csv(traj: Trajectory) -> str:
    """Serialize a trajectory; one row per iteration, LF endings."""
    if not traj.records:
        return ""
    n = traj.records[0].x.shape[0]
    cols = ["outer", "inner", "mu"]
    cols += [f"x{i}" for i in range(n)]
    cols += [f"z{i}" for i in range(n)]
    cols += [
        "alpha", "alpha_max", "alpha_dual", "lambda", "f_evals",
        "grad_tilde_norm", "grad_tilde_scaled", "sigma_min_G", "t1", "t2",
        "nu_k", "cond_i", "cond_ii", "c1", "c2", "nu_hat1", "nu_hat2",
        "compl_inf", "phi_tilde", "armijo_lhs", "armijo_rhs", "halvings",
        "pd_res1", "pd_res2",
    ]
    cols += [f"gt{i}" for i in range(n)]
    cols += [f"d{i}" for i in range(n)]
    lines = [",".join(cols)]
    for r in traj.records:
        row = [r.outer, r.inner, r.mu]
        row += list(r.x) + list(r.z)
        row += [
            r.alpha, r.alpha_max, r.alpha_dual, r.lam, r.f_evals,
            r.grad_tilde_norm, r.grad_tilde_scaled, r.sigma_min_g, r.t1, r.t2,
            r.nu_k, r.cond_i, r.cond_ii, r.c1, r.c2, r.nu_hat1, r.nu_hat2,
            r.compl_inf, r.phi_tilde, r.armijo_lhs, r.armijo_rhs, r.halvings,
            r.pd_res1, r.pd_res2,
        ]
        row += list(r.grad_tilde) + list(r.d)
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def primal_direction(hm, grad_tilde: np.ndarray) -> np.ndarray:
    """d = -G^-1 grad via the factorization already attached to the model."""
    return linalg.solve(hm.factorization, -np.asarray(grad_tilde, dtype=float))


def dual_direction(x: np.ndarray, z: np.ndarray, mu: float, d: np.ndarray) -> np.ndarray:
    """dz = -X^-1 (Z d - mu e) - z, the eliminated row of the primal-dual system."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    d = np.asarray(d, dtype=float)
    return -(z * d - mu) / x - z


def project_duals(x: np.ndarray, z: np.ndarray, mu: float, kappa_sigma: float) -> np.ndarray:
    """Clamp each z_i into [mu / (kappa_sigma x_i), kappa_sigma mu / x_i].

    Keeps the primal-dual curvature X^-1 Z within a factor kappa_sigma^2 of
    the primal curvature mu X^-2.
    """
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    return np.clip(z, mu / (kappa_sigma * x), kappa_sigma * mu / x)


def _run_stage(
    oracle,
    config: SolverConfig,
    mu: float,
    x: np.ndarray,
    z: np.ndarray,
    tau: float,
    outer: int,
    records: list[IterateRecord],
    advance: Optional[Callable[[int, StopReport], bool]],
    max_iters: int,
) -> tuple[np.ndarray, np.ndarray, bool]:
    """Inner loop at fixed mu; returns (x, z, whether `advance` fired)."""
    pd = config.hessian_mode is HessianMode.PRIMAL_DUAL
    for k in range(max_iters):
        z_cur = z if pd else mu / x
        ev = eval_barrier(oracle, mu, x)
        hm = assemble_hessian(
            oracle, config.hessian_mode, mu, x, z_cur if pd else None
        )
        d = primal_direction(hm, ev.grad)
        if pd:
            dz = dual_direction(x, z_cur, mu, d)
            alpha_dual = dual_fraction_to_boundary(z_cur, dz, tau)
            pd_res1 = float(
                np.linalg.norm(hm.matrix @ d - hm.lam * d + ev.grad)
            )
            pd_res2 = float(
                np.linalg.norm(z_cur * d + x * dz + (x * z_cur - mu))
            )
        else:
            dz = None
            alpha_dual = 0.0
            pd_res1 = 0.0
            pd_res2 = 0.0
        alpha_max = fraction_to_boundary(x, d, tau)
        ls = relaxed_armijo_search(
            oracle, mu, x, d, ev.grad, ev.phi, alpha_max,
            config.nu, config.eps_r, config.halving_cap,
        )
        scaled_grad = linalg.scaled_norm_inv(hm.factorization, ev.grad)
        report = evaluate_stop(
            config, oracle.spec, mu, x, z_cur, ls.alpha, scaled_grad,
            hm.sigma_min, ev.phi, ls.phi_trial,
        )
        records.append(
            IterateRecord(
                outer=outer,
                inner=k,
                mu=mu,
                x=x.copy(),
                z=z_cur.copy(),
                alpha=ls.alpha,
                alpha_max=alpha_max,
                alpha_dual=alpha_dual,
                lam=hm.lam,
                f_evals=oracle.f_evals,
                grad_tilde_norm=float(np.linalg.norm(ev.grad)),
                grad_tilde_scaled=scaled_grad,
                sigma_min_g=hm.sigma_min,
                t1=report.t1,
                t2=report.t2,
                nu_k=report.nu_k,
                cond_i=report.cond_i,
                cond_ii=report.cond_ii,
                c1=report.c1,
                c2=report.c2,
                nu_hat1=report.nu_hat1,
                nu_hat2=report.nu_hat2,
                compl_inf=report.compl_inf,
                phi_tilde=ev.phi,
                armijo_lhs=ls.armijo_lhs,
                armijo_rhs=ls.armijo_rhs,
                halvings=ls.halvings,
                pd_res1=pd_res1,
                pd_res2=pd_res2,
                grad_tilde=ev.grad.copy(),
                d=d.copy(),
            )
        )
        x = x + ls.alpha * d
        if pd:
            z = project_duals(x, z_cur + alpha_dual * dz, mu, config.kappa_sigma)
        else:
            z = mu / x
        if advance is not None and advance(k, report):
            return x, z, True
    return x, z, False


def solve_fixed_mu(
    oracle,
    config: SolverConfig,
    mu: float,
    x0: np.ndarray,
    z0: Optional[np.ndarray] = None,
    stop: Optional[Callable[[int, StopReport], bool]] = None,
    max_iters: Optional[int] = None,
) -> Trajectory:
    """Run the barrier loop at a single fixed mu.

    Without a `stop` predicate the loop runs the full iteration budget,
    which is what the long noise-floor experiments want.
    """
    config.validate_against(oracle.spec)
    x = np.asarray(x0, dtype=float).copy()
    if np.any(x <= 0):
        raise ValueError("x0 must be strictly positive")
    z = mu / x if z0 is None else np.asarray(z0, dtype=float).copy()
    traj = Trajectory()
    cap = config.max_inner if max_iters is None else max_iters
    x, z, stopped = _run_stage(
        oracle, config, mu, x, z, config.tau, 0, traj.records, stop, cap
    )
    traj.termination = "stop_predicate" if stopped else "max_inner"
    traj.final_x, traj.final_z, traj.final_mu = x, z, mu
    return traj


def _stage_advance(config: SolverConfig) -> Optional[Callable[[int, StopReport], bool]]:
    """Fresh stage-advance predicate for the configured strategy."""
    strategy = config.mu_strategy
    if isinstance(strategy, FixedMu):
        return None
    if isinstance(strategy, Periodic):
        period = strategy.period
        return lambda k, report: (k + 1) % period == 0
    if isinstance(strategy, StoppingTestOnly):
        return lambda k, report: report.cond_i or report.cond_ii
    if isinstance(strategy, Heuristic):
        state = {"c1_at": None}

        def advance(k: int, report: StopReport) -> bool:
            if report.c1 and state["c1_at"] is None:
                state["c1_at"] = k
            if report.c1 and report.c2:
                return True
            return state["c1_at"] is not None and k - state["c1_at"] >= config.n_mu

        return advance
    raise ValueError(f"unknown mu strategy {strategy!r}")


def solve_continuation(
    oracle,
    config: SolverConfig,
    x0: Optional[np.ndarray] = None,
) -> Trajectory:
    """Outer loop over mu = mu0 * kappa_dec^l down to (and including) mu_min.

    Each stage runs the fixed-mu loop with tau_l = max(tau_min, 1 - mu_l)
    until its strategy says to advance (or max_inner is hit), then the next
    stage warm-starts from the current primal-dual pair.  Duals start
    perfectly centered: z0 = mu0 X0^-1 e.
    """
    config.validate_against(oracle.spec)
    x = np.asarray(x0 if x0 is not None else oracle.problem.x0, dtype=float).copy()
    if np.any(x <= 0):
        raise ValueError("start point must be strictly positive")
    mu = config.mu0
    z = mu / x
    traj = Trajectory()
    outer = 0
    while True:
        tau_l = max(config.tau_min, 1.0 - mu)
        advance = _stage_advance(config)
        x, z, _ = _run_stage(
            oracle, config, mu, x, z, tau_l, outer, traj.records,
            advance, config.max_inner,
        )
        if isinstance(config.mu_strategy, FixedMu):
            traj.termination = "max_inner"
            break
        # relative slack: mu0 * kappa_dec^l lands slightly above a decimal
        # mu_min after repeated rounding
        if mu <= config.mu_min * (1.0 + 1e-9):
            traj.termination = "mu_min_reached"
            break
        mu *= config.kappa_dec
        outer += 1
    traj.final_x, traj.final_z, traj.final_mu = x, z, mu
    return traj
