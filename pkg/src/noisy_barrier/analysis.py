"""Local-convergence constants, attraction radii, and active-set reports.

Near a barrier minimizer x*(mu) the noisy Newton iteration obeys

    e_plus <= M2 e^2 + M1 eps_H e + M0 eps_g

in the scaled norm ||v||_{(X*)^-2} = sqrt(sum (v_i / x*_i)^2).  The roots
of M2 d^2 - (1 - M1 eps_H) d + M0 eps_g = 0 give the containment radius
delta_minus (iterates inside stay inside) and, capped by the constants'
validity radius bar_delta, the attraction radius delta_plus.  Sweeping
bar_delta and intersecting with the identity yields the extremal radii
delta1_min and delta2_max reported here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import linalg


class NoCrossing(Exception):
    """The swept radius curve never crosses the identity on the grid."""


@dataclass(frozen=True)
class LocalConstants:
    m0: float
    m1: float
    m2: float
    source: str = ""

    def __post_init__(self):
        if min(self.m0, self.m1, self.m2) < 0:
            raise ValueError("constants must be nonnegative")


@dataclass(frozen=True)
class RadiiReport:
    # single-point evaluation (None on sweep results)
    delta: Optional[float] = None
    delta_minus: Optional[float] = None
    delta_plus: Optional[float] = None
    delta1: Optional[float] = None
    delta2: Optional[float] = None
    feasible: Optional[bool] = None
    # extremal radii (present only on sweep results)
    delta1_min: Optional[float] = None
    delta2_max: Optional[float] = None
    # per-grid-point curves backing the sweep
    grid: Optional[np.ndarray] = None
    delta_minus_grid: Optional[np.ndarray] = None
    delta_plus_grid: Optional[np.ndarray] = None
    feasible_grid: Optional[np.ndarray] = None


@dataclass(frozen=True)
class ActiveSetReport:
    mu: float
    window_max: float
    window: int
    empty_active_set: bool = False


@dataclass(frozen=True)
class ContractionRow:
    e: float
    bound: float
    e_plus: float


def scaled_error(x: np.ndarray, x_star_mu: np.ndarray) -> float:
    """Distance to the barrier minimizer in the (X*)^-2 scaled norm."""
    x = np.asarray(x, dtype=float)
    x_star_mu = np.asarray(x_star_mu, dtype=float)
    return linalg.scaled_norm_diag_inv_sq(x_star_mu, x - x_star_mu)


def constants_generic(
    l_g: float,
    l_h: float,
    norm_gamma_inv: float,
    x_star_inf: float,
    z_star_inf: float,
    bar_delta: float,
    xi_m: float = 1.01,
) -> LocalConstants:
    """Worst-case constants from problem-level Lipschitz and solution data."""
    if not 0 < bar_delta < 1:
        raise ValueError(f"bar_delta must lie in (0, 1), got {bar_delta}")
    if xi_m <= 1:
        raise ValueError(f"xi_m must exceed 1, got {xi_m}")
    one_minus = 1.0 - bar_delta
    m2 = xi_m * 4.0 * norm_gamma_inv * (
        l_h * x_star_inf**2 / 2.0 + z_star_inf / one_minus**2
    )
    m1 = xi_m * 32.0 * norm_gamma_inv**2 * x_star_inf * (
        l_g * x_star_inf + z_star_inf / one_minus
    )
    m0 = 8.0 * norm_gamma_inv
    return LocalConstants(m0=m0, m1=m1, m2=m2, source="generic")


def constants_illustrative(mu: float, bar_delta: float) -> LocalConstants:
    """Sharper constants available in closed form for the two-variable example."""
    if not 0 < bar_delta < 1:
        raise ValueError(f"bar_delta must lie in (0, 1), got {bar_delta}")
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    x1 = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * mu))
    one_plus = 1.0 + bar_delta
    one_minus = 1.0 - bar_delta
    m2 = (one_plus / one_minus) ** 2
    m1 = 2.0 * one_plus**4 * x1 * (x1 + 1.0 / one_minus)
    m0 = 2.0 * one_plus**2
    return LocalConstants(m0=m0, m1=m1, m2=m2, source="illustrative")


def radii(
    constants: LocalConstants, eps_g: float, eps_h: float, bar_delta: float
) -> RadiiReport:
    """Roots of the contraction fixed-point equation at one bar_delta."""
    lead = 1.0 - constants.m1 * eps_h
    disc = lead**2 - 4.0 * constants.m0 * constants.m2 * eps_g
    feasible = (constants.m1 * eps_h < 1.0) and (disc >= 0.0)
    if not feasible:
        return RadiiReport(delta=disc, feasible=False)
    root = math.sqrt(disc)
    if constants.m2 == 0.0:
        # degenerate quadratic: single linear root, no upper root
        d_minus = constants.m0 * eps_g / lead
        d_plus = math.inf
    else:
        d_minus = (lead - root) / (2.0 * constants.m2)
        d_plus = (lead + root) / (2.0 * constants.m2)
    return RadiiReport(
        delta=disc,
        delta_minus=d_minus,
        delta_plus=d_plus,
        delta1=d_minus,
        delta2=min(d_plus, bar_delta),
        feasible=True,
    )


def _bisect(fn: Callable[[float], float], lo: float, hi: float, tol: float = 1e-10) -> float:
    flo = fn(lo)
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        fmid = fn(mid)
        if (flo <= 0) == (fmid <= 0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def radii_sweep(
    constants_of_bar: Callable[[float], LocalConstants],
    eps_g: float,
    eps_h: float,
    grid: Optional[np.ndarray] = None,
) -> RadiiReport:
    """Sweep bar_delta and locate the identity crossings of both radii.

    delta1_min is the root of delta_minus(bar) = bar, delta2_max the root of
    delta_plus(bar) = bar, each refined by bisection between the bracketing
    grid points.  The bisection runs well past the 1e-6 reporting tolerance
    so the fixed-point residual stays below 1e-6 even where the curves are
    steep.  A vanishing delta_minus curve (zero gradient noise)
    short-circuits to delta1_min = 0 exactly.
    """
    if grid is None:
        grid = np.linspace(1e-3, 0.999, 999)
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 2 or np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be a 1-d increasing array of bar_delta values")
    if np.any((grid <= 0) | (grid >= 1)):
        raise ValueError("grid values must lie in (0, 1)")

    d_minus = np.full(len(grid), np.nan)
    d_plus = np.full(len(grid), np.nan)
    feas = np.zeros(len(grid), dtype=bool)
    for i, bar in enumerate(grid):
        rep = radii(constants_of_bar(bar), eps_g, eps_h, bar)
        feas[i] = bool(rep.feasible)
        if rep.feasible:
            d_minus[i] = rep.delta_minus
            d_plus[i] = rep.delta_plus

    def crossing(values: np.ndarray, fn: Callable[[float], float]) -> float:
        for i in range(len(grid) - 1):
            if not (feas[i] and feas[i + 1]):
                continue
            a = values[i] - grid[i]
            b = values[i + 1] - grid[i + 1]
            if a == 0.0:
                return float(grid[i])
            if (a > 0) != (b > 0):
                return _bisect(fn, float(grid[i]), float(grid[i + 1]))
        raise NoCrossing("no identity crossing on the supplied grid")

    if np.all(d_minus[feas] == 0.0):
        delta1_min = 0.0
    else:
        delta1_min = crossing(
            d_minus,
            lambda bar: radii(constants_of_bar(bar), eps_g, eps_h, bar).delta_minus - bar,
        )
    delta2_max = crossing(
        d_plus,
        lambda bar: radii(constants_of_bar(bar), eps_g, eps_h, bar).delta_plus - bar,
    )
    return RadiiReport(
        delta1_min=delta1_min,
        delta2_max=delta2_max,
        grid=grid,
        delta_minus_grid=d_minus,
        delta_plus_grid=d_plus,
        feasible_grid=feas,
    )


def contraction_check(
    trajectory,
    central_path,
    constants: LocalConstants,
    eps_g: float,
    eps_h: float,
) -> list[ContractionRow]:
    """Per-iterate full-step error against the contraction bound.

    The bound concerns the undamped step x_k + d_k, so the rows use the
    recorded direction, not the (possibly shortened) accepted step.  Rows
    are emitted for every iterate; the bound is only claimed while
    e <= bar_delta, which the caller filters on.
    """
    rows = []
    for r in trajectory.records:
        x_star = central_path.x_of_mu(r.mu)
        e = scaled_error(r.x, x_star)
        e_plus = scaled_error(r.x + r.d, x_star)
        bound = constants.m2 * e**2 + constants.m1 * eps_h * e + constants.m0 * eps_g
        rows.append(ContractionRow(e=e, bound=bound, e_plus=e_plus))
    return rows


def active_set_report(trajectory, known, window: int = 10) -> ActiveSetReport:
    """Max strongly-active coordinate over the trailing window of iterates."""
    if len(trajectory.records) < window:
        raise ValueError(
            f"trajectory has {len(trajectory.records)} records, window is {window}"
        )
    idx = list(known.active_strict)
    mu = trajectory.records[-1].mu
    if not idx:
        return ActiveSetReport(mu=mu, window_max=0.0, window=window, empty_active_set=True)
    tail = trajectory.records[-window:]
    window_max = max(float(np.max(r.x[idx])) for r in tail)
    return ActiveSetReport(mu=mu, window_max=window_max, window=window)
