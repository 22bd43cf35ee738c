"""Built-in bound-constrained test problems with analytic derivatives.

Each problem is min f(x) subject to x >= 0, packaged with exact gradient
and Hessian oracles, a strictly interior start point, and (where known)
the solution with its active-set classification and the closed-form
central path (x(mu), z(mu)) of the perturbed KKT system

    g(x) - z = 0,    X z = mu e,    x > 0, z > 0.

Index sets in KnownSolution are 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np


class UnknownProblem(KeyError):
    """Raised when a registry lookup does not match any built-in problem."""


@dataclass(frozen=True)
class KnownSolution:
    """Solution of the original problem (mu = 0) with variable classification.

    active_strict:     x*_i = 0 and z*_i > 0 (strict complementarity)
    active_degenerate: x*_i = 0 and z*_i = 0
    inactive_bounded:  x*_i > 0 with the bound present (z*_i = 0)
    free:              variables without a bound (none in this corpus)
    """

    x_star: np.ndarray
    z_star: np.ndarray
    active_strict: tuple[int, ...]
    active_degenerate: tuple[int, ...] = ()
    inactive_bounded: tuple[int, ...] = ()
    free: tuple[int, ...] = ()


@dataclass(frozen=True)
class CentralPath:
    """Closed-form barrier-problem solutions as functions of mu."""

    x_of_mu: Callable[[float], np.ndarray]
    z_of_mu: Callable[[float], np.ndarray]


@dataclass(frozen=True)
class Problem:
    name: str
    n: int
    eval_f: Callable[[np.ndarray], float]
    eval_g: Callable[[np.ndarray], np.ndarray]
    eval_h: Callable[[np.ndarray], np.ndarray]
    x0: np.ndarray
    solution: Optional[KnownSolution] = None
    central_path: Optional[CentralPath] = None


def harkerp2(n: int) -> Problem:
    """Quadratic test problem with one inactive and n-1 strongly active variables.

    f(x) = -sum(x_i^2/2 + x_i) + (sum x_i)^2 + 2 * sum_{j=1}^{n-1} t_j^2
    where t_j = x_j + ... + x_{n-1} (0-based tail sums).  The solution is
    x* = e_0 with multipliers z* = (0, 1, ..., 1).
    """
    if n < 2:
        raise ValueError(f"harkerp2 needs n >= 2, got {n}")

    def f(x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        tails = np.cumsum(x[::-1])[::-1]
        return float(-np.sum(0.5 * x**2 + x) + tails[0] ** 2 + 2.0 * np.sum(tails[1:] ** 2))

    def g(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        tails = np.cumsum(x[::-1])[::-1]
        # cumulative tail sums: T_k = t_1 + ... + t_k, with T_0 = 0
        cum = np.cumsum(tails) - tails[0]
        return -(x + 1.0) + 2.0 * tails[0] + 4.0 * cum

    def h(x: np.ndarray) -> np.ndarray:
        idx = np.arange(n)
        return 2.0 + 4.0 * np.minimum.outer(idx, idx) - np.eye(n)

    x_star = np.zeros(n)
    x_star[0] = 1.0
    z_star = np.ones(n)
    z_star[0] = 0.0
    sol = KnownSolution(
        x_star=x_star,
        z_star=z_star,
        active_strict=tuple(range(1, n)),
        inactive_bounded=(0,),
    )
    return Problem(
        name=f"harkerp2-{n}",
        n=n,
        eval_f=f,
        eval_g=g,
        eval_h=h,
        x0=np.arange(1.0, n + 1.0),
        solution=sol,
    )


def illustrative(c1: float = 1.0, c2: float = 1.0) -> Problem:
    """Two-variable problem f(x) = (c1/2)(x1 - 1)^2 + c2 x2 with x >= 0.

    The barrier minimizer is available in closed form for every mu, which
    makes this the workhorse for local-convergence and radii studies:
        x1(mu) = (1 + sqrt(1 + 4 mu / c1)) / 2,   x2(mu) = mu / c2,
        z1(mu) = c1 (x1(mu) - 1),                 z2(mu) = c2.
    """
    if c1 <= 0 or c2 <= 0:
        raise ValueError("coefficients must be positive")

    def f(x: np.ndarray) -> float:
        return float(0.5 * c1 * (x[0] - 1.0) ** 2 + c2 * x[1])

    def g(x: np.ndarray) -> np.ndarray:
        return np.array([c1 * (x[0] - 1.0), c2])

    def h(x: np.ndarray) -> np.ndarray:
        return np.array([[c1, 0.0], [0.0, 0.0]])

    def _x1_excess(mu: float) -> float:
        # x1(mu) - 1 in rationalized form; the naive (sqrt(1+t) - 1)/2
        # cancels catastrophically when mu/c1 is tiny
        t = 4.0 * mu / c1
        return t / (2.0 * (1.0 + np.sqrt(1.0 + t)))

    def x_of_mu(mu: float) -> np.ndarray:
        return np.array([1.0 + _x1_excess(mu), mu / c2])

    def z_of_mu(mu: float) -> np.ndarray:
        return np.array([c1 * _x1_excess(mu), c2])

    sol = KnownSolution(
        x_star=np.array([1.0, 0.0]),
        z_star=np.array([0.0, c2]),
        active_strict=(1,),
        inactive_bounded=(0,),
    )
    return Problem(
        name="illustrative",
        n=2,
        eval_f=f,
        eval_g=g,
        eval_h=h,
        x0=np.array([2.0, 2.0]),
        solution=sol,
        central_path=CentralPath(x_of_mu=x_of_mu, z_of_mu=z_of_mu),
    )


def synthetic_quadratic(n: int, diag, shift) -> Problem:
    """Separable quadratic f(x) = 0.5 * sum d_i (x_i - s_i)^2 with x >= 0.

    Per coordinate the barrier stationarity condition d_i x (x - s_i) = mu
    has the positive root x_i(mu) = (s_i + sqrt(s_i^2 + 4 mu / d_i)) / 2,
    so the central path is exact.  Shift signs select the variable class at
    mu = 0: positive shifts stay inactive, negative shifts are strongly
    active, zero shifts are degenerate.
    """
    d = np.asarray(diag, dtype=float)
    s = np.asarray(shift, dtype=float)
    if d.shape != (n,) or s.shape != (n,):
        raise ValueError(f"diag and shift must have shape ({n},)")
    if np.any(d <= 0):
        raise ValueError("diag entries must be positive")

    def f(x: np.ndarray) -> float:
        return float(0.5 * np.sum(d * (np.asarray(x, dtype=float) - s) ** 2))

    def g(x: np.ndarray) -> np.ndarray:
        return d * (np.asarray(x, dtype=float) - s)

    def h(x: np.ndarray) -> np.ndarray:
        return np.diag(d)

    def x_of_mu(mu: float) -> np.ndarray:
        t = 4.0 * mu / d
        root = np.sqrt(s**2 + t)
        # rationalize where s < 0, where (s + root)/2 would cancel
        return np.where(s >= 0, 0.5 * (s + root), 0.5 * t / (root - s))

    def z_of_mu(mu: float) -> np.ndarray:
        return mu / x_of_mu(mu)

    x_star = np.maximum(s, 0.0)
    z_star = np.where(s < 0, -d * s, 0.0)
    sol = KnownSolution(
        x_star=x_star,
        z_star=z_star,
        active_strict=tuple(int(i) for i in np.flatnonzero(s < 0)),
        active_degenerate=tuple(int(i) for i in np.flatnonzero(s == 0)),
        inactive_bounded=tuple(int(i) for i in np.flatnonzero(s > 0)),
    )
    return Problem(
        name=f"synthetic-quadratic-{n}",
        n=n,
        eval_f=f,
        eval_g=g,
        eval_h=h,
        x0=np.maximum(np.abs(s), 1.0),
        solution=sol,
        central_path=CentralPath(x_of_mu=x_of_mu, z_of_mu=z_of_mu),
    )


_REGISTRY: dict[str, Callable[[], Problem]] = {
    "harkerp2-4": lambda: harkerp2(4),
    "harkerp2-100": lambda: harkerp2(100),
    "illustrative": illustrative,
    "quad-1": lambda: synthetic_quadratic(1, diag=[1.0], shift=[2.0]),
    "quad-mixed-3": lambda: synthetic_quadratic(
        3, diag=[1.0, 2.0, 4.0], shift=[2.0, -1.0, 0.0]
    ),
}


def registry() -> dict[str, Callable[[], Problem]]:
    """Name-keyed problem constructors in deterministic order."""
    return dict(_REGISTRY)


def lookup(name: str) -> Problem:
    try:
        return _REGISTRY[name]()
    except KeyError:
        raise UnknownProblem(name) from None
