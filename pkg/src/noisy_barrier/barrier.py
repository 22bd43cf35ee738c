"""Barrier function evaluation and the regularized Hessian models.

The barrier subproblem for parameter mu > 0 is

    min phi(x) = f(x) - mu * sum_i log(x_i)   over x > 0.

Only f, g, H come from the noisy oracle; the log terms and their
derivatives are always computed exactly from x.  The noisy barrier
gradient is therefore g_tilde(x) - mu * X^-1 e, with noise identical to
the raw gradient noise.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from . import linalg


class NonInteriorPoint(ValueError):
    """Barrier evaluation requested at a point with some x_i <= 0."""


class RegularizationFailed(Exception):
    """The identity-shift ladder exceeded its cap without reaching SPD."""

    def __init__(self, lam: float):
        self.lam = lam
        super().__init__(f"regularization shift grew past {lam:g} without success")


class HessianMode(str, Enum):
    # H_tilde + mu X^-2, the curvature of the noisy barrier function.
    PRIMAL = "primal"
    # H_tilde + X^-1 Z, multiplier-based curvature (needs z > 0).
    PRIMAL_DUAL = "primal_dual"
    # Same matrix as PRIMAL; names the plain noisy-Newton iteration used in
    # local-convergence studies.  Kept distinct so configs and trajectories
    # record which iteration was meant.
    NOISY_NEWTON_PRIMAL = "noisy_newton_primal"


@dataclass(frozen=True)
class BarrierEval:
    mu: float
    phi: float
    grad: np.ndarray
    f_tilde: float


@dataclass
class HessianModel:
    """The (regularized) matrix G actually used to compute the step.

    `lam` is the identity shift that made the matrix factor; 0 whenever the
    unshifted matrix was already positive definite.  `sigma_min` is the
    smallest eigenvalue of the shifted matrix, computed on first access
    because only the stopping test needs it.
    """

    mode: HessianMode
    matrix: np.ndarray
    lam: float
    factorization: linalg.Factorization
    _sigma_min: Optional[float] = field(default=None, repr=False)

    @property
    def sigma_min(self) -> float:
        if self._sigma_min is None:
            self._sigma_min = linalg.smallest_eigenvalue(self.matrix)
        return self._sigma_min


def eval_barrier(oracle, mu: float, x: np.ndarray) -> BarrierEval:
    """One noisy evaluation of the barrier value and gradient at x > 0."""
    x = np.asarray(x, dtype=float)
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    if np.any(x <= 0):
        raise NonInteriorPoint(f"point has non-positive components: {x}")
    f_tilde = oracle.f(x)
    phi = f_tilde - mu * float(np.sum(np.log(x)))
    grad = oracle.grad(x) - mu / x
    return BarrierEval(mu=mu, phi=phi, grad=grad, f_tilde=f_tilde)


LAMBDA_MAX = 1e12


def assemble_hessian(
    oracle,
    mode: HessianMode,
    mu: float,
    x: np.ndarray,
    z: Optional[np.ndarray] = None,
) -> HessianModel:
    """Draw H_tilde once, add the mode's curvature, and regularize.

    Regularization ladder: try lambda = 0 first; on Cholesky failure start
    at max(1e-8, 1e-4 * max|H_tilde|) and multiply by 10 until the shifted
    matrix factors, failing hard past 1e12.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise NonInteriorPoint(f"point has non-positive components: {x}")
    h_tilde = oracle.hess(x)
    if mode is HessianMode.PRIMAL_DUAL:
        if z is None:
            raise ValueError("primal-dual mode needs dual variables z")
        z = np.asarray(z, dtype=float)
        if np.any(z <= 0):
            raise ValueError("dual variables must be strictly positive")
        base = h_tilde + np.diag(z / x)
    elif mode in (HessianMode.PRIMAL, HessianMode.NOISY_NEWTON_PRIMAL):
        # (mu / x) / x rather than mu / x**2: bitwise identical to the
        # primal-dual curvature at centered duals z = mu / x.
        base = h_tilde + np.diag((mu / x) / x)
    else:
        raise ValueError(f"unknown Hessian mode {mode!r}")

    try:
        fact = linalg.cholesky(base)
        return HessianModel(mode=mode, matrix=base, lam=0.0, factorization=fact)
    except linalg.NotPositiveDefinite:
        pass

    lam = max(1e-8, 1e-4 * float(np.max(np.abs(h_tilde))))
    eye = np.eye(x.shape[0])
    while lam <= LAMBDA_MAX:
        shifted = base + lam * eye
        try:
            fact = linalg.cholesky(shifted)
            return HessianModel(mode=mode, matrix=shifted, lam=lam, factorization=fact)
        except linalg.NotPositiveDefinite:
            lam *= 10.0
    raise RegularizationFailed(lam)
