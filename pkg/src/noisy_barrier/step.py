"""Step-size machinery: fraction-to-the-boundary caps and relaxed Armijo.

The relaxed Armijo condition accepts a trial step alpha when

    phi_tilde(x + alpha d) <= phi_tilde(x) + nu alpha grad_tilde.d + eps_R

with eps_R > 2 eps_f.  The slack absorbs the worst case of function noise
on both sides, so with bounded noise the backtracking loop always
terminates; running into the halving cap indicates a broken contract
(typically eps_R chosen too small), not a theory failure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .barrier import eval_barrier


class HalvingCapExceeded(Exception):
    def __init__(self, cap: int):
        self.cap = cap
        super().__init__(
            f"line search rejected {cap} halvings; is eps_r > 2*eps_f violated?"
        )


@dataclass(frozen=True)
class LineSearchResult:
    alpha: float
    halvings: int
    phi_trial: float
    armijo_lhs: float
    armijo_rhs: float


def fraction_to_boundary(x: np.ndarray, d: np.ndarray, tau: float) -> float:
    """Largest alpha in (0, 1] with x + alpha d >= (1 - tau) x."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    neg = d < 0
    if not np.any(neg):
        return 1.0
    # a subnormal d_i overflows the ratio to +inf, which the min ignores
    with np.errstate(over="ignore"):
        ratios = -tau * x[neg] / d[neg]
    return float(min(1.0, np.min(ratios)))


def dual_fraction_to_boundary(z: np.ndarray, dz: np.ndarray, tau: float) -> float:
    """Same cap applied to the dual pair (z, dz)."""
    return fraction_to_boundary(z, dz, tau)


def relaxed_armijo_search(
    oracle,
    mu: float,
    x: np.ndarray,
    d: np.ndarray,
    grad_tilde: np.ndarray,
    phi_x: float,
    alpha_max: float,
    nu: float,
    eps_r: float,
    halving_cap: int = 60,
) -> LineSearchResult:
    """Backtrack from alpha_max by halving until the relaxed condition holds.

    phi_x is the noisy barrier value already drawn at the current iterate:
    one draw per line search on the left-anchor side, one fresh draw per
    trial point.
    """
    if eps_r <= 2.0 * oracle.spec.eps_f:
        raise ValueError(
            f"eps_r = {eps_r} must exceed 2*eps_f = {2.0 * oracle.spec.eps_f}"
        )
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    slope = float(np.dot(grad_tilde, d))
    alpha = float(alpha_max)
    for halvings in range(halving_cap + 1):
        trial = eval_barrier(oracle, mu, x + alpha * d)
        rhs = phi_x + nu * alpha * slope + eps_r
        if trial.phi <= rhs:
            return LineSearchResult(
                alpha=alpha,
                halvings=halvings,
                phi_trial=trial.phi,
                armijo_lhs=trial.phi,
                armijo_rhs=rhs,
            )
        alpha *= 0.5
    raise HalvingCapExceeded(halving_cap)
