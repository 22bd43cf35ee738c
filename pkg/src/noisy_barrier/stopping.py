"""Practical stopping test and barrier-update conditions.

With bounded noise the scaled gradient norm ||grad phi_tilde||_{G^-1}
cannot be driven to zero; the test certifies the iterate has reached the
noise-limited accuracy instead.  An iteration stops acceptably when
either

    (i)   scaled_grad <= T1,   or
    (ii)  T1 < scaled_grad <= T2,

where T1 grows with the gradient noise and T2 shrinks with the achievable
Armijo decrease:

    T1 = (1 / sqrt(sigma)) * ((1 + 2 nu_k) / (1 - 2 nu_k) + 1) * eps_g
    T2 = sqrt((2 eps_f + eps_R) / (gamma * alpha_k * nu_k))

sigma is the smallest eigenvalue of the (regularized) matrix that
produced the step.  nu_k may be tightened adaptively: nu_hat1 is the
largest Armijo parameter the accepted step would have satisfied, nu_hat2
the value balancing T1 = T2, and the default choice is
max(nu, min(nu_hat1, nu_hat2)).

The barrier parameter heuristics use two further conditions:

    C1: scaled_grad <= max(T1, T2) + kappa_mu * mu
    C2: ||X z - mu e||_inf <= kappa_mu * mu
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg


@dataclass(frozen=True)
class StopReport:
    t1: float
    t2: float
    nu_hat1: float
    nu_hat2: float
    nu_k: float
    scaled_grad: float
    cond_i: bool
    cond_ii: bool
    c1: bool
    c2: bool
    compl_inf: float


def nu_hat1(
    phi_tilde_x: float,
    phi_tilde_trial: float,
    alpha: float,
    scaled_grad: float,
    eps_r: float,
) -> float:
    """Largest Armijo parameter consistent with the accepted step.

    (phi(x) - phi(x + alpha d) + eps_R) / (alpha * scaled_grad^2), with the
    convention that a positive numerator over zero is +inf.
    """
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if scaled_grad == 0.0:
        return math.inf
    return (phi_tilde_x - phi_tilde_trial + eps_r) / (alpha * scaled_grad**2)


def nu_hat2(
    eps_f: float,
    eps_r: float,
    sigma_min_g: float,
    gamma: float,
    alpha: float,
    eps_g: float,
) -> float:
    """The Armijo parameter at which T1 and T2 coincide; in (0, 1/2].

    With a = (2 eps_f + eps_R) sigma and b = gamma alpha eps_g^2 the minus
    root of the balancing quadratic is (a + b - sqrt(b^2 + 2ab)) / (2a);
    multiplying through by the conjugate gives the equivalent form
    a / (2 (a + b + sqrt(b^2 + 2ab))), which is free of cancellation for
    every magnitude of b / a.
    """
    if sigma_min_g <= 0:
        raise ValueError(f"sigma_min_g must be positive, got {sigma_min_g}")
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    if not 0 < gamma < 1:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if eps_g == 0:
        return 0.5
    a = (2.0 * eps_f + eps_r) * sigma_min_g
    b = gamma * alpha * eps_g**2
    return a / (2.0 * (a + b + math.sqrt(b**2 + 2.0 * a * b)))


def tolerances(
    eps_g: float,
    eps_f: float,
    eps_r: float,
    sigma_min_g: float,
    gamma: float,
    alpha: float,
    nu_k: float,
) -> tuple[float, float]:
    """(T1, T2) for the given iteration quantities."""
    if sigma_min_g <= 0:
        raise ValueError(f"sigma_min_g must be positive, got {sigma_min_g}")
    if nu_k <= 0:
        raise ValueError(f"nu_k must be positive, got {nu_k}")
    t2 = math.sqrt((2.0 * eps_f + eps_r) / (gamma * alpha * nu_k))
    if eps_g == 0:
        # nu_k may legitimately sit at 1/2 here (nu_hat2's zero-noise value)
        # and T1 vanishes with the noise, sidestepping the 1 - 2 nu pole.
        return 0.0, t2
    if nu_k >= 0.5:
        raise ValueError(f"nu_k must lie in (0, 1/2), got {nu_k}")
    t1 = ((1.0 + 2.0 * nu_k) / (1.0 - 2.0 * nu_k) + 1.0) * eps_g / math.sqrt(sigma_min_g)
    return t1, t2


def evaluate_stop(
    config,
    spec,
    mu: float,
    x: np.ndarray,
    z: np.ndarray,
    alpha: float,
    scaled_grad: float,
    sigma_min_g: float,
    phi_tilde_x: float,
    phi_tilde_trial: float,
) -> StopReport:
    """Full stopping/update report for one completed iteration.

    `config` supplies nu, eps_r, gamma, kappa_mu and the adaptive_nu flag;
    `spec` supplies the noise magnitudes.  All other arguments are the
    quantities of the iteration being judged: the step that was accepted,
    the scaled gradient of the matrix that produced it, and the two noisy
    barrier values seen by the line search.
    """
    n1 = nu_hat1(phi_tilde_x, phi_tilde_trial, alpha, scaled_grad, config.eps_r)
    n2 = nu_hat2(spec.eps_f, config.eps_r, sigma_min_g, config.gamma, alpha, spec.eps_g)
    if config.adaptive_nu:
        nu_k = max(config.nu, min(n1, n2))
    else:
        nu_k = config.nu
    t1, t2 = tolerances(
        spec.eps_g, spec.eps_f, config.eps_r, sigma_min_g, config.gamma, alpha, nu_k
    )
    cond_i = scaled_grad <= t1
    cond_ii = (scaled_grad > t1) and (scaled_grad <= t2)
    compl_inf = float(np.max(np.abs(np.asarray(x) * np.asarray(z) - mu)))
    c1 = scaled_grad <= max(t1, t2) + config.kappa_mu * mu
    c2 = compl_inf <= config.kappa_mu * mu
    return StopReport(
        t1=t1,
        t2=t2,
        nu_hat1=n1,
        nu_hat2=n2,
        nu_k=nu_k,
        scaled_grad=scaled_grad,
        cond_i=cond_i,
        cond_ii=cond_ii,
        c1=c1,
        c2=c2,
        compl_inf=compl_inf,
    )


def noise_to_signal(true_grad_phi: np.ndarray, grad_tilde: np.ndarray, hm) -> float:
    """Ratio ||noise||_{G^-1} / ||true grad||_{G^-1}, a diagnostic.

    Computable only for synthetic problems where the noiseless barrier
    gradient is available.  Zero denominator with positive numerator maps
    to +inf.
    """
    noise_vec = np.asarray(grad_tilde, dtype=float) - np.asarray(true_grad_phi, dtype=float)
    num = linalg.scaled_norm_inv(hm.factorization, noise_vec)
    den = linalg.scaled_norm_inv(hm.factorization, true_grad_phi)
    if den == 0.0:
        return math.inf if num > 0 else 0.0
    return num / den
