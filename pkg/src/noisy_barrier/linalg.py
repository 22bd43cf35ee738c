"""Dense symmetric linear algebra used by the rest of the package.

Everything here operates on plain numpy arrays holding dense symmetric
matrices. Only the lower triangle is ever read, so callers may leave the
upper triangle stale. Matrices the solver produces stay well under
n = 2000, which keeps dense factorizations the right tool.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, eigh, solve_triangular
from scipy.linalg.lapack import dpotrf


class NotPositiveDefinite(Exception):
    """Cholesky failure; `pivot` is the 0-based index of the bad pivot."""

    def __init__(self, pivot: int):
        self.pivot = pivot
        super().__init__(f"matrix is not positive definite (pivot {pivot})")


@dataclass(frozen=True)
class Factorization:
    """Lower-triangular Cholesky factor L with L @ L.T equal to the input."""

    lower: np.ndarray

    @property
    def n(self) -> int:
        return self.lower.shape[0]


def cholesky(m: np.ndarray) -> Factorization:
    """Factor a symmetric positive-definite matrix.

    Raises NotPositiveDefinite (carrying the failing pivot index) instead of
    a generic linear-algebra error: callers probe definiteness by attempting
    this factorization, so failure is an ordinary outcome.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if not np.isfinite(m).all():
        raise ValueError("matrix has non-finite entries")
    c, info = dpotrf(m, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise NotPositiveDefinite(pivot=info - 1)
    if info < 0:
        raise ValueError(f"illegal value in argument {-info} of dpotrf")
    return Factorization(lower=c)


def solve(f: Factorization, rhs: np.ndarray) -> np.ndarray:
    """Solve m @ v = rhs given the Cholesky factor of m."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != f.n:
        raise ValueError(f"rhs has length {rhs.shape[0]}, factor is {f.n}x{f.n}")
    return cho_solve((f.lower, True), rhs)


def smallest_eigenvalue(m: np.ndarray) -> float:
    """Smallest eigenvalue of a symmetric matrix via dense eigendecomposition."""
    m = np.asarray(m, dtype=float)
    vals = eigh(m, eigvals_only=True, subset_by_index=[0, 0], lower=True)
    return float(vals[0])


def scaled_norm_inv(m, v: np.ndarray) -> float:
    """sqrt(v.T @ m^-1 @ v) for positive-definite m, via factor-solve.

    `m` may be a matrix or an existing Factorization; the explicit inverse is
    never formed. With L the Cholesky factor, v.T m^-1 v = ||L^-1 v||^2, and
    the forward substitution is one triangular solve.
    """
    fact = m if isinstance(m, Factorization) else cholesky(m)
    v = np.asarray(v, dtype=float)
    y = solve_triangular(fact.lower, v, lower=True)
    return float(np.linalg.norm(y))


def scaled_norm_diag_inv_sq(x_ref: np.ndarray, v: np.ndarray) -> float:
    """sqrt(sum((v_i / x_ref_i)^2)) for a strictly positive reference vector."""
    x_ref = np.asarray(x_ref, dtype=float)
    v = np.asarray(v, dtype=float)
    if np.any(x_ref <= 0):
        raise ValueError("reference vector must be strictly positive")
    return float(np.linalg.norm(v / x_ref))
