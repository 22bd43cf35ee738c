"""Noisy oracle wrappers with bounded, non-diminishing, seeded noise.

The noise model is deliberately adversarial-but-bounded rather than
stochastic-vanishing: every f call is off by exactly eps_f (random sign),
gradient noise has Euclidean norm at most (or, on the sphere model,
exactly) eps_g, and Hessian noise perturbs the diagonal by +/- eps_h,
which has spectral norm exactly eps_h.  Fresh noise is drawn on every
call, so two evaluations at the same point generally differ.

Streams are Philox counter-based generators keyed by (seed, label), which
makes whole solver runs bit-for-bit reproducible.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum

import numpy as np


class GradModel(str, Enum):
    """Distribution of the gradient perturbation."""

    SPHERE_SURFACE = "sphere_surface"
    ELEMENTWISE_UNIFORM = "elementwise_uniform"
    # Raw per-component support [-eps_g, eps_g]; its l2 norm can exceed
    # eps_g by up to sqrt(n), so theory-facing runs use the scaled variant.
    ELEMENTWISE_UNIFORM_RAW = "elementwise_uniform_raw"


@dataclass(frozen=True)
class NoiseSpec:
    eps_f: float = 0.0
    eps_g: float = 0.0
    eps_h: float = 0.0
    grad_model: GradModel = GradModel.SPHERE_SURFACE
    seed: int = 0

    def __post_init__(self):
        for name in ("eps_f", "eps_g", "eps_h"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


def _label_stream(seed: int, label: str) -> np.random.Generator:
    digest = hashlib.sha256(label.encode("utf-8")).digest()
    label_key = int.from_bytes(digest[:8], "little")
    seq = np.random.SeedSequence([np.uint64(seed), np.uint64(label_key)])
    return np.random.Generator(np.random.Philox(seq))


class NoisyOracle:
    """Wraps a Problem into noisy f, g, H oracles with evaluation counters."""

    def __init__(self, problem, spec: NoiseSpec, label: str = "root"):
        self.problem = problem
        self.spec = spec
        self.label = label
        self._rng = _label_stream(spec.seed, label)
        self.f_evals = 0
        self.g_evals = 0
        self.h_evals = 0

    def fork(self, label: str) -> "NoisyOracle":
        """Independent oracle on a stream derived from (seed, label)."""
        return NoisyOracle(self.problem, self.spec, label=label)

    def f(self, x: np.ndarray) -> float:
        self.f_evals += 1
        val = self.problem.eval_f(x)
        if self.spec.eps_f > 0:
            sign = 2.0 * self._rng.integers(0, 2) - 1.0
            val = val + sign * self.spec.eps_f
        return float(val)

    def grad(self, x: np.ndarray) -> np.ndarray:
        self.g_evals += 1
        g = np.asarray(self.problem.eval_g(x), dtype=float)
        eps = self.spec.eps_g
        if eps == 0:
            return g
        n = g.shape[0]
        model = self.spec.grad_model
        if model is GradModel.SPHERE_SURFACE:
            u = self._rng.standard_normal(n)
            norm = np.linalg.norm(u)
            while norm < 1e-12:
                u = self._rng.standard_normal(n)
                norm = np.linalg.norm(u)
            return g + eps * (u / norm)
        if model is GradModel.ELEMENTWISE_UNIFORM:
            half = eps / np.sqrt(n)
            return g + self._rng.uniform(-half, half, n)
        if model is GradModel.ELEMENTWISE_UNIFORM_RAW:
            return g + self._rng.uniform(-eps, eps, n)
        raise ValueError(f"unknown gradient noise model {model!r}")

    def hess(self, x: np.ndarray) -> np.ndarray:
        self.h_evals += 1
        h = np.asarray(self.problem.eval_h(x), dtype=float)
        if self.spec.eps_h > 0:
            signs = 2.0 * self._rng.integers(0, 2, h.shape[0]) - 1.0
            h = h + np.diag(self.spec.eps_h * signs)
        return h
