"""Noise-tolerant interior-point method for bound-constrained optimization.

The package solves min f(x) subject to x >= 0 when f, its gradient and its
Hessian are only available through oracles carrying bounded,
non-diminishing noise.  It provides the log-barrier solver with a relaxed
Armijo line search, the noise-aware practical stopping test,
barrier-parameter update strategies, and the local-convergence radii and
active-set analysis tooling, plus a CLI that drives reproducible
experiments to CSV files and figures.
"""

from .analysis import (
    ActiveSetReport,
    LocalConstants,
    NoCrossing,
    RadiiReport,
    active_set_report,
    constants_generic,
    constants_illustrative,
    contraction_check,
    radii,
    radii_sweep,
    scaled_error,
)
from .barrier import (
    BarrierEval,
    HessianMode,
    HessianModel,
    NonInteriorPoint,
    RegularizationFailed,
    assemble_hessian,
    eval_barrier,
)
from .linalg import (
    Factorization,
    NotPositiveDefinite,
    cholesky,
    scaled_norm_diag_inv_sq,
    scaled_norm_inv,
    smallest_eigenvalue,
    solve,
)
from .noise import GradModel, NoiseSpec, NoisyOracle
from .problems import (
    CentralPath,
    KnownSolution,
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
    IterateRecord,
    Periodic,
    SolverConfig,
    StoppingTestOnly,
    Trajectory,
    dual_direction,
    primal_direction,
    project_duals,
    solve_continuation,
    solve_fixed_mu,
)
from .step import (
    HalvingCapExceeded,
    LineSearchResult,
    dual_fraction_to_boundary,
    fraction_to_boundary,
    relaxed_armijo_search,
)
from .stopping import (
    StopReport,
    evaluate_stop,
    noise_to_signal,
    nu_hat1,
    nu_hat2,
    tolerances,
)

__version__ = "0.1.0"
