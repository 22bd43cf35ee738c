import numpy as np
import pytest

from noisy_barrier.analysis import scaled_error
from noisy_barrier.barrier import HessianMode, assemble_hessian
from noisy_barrier.linalg import cholesky
from noisy_barrier.noise import NoiseSpec, NoisyOracle
from noisy_barrier.problems import lookup
from noisy_barrier.solver import (
    FixedMu,
    Heuristic,
    Periodic,
    SolverConfig,
    StoppingTestOnly,
    dual_direction,
    primal_direction,
    project_duals,
    solve_continuation,
    solve_fixed_mu,
    trajectory_csv,
)

NOISY = NoiseSpec(eps_f=1e-2, eps_g=1e-1, eps_h=1e-1, seed=3)
QUIET = NoiseSpec(seed=0)


def noiseless_config(**kw):
    return SolverConfig(eps_r=1e-12, **kw)


def noisy_config(**kw):
    return SolverConfig(eps_r=2.05e-2, **kw)


class TestSolverConfig:
    def test_rejects_bad_nu(self):
        with pytest.raises(ValueError):
            SolverConfig(eps_r=1e-3, nu=0.5)

    def test_rejects_bad_kappa_dec(self):
        with pytest.raises(ValueError):
            SolverConfig(eps_r=1e-3, kappa_dec=1.0)

    def test_eps_r_checked_against_noise(self):
        cfg = SolverConfig(eps_r=1e-3)
        with pytest.raises(ValueError):
            cfg.validate_against(NoiseSpec(eps_f=1e-2))
        cfg.validate_against(NoiseSpec(eps_f=1e-4))

    def test_rejects_bad_period(self):
        with pytest.raises(ValueError):
            Periodic(0)


class TestDirections:
    def test_primal_identity(self):
        hm = assemble_hessian(
            NoisyOracle(lookup("quad-1"), QUIET), HessianMode.PRIMAL, 1.0, np.ones(1)
        )
        # G = 1 + mu/x^2 = 2 at x = 1
        d = primal_direction(hm, np.array([2.0]))
        assert d[0] == pytest.approx(-1.0)

    def test_primal_zero_gradient(self):
        hm = assemble_hessian(
            NoisyOracle(lookup("harkerp2-4"), QUIET),
            HessianMode.PRIMAL,
            0.1,
            np.ones(4),
        )
        np.testing.assert_array_equal(primal_direction(hm, np.zeros(4)), np.zeros(4))

    def test_primal_residual_bound(self):
        o = NoisyOracle(lookup("harkerp2-4"), NoiseSpec(eps_h=0.1, seed=5))
        rng = np.random.default_rng(2)
        for _ in range(30):
            x = rng.uniform(0.2, 3.0, 4)
            g = rng.standard_normal(4)
            hm = assemble_hessian(o, HessianMode.PRIMAL, 0.1, x)
            d = primal_direction(hm, g)
            assert np.linalg.norm(hm.matrix @ d + g) <= 1e-9 * (1 + np.linalg.norm(g))

    def test_dual_centered_with_zero_step(self):
        x = np.array([2.0, 0.5])
        mu = 0.3
        dz = dual_direction(x, mu / x, mu, np.zeros(2))
        np.testing.assert_allclose(dz, np.zeros(2), atol=1e-16)

    def test_dual_arithmetic(self):
        assert dual_direction(
            np.array([1.0]), np.array([2.0]), 1.0, np.array([0.0])
        )[0] == pytest.approx(-1.0)
        assert dual_direction(
            np.array([2.0]), np.array([1.0]), 4.0, np.array([2.0])
        )[0] == pytest.approx(0.0)

    def test_dual_satisfies_second_row(self):
        rng = np.random.default_rng(8)
        for _ in range(50):
            n = int(rng.integers(1, 6))
            x = rng.uniform(0.1, 3.0, n)
            z = rng.uniform(0.1, 3.0, n)
            d = rng.standard_normal(n)
            mu = float(rng.uniform(1e-4, 1.0))
            dz = dual_direction(x, z, mu, d)
            assert np.linalg.norm(z * d + x * dz + (x * z - mu)) <= 1e-10


class TestProjectDuals:
    def test_inside_band_untouched(self):
        z = project_duals(np.array([1.0]), np.array([5.0]), 0.1, 1e4)
        assert z[0] == 5.0

    def test_lower_clamp(self):
        z = project_duals(np.array([1.0]), np.array([1e-9]), 0.1, 1e4)
        assert z[0] == pytest.approx(1e-5)

    def test_upper_clamp(self):
        z = project_duals(np.array([1.0]), np.array([1e9]), 0.1, 1e4)
        assert z[0] == pytest.approx(1e3)


class TestSolveFixedMu:
    def test_illustrative_newton_converges_fast(self):
        p = lookup("illustrative")
        o = NoisyOracle(p, QUIET)
        cfg = noiseless_config(hessian_mode=HessianMode.PRIMAL)
        traj = solve_fixed_mu(o, cfg, 0.1, np.array([2.0, 2.0]), max_iters=20)
        assert traj.records[-1].grad_tilde_norm <= 1e-10

    def test_quad1_hits_closed_form(self):
        p = lookup("quad-1")
        o = NoisyOracle(p, QUIET)
        cfg = noiseless_config(hessian_mode=HessianMode.PRIMAL)
        traj = solve_fixed_mu(o, cfg, 0.1, p.x0, max_iters=40)
        assert abs(traj.final_x[0] - (1.0 + np.sqrt(1.1))) <= 1e-9

    def test_harkerp2_primal_dual_converges(self):
        p = lookup("harkerp2-4")
        o = NoisyOracle(p, QUIET)
        cfg = noiseless_config()
        traj = solve_fixed_mu(o, cfg, 0.1, p.x0, max_iters=30)
        assert traj.records[-1].grad_tilde_norm <= 1e-6

    def test_max_inner_termination_reason(self):
        o = NoisyOracle(lookup("quad-1"), QUIET)
        traj = solve_fixed_mu(o, noiseless_config(), 0.1, np.array([1.0]), max_iters=3)
        assert traj.termination == "max_inner"
        assert len(traj) == 3

    def test_stop_predicate_halts_loop(self):
        o = NoisyOracle(lookup("quad-1"), QUIET)
        traj = solve_fixed_mu(
            o,
            noiseless_config(),
            0.1,
            np.array([1.0]),
            stop=lambda k, rep: k >= 4,
            max_iters=100,
        )
        assert traj.termination == "stop_predicate"
        assert len(traj) == 5

    def test_default_duals_start_centered(self):
        o = NoisyOracle(lookup("harkerp2-4"), QUIET)
        traj = solve_fixed_mu(o, noiseless_config(), 0.1, np.ones(4), max_iters=1)
        assert traj.records[0].compl_inf == 0.0

    def test_rejects_non_interior_start(self):
        o = NoisyOracle(lookup("quad-1"), QUIET)
        with pytest.raises(ValueError):
            solve_fixed_mu(o, noiseless_config(), 0.1, np.array([0.0]))

    def test_monotone_scaled_error_near_path(self):
        # noiseless primal-dual from a small perturbation off the barrier
        # minimizer: the scaled error must fall monotonically into roundoff
        p = lookup("illustrative")
        o = NoisyOracle(p, QUIET)
        mu = 1e-6
        xs = p.central_path.x_of_mu(mu)
        x0 = xs * (1.0 + 0.005)
        cfg = noiseless_config()
        traj = solve_fixed_mu(o, cfg, mu, x0, max_iters=30)
        errors = [scaled_error(r.x, xs) for r in traj.records]
        errors.append(scaled_error(traj.final_x, xs))
        assert errors[-1] <= 1e-10
        drops = np.diff(errors)
        assert np.all(drops[np.abs(np.array(errors[:-1])) > 1e-12] <= 0)


class TestSolveContinuation:
    def test_illustrative_reaches_solution(self):
        p = lookup("illustrative")
        o = NoisyOracle(p, QUIET)
        cfg = noiseless_config(mu_min=1e-7, mu_strategy=StoppingTestOnly())
        traj = solve_continuation(o, cfg)
        assert traj.termination == "mu_min_reached"
        assert np.max(np.abs(traj.final_x - p.solution.x_star)) <= 1e-5

    def test_periodic_iteration_count(self):
        o = NoisyOracle(lookup("illustrative"), QUIET)
        cfg = noiseless_config(mu_strategy=Periodic(40), mu_min=1e-7)
        traj = solve_continuation(o, cfg)
        assert len(traj) == 280
        outer = [r.outer for r in traj.records]
        assert max(outer) == 6

    def test_heuristic_terminates_quickly_under_noise(self):
        p = lookup("harkerp2-4")
        for seed in range(10):
            spec = NoiseSpec(eps_f=1e-2, eps_g=1e-1, eps_h=1e-1, seed=seed)
            o = NoisyOracle(p, spec)
            cfg = noisy_config(mu_strategy=Heuristic(), mu_min=1e-7)
            traj = solve_continuation(o, cfg)
            assert traj.termination == "mu_min_reached"
            assert len(traj) <= 200

    def test_fixed_mu_strategy_never_advances(self):
        o = NoisyOracle(lookup("quad-1"), QUIET)
        cfg = noiseless_config(mu_strategy=FixedMu(), max_inner=25)
        traj = solve_continuation(o, cfg)
        assert len(traj) == 25
        assert all(r.mu == cfg.mu0 for r in traj.records)

    def test_mu_decreases_by_kappa_dec(self):
        o = NoisyOracle(lookup("illustrative"), QUIET)
        cfg = noiseless_config(mu_strategy=Periodic(5), mu_min=1e-4)
        traj = solve_continuation(o, cfg)
        stage_mus = {}
        for r in traj.records:
            stage_mus.setdefault(r.outer, r.mu)
        levels = [stage_mus[k] for k in sorted(stage_mus)]
        for prev, nxt in zip(levels, levels[1:]):
            assert nxt == pytest.approx(prev * cfg.kappa_dec)

    def test_inner_indices_consecutive(self):
        o = NoisyOracle(lookup("illustrative"), NOISY)
        cfg = noisy_config(mu_strategy=Periodic(7), mu_min=1e-3)
        traj = solve_continuation(o, cfg)
        by_stage = {}
        for r in traj.records:
            by_stage.setdefault(r.outer, []).append(r.inner)
        for inners in by_stage.values():
            assert inners == list(range(len(inners)))


@pytest.fixture(scope="module")
def noisy_traj():
    o = NoisyOracle(lookup("harkerp2-4"), NOISY)
    cfg = noisy_config(mu_strategy=Periodic(30), mu_min=1e-5)
    return solve_continuation(o, cfg)


class TestTrajectoryInvariants:
    def test_strict_feasibility(self, noisy_traj):
        for r in noisy_traj.records:
            assert np.all(r.x > 0)
            assert np.all(r.z > 0)

    def test_armijo_holds_at_acceptance(self, noisy_traj):
        for r in noisy_traj.records:
            assert r.armijo_lhs <= r.armijo_rhs

    def test_alpha_within_cap(self, noisy_traj):
        for r in noisy_traj.records:
            assert r.alpha <= r.alpha_max
            assert r.alpha == r.alpha_max * 2.0**-r.halvings

    def test_nu_hat1_at_least_nu(self, noisy_traj):
        for r in noisy_traj.records:
            assert r.nu_hat1 >= 1e-6

    def test_primal_dual_residuals(self, noisy_traj):
        # the recorded residuals describe the unregularized system, so the
        # bound applies where no shift was needed (everywhere, here)
        for r in noisy_traj.records:
            if r.lam == 0.0:
                assert r.pd_res1 <= 1e-8 * (1 + np.linalg.norm(r.grad_tilde))
                assert r.pd_res2 <= 1e-8

    def test_f_evals_strictly_increasing(self, noisy_traj):
        counts = [r.f_evals for r in noisy_traj.records]
        assert all(b > a for a, b in zip(counts, counts[1:]))

    def test_first_trigger_finds_stop(self, noisy_traj):
        idx = noisy_traj.first_trigger()
        assert idx is not None
        r = noisy_traj.records[idx]
        assert r.cond_i or r.cond_ii


class TestDeterminism:
    def run_once(self, seed=11):
        spec = NoiseSpec(eps_f=1e-2, eps_g=1e-1, eps_h=1e-1, seed=seed)
        o = NoisyOracle(lookup("harkerp2-4"), spec)
        cfg = noisy_config(mu_strategy=Heuristic(), mu_min=1e-6)
        return solve_continuation(o, cfg)

    def test_bit_identical_repeat(self):
        a = trajectory_csv(self.run_once())
        b = trajectory_csv(self.run_once())
        assert a == b

    def test_different_seeds_differ(self):
        a = trajectory_csv(self.run_once(seed=11))
        b = trajectory_csv(self.run_once(seed=12))
        assert a != b


class TestTrajectoryCsv:
    def test_round_trips_through_float_parse(self, tmp_path):
        o = NoisyOracle(lookup("illustrative"), NOISY)
        traj = solve_fixed_mu(o, noisy_config(), 0.1, np.array([2.0, 2.0]), max_iters=5)
        path = tmp_path / "traj.csv"
        traj.write_csv(path)
        text = path.read_text()
        assert "\r" not in text
        lines = text.strip().split("\n")
        header = lines[0].split(",")
        assert header[:5] == ["outer", "inner", "mu", "x0", "x1"]
        assert len(lines) == 6
        for line in lines[1:]:
            cells = line.split(",")
            assert len(cells) == len(header)
        # 17 significant digits reproduce the doubles exactly
        first = lines[1].split(",")
        assert float(first[header.index("mu")]) == traj.records[0].mu
        assert float(first[header.index("x0")]) == traj.records[0].x[0]
        assert float(first[header.index("alpha")]) == traj.records[0].alpha

    def test_empty_trajectory_serializes_empty(self):
        from noisy_barrier.solver import Trajectory

        assert trajectory_csv(Trajectory()) == ""
