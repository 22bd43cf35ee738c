import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import fd_gradient, fd_hessian, rel_err
from noisy_barrier.problems import (
    UnknownProblem,
    harkerp2,
    illustrative,
    lookup,
    registry,
    synthetic_quadratic,
)

MU_LADDER = [10.0**-k for k in range(1, 9)]


def all_problems():
    return [(name, ctor()) for name, ctor in registry().items()]


class TestHarkerp2:
    def test_f_at_solution(self):
        p = harkerp2(4)
        assert p.eval_f(np.array([1.0, 0.0, 0.0, 0.0])) == pytest.approx(-0.5)

    def test_f_at_ones(self):
        p = harkerp2(4)
        assert p.eval_f(np.ones(4)) == pytest.approx(38.0)

    def test_hessian_n4(self):
        p = harkerp2(4)
        expected = np.array(
            [
                [1.0, 2.0, 2.0, 2.0],
                [2.0, 5.0, 6.0, 6.0],
                [2.0, 6.0, 9.0, 10.0],
                [2.0, 6.0, 10.0, 13.0],
            ]
        )
        np.testing.assert_array_equal(p.eval_h(np.ones(4)), expected)

    def test_known_solution(self):
        sol = harkerp2(4).solution
        np.testing.assert_array_equal(sol.x_star, [1.0, 0.0, 0.0, 0.0])
        np.testing.assert_array_equal(sol.z_star, [0.0, 1.0, 1.0, 1.0])
        assert sol.active_strict == (1, 2, 3)
        assert sol.inactive_bounded == (0,)

    def test_kkt_exact_at_solution(self):
        p = harkerp2(4)
        sol = p.solution
        np.testing.assert_array_equal(p.eval_g(sol.x_star) - sol.z_star, np.zeros(4))
        np.testing.assert_array_equal(sol.x_star * sol.z_star, np.zeros(4))

    def test_start_point(self):
        np.testing.assert_array_equal(harkerp2(4).x0, [1.0, 2.0, 3.0, 4.0])

    def test_rejects_small_n(self):
        with pytest.raises(ValueError):
            harkerp2(1)


class TestIllustrative:
    def test_gradient_at_kink(self):
        p = illustrative()
        np.testing.assert_allclose(p.eval_g(np.array([1.0, 1.0])), [0.0, 1.0])

    def test_path_at_mu_2(self):
        p = illustrative()
        np.testing.assert_allclose(p.central_path.x_of_mu(2.0), [2.0, 2.0])
        np.testing.assert_allclose(p.central_path.z_of_mu(2.0), [1.0, 1.0])

    def test_solution_classification(self):
        sol = illustrative().solution
        np.testing.assert_array_equal(sol.x_star, [1.0, 0.0])
        np.testing.assert_array_equal(sol.z_star, [0.0, 1.0])
        assert sol.active_strict == (1,)
        assert sol.inactive_bounded == (0,)

    def test_path_limit_is_solution(self):
        p = illustrative()
        np.testing.assert_allclose(p.central_path.x_of_mu(1e-14), [1.0, 0.0], atol=1e-13)

    def test_rejects_non_positive_coefficients(self):
        with pytest.raises(ValueError):
            illustrative(0.0, 1.0)
        with pytest.raises(ValueError):
            illustrative(1.0, -2.0)

    @pytest.mark.parametrize("mu", MU_LADDER)
    def test_scaled_coefficients_keep_kkt_residual(self, mu):
        p = illustrative(1000.0, 1000.0)
        x = p.central_path.x_of_mu(mu)
        z = p.central_path.z_of_mu(mu)
        assert np.max(np.abs(p.eval_g(x) - z)) <= 1e-12
        assert np.max(np.abs(x * z - mu)) <= 1e-12


class TestSyntheticQuadratic:
    def test_barrier_minimizer_quad1(self):
        p = lookup("quad-1")
        x = p.central_path.x_of_mu(0.1)
        assert x[0] == pytest.approx(1.0 + np.sqrt(1.1), rel=1e-15)

    def test_gradient_vanishes_at_shift(self):
        p = synthetic_quadratic(2, diag=[1.0, 3.0], shift=[2.0, 0.5])
        np.testing.assert_array_equal(p.eval_g(np.array([2.0, 0.5])), [0.0, 0.0])

    def test_negative_shift_active_limit(self):
        p = synthetic_quadratic(1, diag=[1.0], shift=[-1.0])
        assert p.solution.x_star[0] == 0.0
        assert p.solution.z_star[0] == 1.0
        assert p.central_path.x_of_mu(1e-14)[0] == pytest.approx(0.0, abs=1e-13)

    def test_classification_partition(self):
        p = lookup("quad-mixed-3")
        sol = p.solution
        assert sol.inactive_bounded == (0,)
        assert sol.active_strict == (1,)
        assert sol.active_degenerate == (2,)

    def test_rejects_bad_diag(self):
        with pytest.raises(ValueError):
            synthetic_quadratic(1, diag=[0.0], shift=[1.0])
        with pytest.raises(ValueError):
            synthetic_quadratic(2, diag=[1.0], shift=[1.0, 2.0])

    @given(
        d=st.floats(0.1, 50.0, allow_nan=False),
        s=st.floats(-5.0, 5.0, allow_nan=False),
        mu=st.floats(1e-10, 1.0, allow_nan=False),
    )
    @settings(max_examples=200, deadline=None)
    def test_path_satisfies_stationarity(self, d, s, mu):
        p = synthetic_quadratic(1, diag=[d], shift=[s])
        x = p.central_path.x_of_mu(mu)
        assert x[0] > 0
        # barrier stationarity per coordinate: d x (x - s) = mu
        assert d * x[0] * (x[0] - s) == pytest.approx(mu, rel=1e-10)


class TestRegistry:
    def test_lookup_harkerp2(self):
        assert lookup("harkerp2-4").n == 4
        assert lookup("harkerp2-100").n == 100

    def test_lookup_illustrative_has_path(self):
        assert lookup("illustrative").central_path is not None

    def test_unknown_name(self):
        with pytest.raises(UnknownProblem):
            lookup("nosuch")

    def test_deterministic_ordering(self):
        assert list(registry()) == list(registry())


class TestSharedInvariants:
    @pytest.mark.parametrize("name,p", all_problems())
    def test_start_point_interior(self, name, p):
        assert np.all(p.x0 > 0)

    @pytest.mark.parametrize("name,p", all_problems())
    def test_gradient_matches_finite_differences(self, name, p):
        rng = np.random.default_rng(123)
        for _ in range(5):
            x = rng.uniform(0.5, 3.0, p.n)
            assert rel_err(fd_gradient(p.eval_f, x), p.eval_g(x)) <= 1e-5

    @pytest.mark.parametrize("name,p", all_problems())
    def test_hessian_matches_finite_differences(self, name, p):
        rng = np.random.default_rng(321)
        for _ in range(5):
            x = rng.uniform(0.5, 3.0, p.n)
            assert rel_err(fd_hessian(p.eval_g, x), p.eval_h(x)) <= 1e-5

    @pytest.mark.parametrize(
        "name,p", [(n, p) for n, p in all_problems() if p.central_path is not None]
    )
    @pytest.mark.parametrize("mu", MU_LADDER)
    def test_central_path_kkt_residual(self, name, p, mu):
        x = p.central_path.x_of_mu(mu)
        z = p.central_path.z_of_mu(mu)
        assert np.all(x > 0) and np.all(z > 0)
        assert np.max(np.abs(p.eval_g(x) - z)) <= 1e-12
        assert np.max(np.abs(x * z - mu)) <= 1e-12

    @pytest.mark.parametrize(
        "name,p", [(n, p) for n, p in all_problems() if p.solution is not None]
    )
    def test_solution_classification_partitions_indices(self, name, p):
        sol = p.solution
        combined = sorted(
            sol.active_strict + sol.active_degenerate + sol.inactive_bounded + sol.free
        )
        assert combined == list(range(p.n))
        assert np.all(sol.x_star >= 0)
        assert np.all(sol.z_star >= 0)
        np.testing.assert_array_equal(sol.x_star * sol.z_star, np.zeros(p.n))
        for i in sol.active_strict:
            assert sol.x_star[i] == 0 and sol.z_star[i] > 0
