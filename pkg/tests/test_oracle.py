import numpy as np
import pytest
from conftest import random_state

from qwasserstein import GaussianState, wasserstein2
from qwasserstein.errors import InfeasibleInput, OutOfRange, UnphysicalState
from qwasserstein.gaussian import OMEGA
from qwasserstein.linalg import min_eig_herm4
from qwasserstein.oracle import (
    OracleOptions,
    coupling_margin,
    diagonal_restriction_check,
    minimize_cost,
    optimal_K,
    optimal_K_bruteforce,
    random_feasible_x,
    search_diagonal_counterexample,
)

SQ = GaussianState.squeezed_thermal

# Minima of the coupling problem from an independent interior-point SDP solve
# (Clarabel, gap tolerance 1e-12); they do not involve this package's formulas.
SDP_MINIMA = [
    (1.5 * np.eye(2), np.diag([np.exp(-1), np.exp(1)]), 0.7649509853616725),
    (SQ(1.2, 0.6, 0).cov, SQ(2.0, 0.4, np.pi / 2).cov, 2.143994080482293),
    (SQ(0.8, 1.0, 0.3).cov, SQ(1.7, 0.2, 1.9).cov, 2.5710227905728527),
]


class TestOptions:
    @pytest.mark.parametrize(
        "kwargs",
        [{"starts": 0}, {"max_iters": 0}, {"feas_tol": 0.0}, {"conv_tol": -1.0}, {"seed": -1}, {"seed": 2**64}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            OracleOptions(**kwargs)


class TestCouplingMargin:
    def test_examples(self):
        assert coupling_margin(0.5 * np.eye(2), 0.5 * np.eye(2), np.zeros((2, 2))) == pytest.approx(0.0, abs=1e-12)
        assert coupling_margin(1.5 * np.eye(2), np.eye(2), np.eye(2)) >= -1e-10
        assert coupling_margin(1.5 * np.eye(2), np.eye(2), 1.1 * np.eye(2)) < 0

    def test_hbar(self):
        # at hbar = 0.5 the same blocks leave more room for correlations
        assert coupling_margin(1.5 * np.eye(2), np.eye(2), 1.1 * np.eye(2), hbar=0.5) > 0


class TestMinimizeCost:
    def test_thermal(self):
        res = minimize_cost(1.5 * np.eye(2), np.eye(2))
        assert res.cost == pytest.approx(0.5, abs=1e-6)

    def test_vacuum(self):
        res = minimize_cost(0.5 * np.eye(2), 0.5 * np.eye(2))
        assert res.cost == pytest.approx(1.0, abs=1e-6)
        np.testing.assert_allclose(res.x_opt, np.zeros((2, 2)), atol=1e-6)

    @pytest.mark.parametrize("a, b, expected", SDP_MINIMA)
    def test_matches_sdp(self, a, b, expected):
        assert minimize_cost(a, b).cost == pytest.approx(expected, abs=1e-6)

    @pytest.mark.parametrize("a, b, expected", SDP_MINIMA)
    def test_closed_form_is_above_the_minimum(self, a, b, expected):
        closed = wasserstein2(GaussianState(a), GaussianState(b)).d_squared
        assert closed > expected + 1e-3

    def test_result_invariants(self, rng):
        opts = OracleOptions(starts=3)
        for _ in range(5):
            a, b = random_state(rng).cov, random_state(rng).cov
            res = minimize_cost(a, b, opts)
            assert res.feasibility_margin >= -opts.feas_tol
            assert res.feasibility_margin == pytest.approx(coupling_margin(a, b, res.x_opt), abs=1e-12)
            assert res.cost == pytest.approx(0.5 * np.trace(a + b - 2 * res.x_opt), abs=1e-12)
            assert res.iterations > 0

    def test_deterministic(self):
        a, b = SQ(1.3, 0.8, 0.4).cov, SQ(2.2, 0.1, 2.0).cov
        r1 = minimize_cost(a, b, OracleOptions(seed=7))
        r2 = minimize_cost(a, b, OracleOptions(seed=7))
        assert r1.cost == r2.cost
        np.testing.assert_array_equal(r1.x_opt, r2.x_opt)

    def test_thermal_pairs_match_closed_form(self, rng):
        for _ in range(10):
            nu_a, nu_b = rng.uniform(0.5, 3.0, 2)
            res = minimize_cost(nu_a * np.eye(2), nu_b * np.eye(2), OracleOptions(starts=2))
            closed = wasserstein2(GaussianState.thermal(nu_a), GaussianState.thermal(nu_b)).d_squared
            assert res.cost == pytest.approx(closed, abs=1e-6)

    def test_unitarily_related_pairs_match_closed_form(self, rng):
        for _ in range(5):
            b = random_state(rng)
            a = GaussianState.squeezed_thermal(b.nu, rng.uniform(0, 1.5), rng.uniform(0, 2 * np.pi))
            closed = wasserstein2(a, b).d_squared
            assert minimize_cost(a.cov, b.cov, OracleOptions(starts=2)).cost == pytest.approx(closed, abs=1e-6)

    def test_never_above_closed_form(self, rng):
        # the closed-form coupling is feasible, so a working minimizer cannot do worse
        for _ in range(10):
            a, b = random_state(rng), random_state(rng)
            closed = wasserstein2(a, b).d_squared
            assert minimize_cost(a.cov, b.cov, OracleOptions(starts=2)).cost <= closed + 1e-6

    def test_hbar(self):
        res = minimize_cost(0.75 * np.eye(2), 0.5 * np.eye(2), hbar=0.5)
        # rescaling: D^2(A, B; hbar) = hbar * D^2(A/hbar, B/hbar; 1)
        ref = 0.5 * minimize_cost(1.5 * np.eye(2), np.eye(2)).cost
        assert res.cost == pytest.approx(ref, abs=1e-6)

    def test_unphysical(self):
        with pytest.raises(UnphysicalState):
            minimize_cost(0.4 * np.eye(2), np.eye(2))


class TestDiagonalRestriction:
    A = 1.5 * np.eye(2)
    B = np.eye(2)

    def test_examples(self):
        x = np.array([[0.5, 0.3], [-0.2, 0.4]])
        assert coupling_margin(self.A, self.B, x) >= 0
        assert diagonal_restriction_check(self.A, self.B, x)
        assert diagonal_restriction_check(self.A, self.B, np.zeros((2, 2)))

    def test_infeasible_input(self):
        with pytest.raises(InfeasibleInput):
            diagonal_restriction_check(self.A, self.B, 2 * np.eye(2))

    def test_random_thermal(self, rng):
        for _ in range(100):
            nu_a, nu_b = rng.uniform(0.5, 3.0, 2)
            a, b = nu_a * np.eye(2), nu_b * np.eye(2)
            x = random_feasible_x(a, b, rng)
            assert coupling_margin(a, b, x) >= -1e-9
            assert diagonal_restriction_check(a, b, x)

    def test_counterexample_non_thermal(self):
        a = np.diag([3.0, 0.75])
        x = search_diagonal_counterexample(a, np.eye(2), trials=100, seed=1)
        assert x is not None
        assert coupling_margin(a, np.eye(2), x) >= -1e-9
        assert coupling_margin(a, np.eye(2), 0.5 * np.trace(x) * np.eye(2)) < -1e-3
        assert not diagonal_restriction_check(a, np.eye(2), x)

    def test_no_counterexample_thermal(self):
        assert search_diagonal_counterexample(1.5 * np.eye(2), np.eye(2), trials=200) is None


class TestOptimalK:
    def test_examples(self):
        np.testing.assert_allclose(optimal_K(0.7, 0.7), np.eye(2))
        np.testing.assert_allclose(optimal_K(1.0, 0.5), np.sqrt(2.5 / 3) * np.eye(2))
        np.testing.assert_allclose(optimal_K(0.5, 1.0), np.sqrt(1 / 1.5) * np.eye(2))

    @pytest.mark.parametrize("a0, b0", [(2.5, 0.0), (0.0, -3.0), (-2.0, -2.0), (float("nan"), 0.0)])
    def test_out_of_range(self, a0, b0):
        with pytest.raises(OutOfRange):
            optimal_K(a0, b0)

    def test_closed_form_is_feasible(self):
        eye = np.eye(2)
        for a0 in (-1.5, 0.0, 1.5):
            for b0 in (-1.5, 0.0, 1.5):
                k = optimal_K(a0, b0)
                lhs = (eye - 0.5j * b0 * OMEGA) - k @ (eye - 0.5j * a0 * OMEGA) @ k
                assert min_eig_herm4(lhs) >= -1e-12

    @pytest.mark.parametrize("a0", [-1.5, 0.0, 1.5])
    @pytest.mark.parametrize("b0", [-1.5, 0.0, 1.5])
    def test_bruteforce(self, a0, b0):
        assert optimal_K_bruteforce(a0, b0) == pytest.approx(np.trace(optimal_K(a0, b0)), abs=1e-3)

    def test_bruteforce_range(self):
        with pytest.raises(OutOfRange):
            optimal_K_bruteforce(2.0, 0.0)
