import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.optimize import linprog

from handsoff import LtiSystem
from handsoff.l1lp import in_budget_set, solve_lp, transcribe, value_l1
from handsoff.linalg import cell_integral
from handsoff.model import l1_norm

from conftest import LN2, V_999, X1


class TestTranscribe:
    def test_single_cell(self, scalar):
        t = transcribe(scalar, [1.0], 1)
        assert t.G.shape == (1, 1)
        assert t.G[0, 0] == pytest.approx(X1, rel=1e-13)

    def test_columns_are_cell_integrals(self, oscillator):
        t = transcribe(oscillator, [0.5, 0.5], 9)
        assert t.N == 9
        dt = oscillator.T / 9
        for k in (0, 4, 8):
            np.testing.assert_allclose(
                t.G[:, k], cell_integral(oscillator.A, oscillator.B, k * dt, (k + 1) * dt)[:, 0],
                rtol=1e-12, atol=1e-15)

    def test_objective_is_dt(self, scalar):
        c, A, b, upper = transcribe(scalar, [1.0], 10).arrays()
        assert np.all(c == 0.5) and A.shape == (1, 20)
        np.testing.assert_array_equal(b, [-1.0])
        np.testing.assert_array_equal(upper, np.ones(20))

    @pytest.mark.parametrize("N", [0, -3])
    def test_rejects_bad_cell_count(self, scalar, N):
        with pytest.raises(ValueError):
            transcribe(scalar, [0.0], N)

    def test_rejects_wrong_state_size(self, oscillator):
        with pytest.raises(ValueError):
            transcribe(oscillator, [1.0], 4)


class TestSolve:
    def test_unit_state(self, scalar):
        res = solve_lp(transcribe(scalar, [1.0], 2000))
        assert res.status == "solved"
        assert abs(res.value - LN2) <= 2 * scalar.T / 2000
        assert res.residual <= 1e-9

    def test_outside_reach(self, scalar):
        res = solve_lp(transcribe(scalar, [2.5], 2000))
        assert res.status == "infeasible" and not res.feasible
        assert res.value == np.inf

    def test_origin(self, oscillator):
        res = solve_lp(transcribe(oscillator, [0.0, 0.0], 400))
        assert res.value == 0.0
        assert not np.any(res.control.values)

    def test_near_boundary(self, scalar):
        N = 2000
        assert abs(value_l1(scalar, [0.999 * X1], N) - V_999) <= 2 * scalar.T / N

    def test_value_is_l1_of_control(self, oscillator):
        res = solve_lp(transcribe(oscillator, [1.0, -0.3], 500))
        assert res.value == pytest.approx(l1_norm(res.control), abs=1e-9)

    def test_fractional_cells_at_most_n(self, oscillator):
        rng = np.random.default_rng(4)
        for _ in range(20):
            xi = rng.uniform(-1.5, 1.5, 2)
            res = solve_lp(transcribe(oscillator, xi, 300))
            if res.feasible:
                assert res.fractional_cells <= 2

    @pytest.mark.parametrize("warm", [True, False])
    def test_matches_highs(self, oscillator, warm):
        rng = np.random.default_rng(8)
        for _ in range(15):
            xi = rng.uniform(-2.5, 2.5, 2)
            t = transcribe(oscillator, xi, 200)
            c, A, b, upper = t.arrays()
            ref = linprog(c, A_eq=A, b_eq=b, bounds=[(0, 1)] * len(c), method="highs")
            res = solve_lp(t, warm_start=warm)
            if ref.status == 2:
                assert res.status == "infeasible"
            else:
                assert res.value == pytest.approx(ref.fun, abs=1e-8)

    def test_costate_reproduces_switch_level(self, scalar):
        # the LP dual is a costate estimate: |B' e^{-A't} p0| crosses 1 at the switch
        res = solve_lp(transcribe(scalar, [1.0], 2000))
        p0 = res.costate[0]
        assert abs(2.0 * np.exp(-LN2) * p0) == pytest.approx(1.0, abs=5e-3)


class TestValueProperties:
    def test_refinement_diagnostic(self, scalar):
        vN, v2N = value_l1(scalar, [1.0], 500, refine=True)
        assert v2N <= vN + scalar.n * scalar.T / 500

    @settings(max_examples=25, deadline=None)
    @given(st.floats(-1.9, 1.9))
    def test_symmetry_scalar(self, x):
        sys = LtiSystem([[1.0]], [2.0], 5.0)
        assert value_l1(sys, [x], 400) == pytest.approx(value_l1(sys, [-x], 400), abs=1e-9)

    def test_symmetry_oscillator(self, oscillator):
        rng = np.random.default_rng(12)
        for _ in range(10):
            xi = rng.uniform(-1.5, 1.5, 2)
            assert value_l1(oscillator, xi, 400) == pytest.approx(
                value_l1(oscillator, -xi, 400), abs=1e-9)

    def test_quasi_convex_along_rays(self, oscillator):
        rng = np.random.default_rng(13)
        for _ in range(10):
            xi = rng.uniform(-1.0, 1.0, 2)
            values = [value_l1(oscillator, c * xi, 400) for c in (1.0, 1.3, 1.8, 2.5)]
            assert all(b >= a - 1e-9 for a, b in zip(values, values[1:]))

    def test_bounded_by_horizon(self, scalar):
        for x in np.linspace(-X1, X1, 9):
            v = value_l1(scalar, [x], 200)
            assert 0.0 <= v <= scalar.T + scalar.T / 200


class TestBudgetSet:
    def test_zero_budget(self, scalar):
        assert in_budget_set(scalar, [0.0], 0.0, 200)
        assert not in_budget_set(scalar, [0.5], 0.0, 200)

    def test_sublevel_identity(self, scalar):
        N = 400
        tol = 2 * scalar.T / N
        for x in np.linspace(-1.9, 1.9, 15):
            v = value_l1(scalar, [x], N)
            for alpha in (0.5, 1.0, 2.5, 5.0):
                inside = in_budget_set(scalar, [x], alpha, N)
                if inside:
                    assert v <= alpha + tol
                elif np.isfinite(v):
                    assert v >= alpha - tol

    def test_dual_and_primal_agree(self, oscillator):
        rng = np.random.default_rng(21)
        for _ in range(25):
            xi = rng.uniform(-2, 2, 2)
            alpha = rng.uniform(0, oscillator.T)
            assert (in_budget_set(oscillator, xi, alpha, 200)
                    == in_budget_set(oscillator, xi, alpha, 200, method="primal"))

    def test_unknown_method(self, scalar):
        with pytest.raises(ValueError):
            in_budget_set(scalar, [0.0], 1.0, 10, method="interior")
