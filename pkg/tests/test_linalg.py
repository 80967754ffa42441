import mpmath
import numpy as np
import pytest
import scipy.integrate
import scipy.linalg
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from handsoff.linalg import (DimensionError, InvalidIntervalError, as_matrix,
                             cell_integral, cell_integrals, expm, kalman_rank)

from conftest import E5


def small_matrices(n):
    return arrays(np.float64, (n, n), elements=st.floats(-1, 1, allow_nan=False))


class TestExpm:
    def test_zero_matrix_gives_identity(self):
        assert np.array_equal(expm(np.zeros((3, 3)), 1.0), np.eye(3))

    @pytest.mark.parametrize("t", [0.1, 1.0, np.pi, 7.5, 20.0])
    def test_rotation_generator(self, t):
        R = expm([[0.0, 1.0], [-1.0, 0.0]], t)
        expected = np.array([[np.cos(t), np.sin(t)], [-np.sin(t), np.cos(t)]])
        np.testing.assert_allclose(R, expected, rtol=0, atol=1e-12)

    def test_scalar(self):
        assert expm([[1.0]], 5.0)[0, 0] == pytest.approx(E5, rel=1e-14)

    def test_non_square_rejected(self):
        with pytest.raises(DimensionError):
            expm(np.ones((2, 3)))

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            expm([[np.nan]])

    def test_non_finite_time_rejected(self):
        with pytest.raises(ValueError):
            expm([[1.0]], np.inf)

    def test_matches_high_precision_reference(self):
        # scipy's own expm drifts to ~2e-12 here, so the oracle is mpmath
        mpmath.mp.dps = 40
        rng = np.random.default_rng(3)
        for _ in range(60):
            n = rng.integers(1, 7)
            M = rng.standard_normal((n, n))
            M *= rng.uniform(0.01, 20.0) / np.linalg.norm(M, 1)
            ref = np.array(mpmath.expm(mpmath.matrix(M.tolist())).tolist(), dtype=float)
            err = np.linalg.norm(expm(M) - ref, 1) / np.linalg.norm(ref, 1)
            assert err <= 1e-12

    def test_close_to_scipy(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            M = rng.standard_normal((4, 4))
            np.testing.assert_allclose(expm(M, 0.7), scipy.linalg.expm(0.7 * M), rtol=1e-11)

    @settings(max_examples=60, deadline=None)
    @given(small_matrices(3), st.floats(-5, 5), st.floats(-5, 5))
    def test_group_law(self, M, s, t):
        M = 2.0 * M / max(np.linalg.norm(M, 2), 1.0)
        lhs = expm(M, s) @ expm(M, t)
        rhs = expm(M, s + t)
        np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-10 * np.abs(rhs).max())

    @settings(max_examples=60, deadline=None)
    @given(small_matrices(3), st.floats(-5, 5))
    def test_inverse(self, M, t):
        M = 2.0 * M / max(np.linalg.norm(M, 2), 1.0)
        np.testing.assert_allclose(expm(M, t) @ expm(M, -t), np.eye(3), atol=1e-10)


class TestCellIntegral:
    def test_zero_dynamics(self):
        assert cell_integral([[0.0]], [1.0], 0.0, 0.3)[0, 0] == pytest.approx(0.3, rel=1e-15)

    def test_scalar_antiderivative(self):
        val = cell_integral([[1.0]], [2.0], 0.0, 5.0)[0, 0]
        assert val == pytest.approx(2 * (1 - np.exp(-5.0)), rel=1e-13)

    def test_oscillator_quarter_turn(self):
        G = cell_integral([[0.0, 1.0], [-1.0, 0.0]], [0.0, 1.0], 0.0, np.pi / 2)
        np.testing.assert_allclose(G[:, 0], [-1.0, 1.0], atol=1e-14)

    def test_matches_quadrature(self):
        rng = np.random.default_rng(11)
        A = rng.standard_normal((3, 3))
        B = rng.standard_normal((3, 1))
        quad = scipy.integrate.quad_vec(lambda s: scipy.linalg.expm(-A * s) @ B[:, 0],
                                        0.4, 1.7, epsabs=1e-14, epsrel=1e-13)[0]
        np.testing.assert_allclose(cell_integral(A, B, 0.4, 1.7)[:, 0], quad, rtol=1e-10)

    @pytest.mark.parametrize("t0,t1", [(1.0, 1.0), (2.0, 1.0)])
    def test_invalid_interval(self, t0, t1):
        with pytest.raises(InvalidIntervalError):
            cell_integral([[1.0]], [1.0], t0, t1)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            cell_integral(np.eye(2), [1.0, 2.0, 3.0], 0.0, 1.0)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=12), st.integers(0, 2**31))
    def test_additivity_over_random_partition(self, widths, seed):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((2, 2))
        B = rng.standard_normal((2, 1))
        edges = np.concatenate([[0.0], np.cumsum(widths)])
        parts = sum(cell_integral(A, B, a, b) for a, b in zip(edges, edges[1:]))
        whole = cell_integral(A, B, 0.0, edges[-1])
        np.testing.assert_allclose(parts, whole, rtol=1e-10, atol=1e-10)

    def test_cell_integrals_columns(self):
        A, B = [[0.0, 1.0], [-2.0, -0.3]], [0.0, 1.0]
        G = cell_integrals(A, B, 3.0, 7)
        assert G.shape == (2, 7)
        for k in range(7):
            np.testing.assert_allclose(G[:, k], cell_integral(A, B, 3 * k / 7, 3 * (k + 1) / 7)[:, 0],
                                       rtol=1e-12, atol=1e-15)


class TestKalmanRank:
    def test_double_integrator(self):
        assert kalman_rank([[0.0, 1.0], [0.0, 0.0]], [0.0, 1.0]) == 2

    def test_parallel_columns(self):
        assert kalman_rank(np.eye(2), [1.0, 0.0]) == 1

    def test_scalar(self):
        assert kalman_rank([[1.0]], [2.0]) == 1

    def test_zero_input(self):
        assert kalman_rank(np.eye(2), [0.0, 0.0]) == 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            kalman_rank(np.eye(2), [1.0, 0.0, 0.0])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**31), st.integers(1, 4))
    def test_basis_invariance(self, seed, n):
        rng = np.random.default_rng(seed)
        A = rng.standard_normal((n, n))
        B = rng.standard_normal((n, 1))
        if rng.random() < 0.5:
            # make it uncontrollable on purpose: block structure with a dead mode
            A[-1, :-1] = 0.0
            B[-1] = 0.0
        Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        S = Q @ np.diag(rng.uniform(0.5, 2.0, n))
        Si = np.linalg.inv(S)
        assert kalman_rank(A, B) == kalman_rank(S @ A @ Si, S @ B)


def test_as_matrix_promotes_vectors():
    assert as_matrix([1.0, 2.0]).shape == (2, 1)
    assert as_matrix(3.0).shape == (1, 1)
    with pytest.raises(DimensionError):
        as_matrix(np.ones((2, 2, 2)))
