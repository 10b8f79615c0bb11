import mpmath
import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from forcetrack.errors import DefinitenessError, DimensionError, RankError
from forcetrack.matkernel import as_matrix, mat_exp, pinv, psd_check, spd_inverse

from conftest import DT, MASS, OMEGA, oscillator_closed_form

small_floats = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def square(n):
    return arrays(float, (n, n), elements=small_floats)


def mp_expm(M, terms=300, dps=60):
    """Truncated power series in extended precision."""
    with mpmath.workdps(dps):
        A = mpmath.matrix(M.tolist())
        term = mpmath.eye(A.rows)
        acc = mpmath.eye(A.rows)
        for k in range(1, terms):
            term = term * A / k
            acc += term
        return np.array(acc.tolist(), dtype=float)


class TestMatExp:
    def test_zero_is_exact_identity(self):
        np.testing.assert_array_equal(mat_exp(np.zeros((2, 2))), np.eye(2))

    def test_diagonal(self):
        E = mat_exp(np.diag([np.log(2), np.log(3)]))
        np.testing.assert_allclose(E, np.diag([2.0, 3.0]), rtol=1e-14, atol=1e-15)

    def test_oscillator_closed_form(self):
        A0 = np.array([[0, 1 / MASS], [-MASS * OMEGA**2, 0]])
        A_ref, _ = oscillator_closed_form(MASS, OMEGA, DT)
        np.testing.assert_allclose(mat_exp(A0 * DT), A_ref, rtol=1e-11)

    def test_oscillator_against_extended_precision_series(self):
        A0 = np.array([[0, 1 / MASS], [-MASS * OMEGA**2, 0]])
        ref = mp_expm(A0 * DT)
        A_ref, _ = oscillator_closed_form(MASS, OMEGA, DT)
        np.testing.assert_allclose(ref, A_ref, rtol=1e-13)
        np.testing.assert_allclose(mat_exp(A0 * DT), ref, rtol=1e-11)

    def test_non_square(self):
        with pytest.raises(DimensionError):
            mat_exp(np.zeros((2, 3)))

    @pytest.mark.parametrize("scale", [1e-3, 0.1, 0.5, 2.0, 5.0, 40.0])
    def test_each_pade_branch_matches_scipy(self, scale):
        rng = np.random.default_rng(7)
        M = rng.standard_normal((4, 4))
        M *= scale / np.linalg.norm(M, 1)
        np.testing.assert_allclose(mat_exp(M), sla.expm(M), rtol=1e-12, atol=1e-14)

    @settings(max_examples=60, deadline=None)
    @given(square(3))
    def test_matches_scipy(self, M):
        ref = sla.expm(M)
        np.testing.assert_allclose(mat_exp(M), ref, rtol=1e-10,
                                   atol=1e-12 * np.abs(ref).max())

    @settings(max_examples=60, deadline=None)
    @given(square(3))
    def test_inverse_and_jacobi(self, M):
        E = mat_exp(M)
        np.testing.assert_allclose(E @ mat_exp(-M), np.eye(3), atol=1e-10 * np.linalg.cond(E))
        assert np.isclose(np.linalg.det(E), np.exp(np.trace(M)), rtol=1e-10)

    def test_oscillator_is_unimodular(self):
        A0 = np.array([[0, 1 / MASS], [-MASS * OMEGA**2, 0]])
        E = mat_exp(A0 * DT)
        np.testing.assert_allclose(E @ mat_exp(-A0 * DT), np.eye(2), atol=1e-10)
        assert abs(np.linalg.det(E) - 1) < 1e-12


class TestPinv:
    def test_scalar(self):
        np.testing.assert_allclose(pinv([[2.0]]), [[0.5]])

    def test_unit_column(self):
        np.testing.assert_array_equal(pinv([[0.0], [1.0]]), [[0.0, 1.0]])

    def test_oscillator_input_matrix(self):
        _, B = oscillator_closed_form(MASS, OMEGA, DT)
        b1, b2 = B[:, 0]
        np.testing.assert_allclose(pinv(B), [[b1, b2]] / (b1**2 + b2**2), rtol=1e-14)
        np.testing.assert_allclose(pinv(B) @ B, [[1.0]], atol=1e-12)

    def test_rank_deficient(self):
        with pytest.raises(RankError):
            pinv([[0.0], [0.0]])
        with pytest.raises(RankError):
            pinv([[1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])

    @settings(max_examples=60, deadline=None)
    @given(arrays(float, (4, 2), elements=small_floats))
    def test_left_inverse(self, B):
        if np.linalg.svd(B, compute_uv=False)[-1] < 1e-3:
            return
        np.testing.assert_allclose(pinv(B) @ B, np.eye(2), atol=1e-12 * np.linalg.cond(B) ** 2)
        np.testing.assert_allclose(pinv(B), np.linalg.pinv(B), rtol=1e-8, atol=1e-10)


class TestSpdInverse:
    def test_examples(self):
        np.testing.assert_allclose(spd_inverse([[4.0]]), [[0.25]])
        np.testing.assert_allclose(spd_inverse(np.eye(3)), np.eye(3))
        np.testing.assert_allclose(spd_inverse(np.diag([2.0, 8.0])), np.diag([0.5, 0.125]))

    def test_rejects_non_symmetric(self):
        with pytest.raises(DefinitenessError):
            spd_inverse([[1.0, 0.5], [0.0, 1.0]])

    def test_rejects_indefinite(self):
        with pytest.raises(DefinitenessError):
            spd_inverse(np.diag([1.0, -1.0]))

    @settings(max_examples=60, deadline=None)
    @given(arrays(float, (3, 3), elements=small_floats))
    def test_inverse_and_involution(self, X):
        S = X @ X.T + 0.5 * np.eye(3)
        Si = spd_inverse(S)
        np.testing.assert_allclose(S @ Si, np.eye(3), atol=1e-10 * np.linalg.cond(S))
        np.testing.assert_allclose(spd_inverse(Si), S, rtol=1e-9, atol=1e-9)


class TestPsdCheck:
    def test_examples(self):
        assert psd_check(np.eye(2), 1e-12).is_psd
        rep = psd_check(np.diag([1.0, -1.0]), 1e-12)
        assert not rep.is_psd
        assert rep.min_eigenvalue == pytest.approx(-1.0)

    def test_zero_matrix(self):
        assert psd_check(np.zeros((2, 2)))


def test_as_matrix_rejects_nan():
    with pytest.raises(DimensionError):
        as_matrix([[np.nan]])


def test_as_matrix_is_read_only():
    a = as_matrix([[1.0, 2.0]])
    with pytest.raises(ValueError):
        a[0, 0] = 3.0
