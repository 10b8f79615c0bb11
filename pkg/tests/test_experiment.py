import numpy as np
import pytest

from forcetrack.discretize import DiscreteModel, discretize
from forcetrack.experiment import FilterInit, monte_carlo, run_single, time_average_bias
from forcetrack.model import OptoParams, build_optomechanical
from forcetrack.simkit import Constant, GaussianIID, Sinusoid

from conftest import DT, MASS, OMEGA

X0 = np.array([1e-6, 1e-6])


def opto(D):
    return discretize(build_optomechanical(
        OptoParams(MASS, OMEGA, D, measurement_intensity=D * DT)), DT)


def test_time_average_bias():
    assert time_average_bias([1.0, -1.0]) == 0.0
    assert time_average_bias([2.0, 2.0, 2.0]) == 2.0
    with pytest.raises(ValueError):
        time_average_bias([])


def test_scalar_run_by_hand():
    dm = DiscreteModel(A=[[1.0]], B=[[1.0]], H=[[1.0]], Q=[[0.1]], R=[[0.2]], dt=1.0)
    res = run_single(dm, Constant(0.5), [0.0], FilterInit(x0_hat=[0.0], p0_scale=0.0), 40, seed=3)
    y = res.trajectory.y[:, 0]
    np.testing.assert_allclose(res.x_hat[1:, 0], y[1:], atol=1e-14)
    np.testing.assert_allclose(res.f_hat[:, 0], y[1:] - res.x_hat[:-1, 0], atol=1e-14)
    np.testing.assert_allclose(res.f_err[:, 0], res.f_hat[:, 0] - 0.5, atol=1e-14)
    # A^2 P + Q + R with P = R after the first step
    np.testing.assert_allclose(res.mse_theory[1:, 0, 0], 0.2 + 0.1 + 0.2)


def test_series_lengths(opto_dm):
    res = run_single(opto_dm, GaussianIID(1.0, 0.5), X0, FilterInit(X0, 1e-14), 25, seed=1)
    assert res.x_hat.shape == (25, 2) and res.P.shape == (25, 2, 2)
    assert res.f_hat.shape == res.f_err.shape == (24, 1)
    assert res.mse_theory.shape == (24, 1, 1)


def test_error_shrinks_with_noise():
    rms = []
    for D in (1e-14, 1e-18):
        res = run_single(opto(D), Sinusoid(1.0, 2e3), X0, FilterInit(X0, D), 300, seed=2)
        rms.append(np.sqrt(np.mean(res.f_err**2)))
    assert rms[1] < rms[0] / 50


def test_default_initial_estimate_uses_first_measurement(opto_dm):
    res = run_single(opto_dm, Constant(1.0), X0, FilterInit(p0_scale=1e-14), 5, seed=0)
    np.testing.assert_allclose(res.x_hat[0], [res.trajectory.y[0, 0], 0.0])


def test_monte_carlo_needs_two_runs(opto_dm):
    with pytest.raises(ValueError):
        monte_carlo(opto_dm, GaussianIID(1.0, 0.5), X0, FilterInit(X0, 1e-14), 50, 1, 0)


def test_identical_seeds_collapse(opto_dm):
    init = FilterInit(X0, 1e-14)
    rep = monte_carlo(opto_dm, GaussianIID(1.0, 0.5), X0, init, 200, 2, 7, identical_seeds=True)
    single = run_single(opto_dm, GaussianIID(1.0, 0.5), X0, init, 200, seed=7, run=0)
    np.testing.assert_allclose(rep.v_numerical, single.f_err**2, rtol=1e-6)
    np.testing.assert_allclose(rep.mse_theory, single.mse_theory, rtol=1e-12)


def test_monte_carlo_matches_single_runs(opto_dm):
    init = FilterInit(X0, 1e-14)
    rep = monte_carlo(opto_dm, GaussianIID(1.0, 0.5), X0, init, 100, 3, 21, chunk_size=2)
    errs = np.array([run_single(opto_dm, GaussianIID(1.0, 0.5), X0, init, 100, 21, r).f_err
                     for r in range(3)])
    np.testing.assert_allclose(rep.v_numerical, np.mean(errs**2, axis=0), rtol=1e-6)
    np.testing.assert_allclose(rep.bias_f, errs.mean(axis=0), rtol=1e-6, atol=1e-9)


def test_deterministic_and_parallel_equivalent(opto_dm):
    args = (opto_dm, GaussianIID(1.0, 0.5), X0, FilterInit(X0, 1e-14), 120, 64, 99)
    a = monte_carlo(*args, chunk_size=10)
    b = monte_carlo(*args, chunk_size=10)
    c = monte_carlo(*args, chunk_size=10, workers=4)
    for name in ("v_numerical", "mse_matrix", "mse_theory", "bias_f", "bias_x", "P"):
        assert getattr(a, name).tobytes() == getattr(b, name).tobytes()
        assert getattr(a, name).tobytes() == getattr(c, name).tobytes()


def test_state_error_independent_of_force(opto_dm):
    """The state error does not depend on the force at all (noises held fixed)."""
    init = FilterInit(X0, 1e-14)
    a = run_single(opto_dm, Constant(0.0), X0, init, 300, seed=5)
    b = run_single(opto_dm, Sinusoid(3.0, 1e3, 0.4), X0, init, 300, seed=5)
    ea = a.trajectory.x_true - a.x_hat
    eb = b.trajectory.x_true - b.x_hat
    scale = np.sqrt(a.P.diagonal(axis1=1, axis2=2))
    assert np.all(np.abs(ea - eb) <= 1e-6 * scale + 1e-18)
    np.testing.assert_allclose(a.f_err, b.f_err, atol=1e-6 * np.sqrt(a.mse_theory.max()))


def test_report_views(opto_dm):
    rep = monte_carlo(opto_dm, GaussianIID(1.0, 0.5), X0, FilterInit(X0, 1e-14), 80, 4, 1)
    assert rep.k.tolist() == list(range(79))
    np.testing.assert_allclose(rep.t, rep.k * DT)
    assert np.all(rep.v_numerical >= 0)
    np.testing.assert_allclose(rep.ratio, rep.v_numerical / rep.mse_theory[:, :, 0])
    np.testing.assert_allclose(np.diagonal(rep.mse_matrix, axis1=1, axis2=2), rep.v_numerical)
