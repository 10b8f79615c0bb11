import numpy as np
import pytest

from forcetrack.discretize import DiscreteModel, discretize
from forcetrack.model import OptoParams, build_optomechanical

MASS = 5.88e-4
OMEGA = 1.76e5
D = 1e-14
DT = 1e-4


def oscillator_closed_form(m, w, dt):
    """Closed-form ZOH matrices of the lossless oscillator (derived by hand)."""
    th = w * dt
    c, s = np.cos(th), np.sin(th)
    A = np.array([[c, s / (m * w)], [-m * w * s, c]])
    B = np.array([[(1 - c) / (m * w**2)], [s / w]])
    return A, B


def oscillator_q_closed_form(m, w, D, dt):
    th = w * dt
    q11 = D / (m * w) ** 2 * (dt / 2 - np.sin(2 * th) / (4 * w))
    q12 = D / (m * w) * np.sin(th) ** 2 / (2 * w)
    q22 = D * (dt / 2 + np.sin(2 * th) / (4 * w))
    return np.array([[q11, q12], [q12, q22]])


@pytest.fixture(scope="session")
def opto_params():
    return OptoParams(mass=MASS, omega_m=OMEGA, noise_intensity=D,
                      measurement_intensity=D * DT)


@pytest.fixture(scope="session")
def opto_cm(opto_params):
    return build_optomechanical(opto_params)


@pytest.fixture(scope="session")
def opto_dm(opto_cm):
    return discretize(opto_cm, DT)


@pytest.fixture
def scalar_dm():
    return DiscreteModel(A=[[1.0]], B=[[1.0]], H=[[1.0]], Q=[[0.3]], R=[[0.2]], dt=1.0)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
