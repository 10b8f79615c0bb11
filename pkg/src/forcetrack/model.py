"""Continuous-time linear Gaussian models.

The system is

    dx/dt = A0 x + B0 f + xi,    y = H0 x + eta,

with white noises of intensity ``Q0`` (process) and ``R0`` (measurement).
The optomechanical force sensor is the special case of a lossless
mechanical oscillator whose position is read out and whose momentum
receives both the force and the backaction kicks.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionError, ModelError
from .matkernel import as_matrix, column_rank, is_positive_definite, psd_check


@dataclass(frozen=True)
class OptoParams:
    """Physical parameters of the oscillator.

    Attributes
    ----------
    mass : float
        Mirror mass in kg.
    omega_m : float
        Mechanical resonance in rad/s.
    noise_intensity : float
        Backaction intensity ``D`` feeding the momentum channel.
    measurement_intensity : float, optional
        Measurement-noise intensity ``R0``. Defaults to ``noise_intensity``.
    """

    mass: float
    omega_m: float
    noise_intensity: float
    measurement_intensity: Optional[float] = None

    def __post_init__(self):
        if not self.mass > 0:
            raise ModelError(f"mass must be positive, got {self.mass}")
        if not self.omega_m > 0:
            raise ModelError(f"omega_m must be positive, got {self.omega_m}")
        if not self.noise_intensity > 0:
            raise ModelError(
                "R0 not positive definite: noise intensity D must be "
                f"positive, got {self.noise_intensity}")
        if self.measurement_intensity is not None and not self.measurement_intensity > 0:
            raise ModelError(
                "R0 not positive definite: measurement intensity must be "
                f"positive, got {self.measurement_intensity}")


@dataclass(frozen=True)
class ContinuousModel:
    """``(A0, B0, H0, Q0, R0)`` with consistent shapes.

    Shapes are checked on construction; the statistical invariants (PSD/PD
    noise, full-rank input matrix) are reported by :func:`validate` instead
    so that broken models can still be built and inspected.
    """

    A0: np.ndarray
    B0: np.ndarray
    H0: np.ndarray
    Q0: np.ndarray
    R0: np.ndarray

    def __post_init__(self):
        for name in ("A0", "B0", "H0", "Q0", "R0"):
            object.__setattr__(self, name, as_matrix(getattr(self, name), name))
        n = self.A0.shape[0]
        p = self.H0.shape[0]
        expected = {
            "A0": (n, n),
            "B0": (n, self.B0.shape[1]),
            "H0": (p, n),
            "Q0": (n, n),
            "R0": (p, p),
        }
        for name, shape in expected.items():
            if getattr(self, name).shape != shape:
                raise DimensionError(
                    f"{name} has shape {getattr(self, name).shape}, expected {shape}")

    @property
    def n(self):
        return self.A0.shape[0]

    @property
    def m(self):
        return self.B0.shape[1]

    @property
    def p(self):
        return self.H0.shape[0]


def build_optomechanical(params: OptoParams) -> ContinuousModel:
    m, w, D = params.mass, params.omega_m, params.noise_intensity
    R0 = D if params.measurement_intensity is None else params.measurement_intensity
    return ContinuousModel(
        A0=[[0.0, 1.0 / m], [-m * w**2, 0.0]],
        B0=[[0.0], [1.0]],
        H0=[[1.0, 0.0]],
        Q0=np.diag([0.0, D]),
        R0=[[R0]],
    )


def validate(model: ContinuousModel):
    """Return the list of violated model invariants (empty when valid)."""
    problems = []
    if not np.allclose(model.Q0, model.Q0.T, rtol=1e-10, atol=0):
        problems.append("Q0 not symmetric")
    elif not psd_check(model.Q0):
        problems.append("Q0 not positive semi-definite")
    if not is_positive_definite(model.R0):
        problems.append("R0 not positive definite")
    if column_rank(model.B0) < model.m:
        problems.append("B0 rank-deficient")
    return problems


def check(model: ContinuousModel) -> ContinuousModel:
    """Raise :class:`ModelError` listing every violation, else return `model`."""
    problems = validate(model)
    if problems:
        raise ModelError(problems)
    return model
