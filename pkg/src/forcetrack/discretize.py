"""Zero-order-hold discretization.

With the input held constant over each sample of length ``dt``:

    A = exp(A0 dt)
    B = int_0^dt exp(A0 s) ds B0
    Q = int_0^dt exp(A0 s) Q0 exp(A0^T s) ds
    H = H0,  R = R0 / dt

The integrals are evaluated with Van Loan's block-exponential method.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InfeasibleError
from .matkernel import as_matrix, column_rank, mat_exp, symmetrize
from .model import ContinuousModel, check


@dataclass(frozen=True)
class DiscreteModel:
    """``x[k+1] = A x[k] + B f[k] + w[k]``, ``y[k] = H x[k] + v[k]``."""

    A: np.ndarray
    B: np.ndarray
    H: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    dt: float

    def __post_init__(self):
        for name in ("A", "B", "H", "Q", "R"):
            object.__setattr__(self, name, as_matrix(getattr(self, name), name))
        n, m, p = self.A.shape[0], self.B.shape[1], self.H.shape[0]
        for name, shape in {"A": (n, n), "B": (n, m), "H": (p, n),
                            "Q": (n, n), "R": (p, p)}.items():
            if getattr(self, name).shape != shape:
                raise DimensionError(
                    f"{name} has shape {getattr(self, name).shape}, expected {shape}")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.H.shape[0]

    @property
    def HB(self):
        return self.H @ self.B


def van_loan_blocks(A0, B0, Q0, dt):
    """Return ``(A, B, Q)`` for a zero-order-hold sample of length `dt`.

    ``B`` is the top-right block of ``exp([[A0, B0], [0, 0]] dt)``. ``Q`` comes
    from ``F = exp([[-A0, Q0], [0, A0^T]] dt)`` as ``F22^T F12``. `Q0` is
    normalised to unit norm before exponentiation and rescaled afterwards
    (the integral is linear in `Q0`), which keeps tiny intensities from being
    swamped by the drift block.
    """
    A0 = as_matrix(A0, "A0")
    B0 = as_matrix(B0, "B0")
    Q0 = as_matrix(Q0, "Q0")
    n, m = B0.shape

    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = A0
    aug[:n, n:] = B0
    E = mat_exp(aug * dt)
    A = E[:n, :n]
    B = E[:n, n:]

    qscale = np.max(np.abs(Q0))
    if qscale == 0.0:
        return A, B, np.zeros((n, n))
    aug = np.zeros((2 * n, 2 * n))
    aug[:n, :n] = -A0
    aug[:n, n:] = Q0 / qscale
    aug[n:, n:] = A0.T
    F = mat_exp(aug * dt)
    Q = qscale * (F[n:, n:].T @ F[:n, n:])
    return A, B, symmetrize(Q)


def discretize(cm: ContinuousModel, dt: float) -> DiscreteModel:
    """Sample `cm` with period `dt` under a zero-order hold.

    Raises
    ------
    ModelError
        If `cm` violates its invariants.
    InfeasibleError
        If ``H @ B`` is not of full column rank, in which case the unbiased
        filter gain does not exist.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt}")
    check(cm)
    A, B, Q = van_loan_blocks(cm.A0, cm.B0, cm.Q0, dt)
    dm = DiscreteModel(A=A, B=B, H=cm.H0, Q=Q, R=cm.R0 / dt, dt=float(dt))
    if column_rank(dm.HB) < dm.m:
        raise InfeasibleError(
            "unbiased input estimation infeasible (rank HB deficient): "
            f"H @ B = {dm.HB.tolist()} must have full column rank {dm.m}")
    return dm
