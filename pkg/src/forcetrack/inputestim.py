"""Unknown-input estimates and their theoretical mean squared error."""
from dataclasses import dataclass

import numpy as np

from .errors import SequencingError
from .matkernel import pinv, symmetrize


@dataclass(frozen=True)
class ForceEstimate:
    """Estimate of the input applied between steps k and k+1."""

    f_hat: np.ndarray
    k: int
    mse_theory: np.ndarray


def estimate_force(x_next, x_curr, dm):
    """``pinv(B) @ (x[k+1|k+1] - A x[k|k])`` for consecutive filter states."""
    if x_next.k != x_curr.k + 1:
        raise SequencingError(
            f"force estimate needs consecutive states, got k={x_curr.k} and k={x_next.k}")
    return pinv(dm.B) @ (x_next.x_hat - dm.A @ x_curr.x_hat)


def estimate_force_from_innovation(g, x_curr, y_next, dm):
    """Same estimate written as ``M (y[k+1] - H A x[k|k])``."""
    y_next = np.ravel(np.asarray(y_next, dtype=float))
    return g.M @ (y_next - dm.H @ dm.A @ x_curr.x_hat)


def force_mse_lower_bound(g, dm):
    """Noise-only part of the input MSE: ``M H Q H^T M^T + M R M^T``."""
    M, H = g.M, dm.H
    return symmetrize(M @ H @ dm.Q @ H.T @ M.T + M @ dm.R @ M.T)


def force_mse_theoretical(g, x_curr, dm):
    """Mean squared error of the input estimate at step k.

    ``M H A P[k|k] A^T H^T M^T + M H Q H^T M^T + M R M^T`` where `g` holds
    the gains of the step k -> k+1 and `x_curr` the state at k. The input
    itself cancels because ``M H B = I``.
    """
    M, HA = g.M, dm.H @ dm.A
    return symmetrize(M @ HA @ x_curr.P @ HA.T @ M.T) + force_mse_lower_bound(g, dm)


def estimate(x_next, x_curr, g, dm):
    return ForceEstimate(
        f_hat=estimate_force(x_next, x_curr, dm),
        k=x_curr.k,
        mse_theory=force_mse_theoretical(g, x_curr, dm),
    )
