"""Unbiased minimum-variance filter for systems driven by an unknown input.

The gain is constrained so that ``L H B = B``: the unknown input then drops
out of the estimation error and the state estimate stays unbiased whatever
the input sequence is (Kitanidis, Automatica 23(6), 1987). Prediction and
correction are folded into one measurement-driven step,

    x[k+1|k+1] = A x[k|k] + L[k+1] (y[k+1] - H A x[k|k]).

Note that the covariance recursion never touches the data, so the gains of
a whole run can be computed once (:func:`gain_schedule`) and shared across
a Monte Carlo ensemble (:func:`filter_batch`).
"""
import logging
from dataclasses import dataclass

import numpy as np

from .errors import DefinitenessError, DimensionError, InfeasibleError
from .matkernel import column_rank, pinv, psd_check, spd_inverse, symmetrize

logger = logging.getLogger(__name__)

#: innovation covariances worse conditioned than this trigger a warning
COND_WARN = 1e12


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class FilterState:
    """Snapshot ``(x[k|k], P[k|k], k)``; never mutated by the filter."""

    x_hat: np.ndarray
    P: np.ndarray
    k: int = 0

    def __post_init__(self):
        object.__setattr__(self, "x_hat", _frozen(np.ravel(self.x_hat)))
        object.__setattr__(self, "P", _frozen(self.P))
        if not np.all(np.isfinite(self.x_hat)):
            raise ValueError("x_hat has non-finite entries")
        n = self.x_hat.size
        if self.P.shape != (n, n):
            raise DimensionError(f"P has shape {self.P.shape}, expected {(n, n)}")


@dataclass(frozen=True)
class StepGains:
    """Quantities of the step from k to k+1.

    Attributes
    ----------
    L : ndarray, shape (n, p)
        Constrained filter gain.
    M : ndarray, shape (m, p)
        Input gain ``pinv(B) @ L``; satisfies ``M H B = I``.
    C : ndarray, shape (p, p)
        Innovation covariance.
    P_pred : ndarray, shape (n, n)
        One-step predicted error covariance.
    """

    L: np.ndarray
    M: np.ndarray
    C: np.ndarray
    P_pred: np.ndarray


def init(x0_hat, P0):
    """Initial :class:`FilterState` at k = 0.

    Raises
    ------
    DefinitenessError
        If `P0` is not symmetric positive semi-definite.
    """
    P0 = np.atleast_2d(np.asarray(P0, dtype=float))
    if P0.shape[0] != P0.shape[1]:
        raise DimensionError(f"P0 must be square, got shape {P0.shape}")
    if not np.allclose(P0, P0.T, rtol=1e-10, atol=0):
        raise DefinitenessError("P0 is not symmetric")
    if not psd_check(P0):
        raise DefinitenessError("P0 is not positive semi-definite")
    return FilterState(x_hat=x0_hat, P=symmetrize(P0), k=0)


def initial_estimate(dm, y0):
    """Least-squares state consistent with the first measurement.

    For a position readout this is ``[y0, 0, ..., 0]``.
    """
    y0 = np.ravel(np.asarray(y0, dtype=float))
    return np.linalg.lstsq(dm.H, y0, rcond=None)[0]


def predict_covariance(fs, dm):
    return symmetrize(dm.A @ fs.P @ dm.A.T + dm.Q)


def gain(P_pred, dm):
    """Constrained gain for the step whose predicted covariance is `P_pred`.

    Raises
    ------
    InfeasibleError
        If ``B^T H^T C^{-1} H B`` is singular, i.e. ``H B`` lacks full
        column rank.
    """
    H, B = dm.H, dm.B
    HB = H @ B
    if column_rank(HB) < dm.m:
        raise InfeasibleError("unbiased input estimation infeasible (rank HB deficient)")
    C = symmetrize(H @ P_pred @ H.T + dm.R)
    cond = np.linalg.cond(C)
    if cond > COND_WARN:
        logger.warning("innovation covariance is ill-conditioned (cond=%.3e)", cond)
    Ci = spd_inverse(C)
    K = P_pred @ H.T @ Ci
    try:
        Si = spd_inverse(HB.T @ Ci @ HB)
    except DefinitenessError as exc:
        raise InfeasibleError(
            "unbiased input estimation infeasible (rank HB deficient)") from exc
    L = K + (B - K @ HB) @ Si @ HB.T @ Ci
    return StepGains(L=L, M=pinv(B) @ L, C=C, P_pred=P_pred)


def _posterior_covariance(g, dm):
    H, B = dm.H, dm.B
    HB = H @ B
    Ci = spd_inverse(g.C)
    K = g.P_pred @ H.T @ Ci
    G = B - K @ HB
    Si = spd_inverse(HB.T @ Ci @ HB)
    return symmetrize(g.P_pred - K @ H @ g.P_pred + G @ Si @ G.T)


def update(fs, y, dm):
    """Process measurement ``y[k+1]``; returns ``(state at k+1, gains)``."""
    y = np.ravel(np.asarray(y, dtype=float))
    if y.size != dm.p:
        raise DimensionError(f"measurement has {y.size} entries, expected {dm.p}")
    g = gain(predict_covariance(fs, dm), dm)
    x_pred = dm.A @ fs.x_hat
    x_new = x_pred + g.L @ (y - dm.H @ x_pred)
    return FilterState(x_hat=x_new, P=_posterior_covariance(g, dm), k=fs.k + 1), g


def gain_schedule(dm, P0, steps):
    """Covariances ``P[0..steps-1]`` and the ``steps - 1`` gains linking them."""
    fs = FilterState(x_hat=np.zeros(dm.n), P=P0, k=0)
    covs = [fs.P]
    gains = []
    for _ in range(steps - 1):
        g = gain(predict_covariance(fs, dm), dm)
        fs = FilterState(x_hat=fs.x_hat, P=_posterior_covariance(g, dm), k=fs.k + 1)
        covs.append(fs.P)
        gains.append(g)
    return np.array(covs), gains


def filter_batch(dm, gains, x0_hat, ys):
    """Run the state recursion for many measurement records at once.

    Parameters
    ----------
    gains : sequence of StepGains
        As returned by :func:`gain_schedule`; ``len(gains) == steps - 1``.
    x0_hat : ndarray, shape (runs, n)
    ys : ndarray, shape (runs, steps, p)

    Returns
    -------
    ndarray, shape (runs, steps, n)
        Estimates ``x[k|k]`` for k = 0 .. steps-1.
    """
    runs, steps, _ = ys.shape
    out = np.empty((runs, steps, dm.n))
    x = np.asarray(x0_hat, dtype=float)
    out[:, 0] = x
    HA = dm.H @ dm.A
    for k, g in enumerate(gains):
        x = x @ dm.A.T + (ys[:, k + 1] - x @ HA.T) @ g.L.T
        out[:, k + 1] = x
    return out
