"""Single runs and Monte Carlo ensembles of the force tracker."""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import inputestim, simkit, umvfilter
from .matkernel import pinv


@dataclass(frozen=True)
class FilterInit:
    """How the filter starts.

    ``x0_hat=None`` takes the least-squares state of the first measurement.
    The initial covariance is `P0` when given, else ``p0_scale * I``.
    """

    x0_hat: Optional[np.ndarray] = None
    p0_scale: float = 1e-10
    P0: Optional[np.ndarray] = None

    def covariance(self, n):
        if self.P0 is not None:
            return np.asarray(self.P0, dtype=float)
        return self.p0_scale * np.eye(n)

    def estimate(self, dm, y0):
        if self.x0_hat is None:
            return umvfilter.initial_estimate(dm, y0)
        return np.asarray(self.x0_hat, dtype=float)


@dataclass(frozen=True)
class RunResult:
    """One simulated run with its estimates.

    ``x_hat`` and ``P`` have one entry per step; the force series are one
    shorter because the estimate for step k needs measurement k+1.
    """

    trajectory: simkit.Trajectory
    x_hat: np.ndarray
    P: np.ndarray
    f_hat: np.ndarray
    f_err: np.ndarray
    mse_theory: np.ndarray
    mse_bound: np.ndarray
    L: np.ndarray
    M: np.ndarray


@dataclass(frozen=True)
class MonteCarloReport:
    """Ensemble statistics; force series are indexed by k = 0 .. steps-2.

    Attributes
    ----------
    v_numerical : ndarray, shape (steps-1, m)
        Per-component mean squared force error across runs.
    mse_matrix : ndarray, shape (steps-1, m, m)
        Full empirical second moment of the force error.
    mse_theory : ndarray, shape (steps-1, m, m)
        Theoretical mean squared error of the force estimate.
    bias_f, bias_x : ndarray
        Ensemble-mean force error and state error ``x - x_hat``.
    P : ndarray, shape (steps, n, n)
        Filter covariance (shared by all runs).
    """

    n_runs: int
    dt: float
    v_numerical: np.ndarray
    mse_matrix: np.ndarray
    mse_theory: np.ndarray
    bias_f: np.ndarray
    bias_x: np.ndarray
    P: np.ndarray
    steady_start: int = 50

    @property
    def k(self):
        return np.arange(len(self.v_numerical))

    @property
    def t(self):
        return self.k * self.dt

    @property
    def mse_theory_diag(self):
        return np.diagonal(self.mse_theory, axis1=1, axis2=2)

    @property
    def ratio(self):
        return self.v_numerical / self.mse_theory_diag

    @property
    def grand_average_ratio(self):
        return float(np.mean(self.ratio[self.steady_start:]))


def time_average_bias(f_err):
    """Average of the force error over time (per component)."""
    f_err = np.asarray(f_err, dtype=float)
    if f_err.size == 0:
        raise ValueError("time average of an empty series")
    return f_err.mean(axis=0)


def run_single(dm, sig, x0, init, steps, seed, run=0):
    """Simulate, filter and estimate the force for one run, step by step."""
    if steps < 2:
        raise ValueError("need at least 2 steps to estimate a force")
    traj = simkit.simulate(dm, sig, x0, steps, seed, run)
    fs = umvfilter.init(init.estimate(dm, traj.y[0]), init.covariance(dm.n))
    states = [fs]
    f_hat, mse, bound, Ls, Ms = [], [], [], [], []
    for k in range(1, steps):
        nxt, g = umvfilter.update(fs, traj.y[k], dm)
        est = inputestim.estimate(nxt, fs, g, dm)
        f_hat.append(est.f_hat)
        mse.append(est.mse_theory)
        bound.append(inputestim.force_mse_lower_bound(g, dm))
        Ls.append(g.L)
        Ms.append(g.M)
        states.append(nxt)
        fs = nxt
    f_hat = np.array(f_hat)
    return RunResult(
        trajectory=traj,
        x_hat=np.array([s.x_hat for s in states]),
        P=np.array([s.P for s in states]),
        f_hat=f_hat,
        f_err=f_hat - traj.f_true[:-1],
        mse_theory=np.array(mse),
        mse_bound=np.array(bound),
        L=np.array(Ls),
        M=np.array(Ms),
    )


def _run_chunk(dm, sig, x0, init, steps, seed, gains, runs):
    X, Y, F = simkit.simulate_batch(dm, sig, x0, steps, seed, runs)
    x0_hat = np.array([init.estimate(dm, y[0]) for y in Y])
    Xh = umvfilter.filter_batch(dm, gains, x0_hat, Y)
    Bp = pinv(dm.B)
    f_hat = (Xh[:, 1:] - Xh[:, :-1] @ dm.A.T) @ Bp.T
    return X - Xh, f_hat - F[:, :-1]


def monte_carlo(dm, sig, x0, init, steps, n_runs, base_seed, *, workers=1,
                chunk_size=50, steady_start=50, identical_seeds=False):
    """Ensemble of `n_runs` independent runs (run i uses sub-streams of run index i).

    Runs are processed in fixed chunks of `chunk_size`; `workers` only
    changes how many chunks execute at once, so the report does not depend
    on it. With `identical_seeds` every run reuses run index 0, which
    collapses the ensemble onto a single realisation (debugging aid).
    """
    if n_runs < 2:
        raise ValueError("Monte Carlo needs at least 2 runs")
    if steps < 2:
        raise ValueError("need at least 2 steps to estimate a force")
    P, gains = umvfilter.gain_schedule(dm, init.covariance(dm.n), steps)
    mse_theory = np.array([
        inputestim.force_mse_theoretical(g, umvfilter.FilterState(np.zeros(dm.n), P[k], k), dm)
        for k, g in enumerate(gains)
    ])

    indices = [0] * n_runs if identical_seeds else list(range(n_runs))
    chunks = [indices[i:i + chunk_size] for i in range(0, n_runs, chunk_size)]

    def work(runs):
        return _run_chunk(dm, sig, x0, init, steps, base_seed, gains, runs)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]

    x_err = np.concatenate([p[0] for p in parts])
    f_err = np.concatenate([p[1] for p in parts])
    return MonteCarloReport(
        n_runs=n_runs,
        dt=dm.dt,
        v_numerical=np.mean(f_err**2, axis=0),
        mse_matrix=np.einsum("rki,rkj->kij", f_err, f_err) / n_runs,
        mse_theory=mse_theory,
        bias_f=f_err.mean(axis=0),
        bias_x=x_err.mean(axis=0),
        P=P,
        steady_start=steady_start,
    )
