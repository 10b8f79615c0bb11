"""Seeded ground-truth simulation of the sampled system.

Every run draws from three independent Philox streams (process noise,
measurement noise, force) derived from ``SeedSequence(seed,
spawn_key=(run, channel))``. Runs are therefore reproducible bit for bit
and can be generated in any order or in parallel.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Tuple

import numpy as np

from .errors import DefinitenessError, ExhaustedError

PROCESS, MEASUREMENT, FORCE = 0, 1, 2


def stream(seed, run=0, channel=PROCESS):
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(run), int(channel)))
    return np.random.Generator(np.random.Philox(ss))


# -- force signals -----------------------------------------------------------

@dataclass(frozen=True)
class Constant:
    value: float


@dataclass(frozen=True)
class Sinusoid:
    """``amplitude * sin(frequency * t + phase)`` with `frequency` in rad/s."""

    amplitude: float
    frequency: float
    phase: float = 0.0


@dataclass(frozen=True)
class GaussianIID:
    mean: float
    variance: float

    def __post_init__(self):
        if not self.variance >= 0:
            raise ValueError(f"variance must be non-negative, got {self.variance}")


@dataclass(frozen=True)
class Piecewise:
    """Steps ``(start_step, value)``; the force is zero before the first start."""

    breakpoints: Tuple[Tuple[int, float], ...]

    def __post_init__(self):
        bps = tuple((int(s), v) for s, v in self.breakpoints)
        starts = [s for s, _ in bps]
        if not bps or any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("piecewise start steps must be strictly increasing")
        object.__setattr__(self, "breakpoints", bps)


@dataclass(frozen=True)
class FromFile:
    """Force read from a text file, one step per line.

    Lines hold one value, or whitespace-separated components when the input
    is vector valued. Blank lines and ``#`` comments are skipped.
    """

    path: str
    values: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.values is None:
            rows = []
            for line in Path(self.path).read_text().splitlines():
                line = line.split("#", 1)[0].strip()
                if line:
                    rows.append([float(tok) for tok in line.split()])
            values = np.array(rows, dtype=float).reshape(len(rows), -1)
            object.__setattr__(self, "values", values)


ForceSignal = (Constant, Sinusoid, GaussianIID, Piecewise, FromFile)


def _vec(value, m):
    return np.broadcast_to(np.asarray(value, dtype=float), (m,)).copy()


def sample_force(sig, k, rng=None, m=1, dt=1.0):
    """Force applied at step `k` as an m-vector.

    Only :class:`GaussianIID` consumes `rng`; the other variants are
    deterministic functions of `k`.
    """
    if isinstance(sig, Constant):
        return _vec(sig.value, m)
    if isinstance(sig, Sinusoid):
        return _vec(sig.amplitude * np.sin(sig.frequency * k * dt + sig.phase), m)
    if isinstance(sig, GaussianIID):
        return rng.normal(sig.mean, np.sqrt(sig.variance), size=m)
    if isinstance(sig, Piecewise):
        value = 0.0
        for start, v in sig.breakpoints:
            if start > k:
                break
            value = v
        return _vec(value, m)
    if isinstance(sig, FromFile):
        if k >= len(sig.values):
            raise ExhaustedError(
                f"force file {sig.path} has {len(sig.values)} samples, step {k} requested")
        return _vec(sig.values[k], m)
    raise TypeError(f"unknown force signal {sig!r}")


def force_sequence(sig, steps, rng=None, m=1, dt=1.0):
    """Forces for steps ``0 .. steps-1`` as an array of shape (steps, m).

    Equivalent to calling :func:`sample_force` for each step in turn.
    """
    if isinstance(sig, GaussianIID):
        return rng.normal(sig.mean, np.sqrt(sig.variance), size=(steps, m))
    return np.array([sample_force(sig, k, rng, m, dt) for k in range(steps)])


# -- noise ---------------------------------------------------------------------

def noise_factor(S, tol=1e-12):
    """Factor ``F`` with ``F @ F.T == S`` for a symmetric PSD `S`.

    Eigenvalues down to ``-tol * ||S||`` are treated as rounding and zeroed,
    so null directions of a singular covariance get exactly zero noise.
    """
    S = np.asarray(S, dtype=float)
    lam, V = np.linalg.eigh(0.5 * (S + S.T))
    scale = np.max(np.abs(lam)) if lam.size else 0.0
    if lam.size and lam[0] < -tol * scale:
        raise DefinitenessError(
            f"covariance is not positive semi-definite (min eigenvalue {lam[0]:.3e})")
    lam = np.where(lam > tol * scale, lam, 0.0)
    return V * np.sqrt(lam)


# -- trajectories ---------------------------------------------------------------

@dataclass(frozen=True)
class Trajectory:
    """Sample path of the sampled system.

    Arrays are indexed by step ``k = 0 .. steps-1``: ``x_true[k]``, ``y[k]``
    and ``f_true[k]``, the force acting between k and k+1.
    """

    k: np.ndarray
    t: np.ndarray
    x_true: np.ndarray
    y: np.ndarray
    f_true: np.ndarray
    seed: int
    run: int
    dm: object = field(repr=False)

    def __len__(self):
        return len(self.k)


def simulate_batch(dm, sig, x0, steps, seed, runs):
    """Simulate several runs; returns ``(x, y, f)`` with a leading run axis."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    Fw = noise_factor(dm.Q)
    Fv = noise_factor(dm.R)
    if np.linalg.matrix_rank(Fv) < dm.p:
        raise DefinitenessError("measurement covariance R must be positive definite")
    runs = list(runs)
    nr = len(runs)
    W = np.empty((nr, steps, dm.n))
    V = np.empty((nr, steps, dm.p))
    F = np.empty((nr, steps, dm.m))
    for i, r in enumerate(runs):
        W[i] = stream(seed, r, PROCESS).standard_normal((steps, dm.n)) @ Fw.T
        V[i] = stream(seed, r, MEASUREMENT).standard_normal((steps, dm.p)) @ Fv.T
        F[i] = force_sequence(sig, steps, stream(seed, r, FORCE), dm.m, dm.dt)
    X = np.empty((nr, steps, dm.n))
    x = np.broadcast_to(np.asarray(x0, dtype=float), (nr, dm.n)).copy()
    for k in range(steps):
        X[:, k] = x
        x = x @ dm.A.T + F[:, k] @ dm.B.T + W[:, k]
    Y = X @ dm.H.T + V
    return X, Y, F


def simulate(dm, sig, x0, steps, seed, run=0):
    """One sample path of ``x[k+1] = A x[k] + B f[k] + w[k]``, ``y[k] = H x[k] + v[k]``."""
    X, Y, F = simulate_batch(dm, sig, x0, steps, seed, [run])
    k = np.arange(steps)
    return Trajectory(k=k, t=k * dm.dt, x_true=X[0], y=Y[0], f_true=F[0],
                      seed=int(seed), run=int(run), dm=dm)
