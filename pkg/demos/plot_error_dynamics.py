"""
=====================================
Why the force error keeps growing
=====================================

With one measurement and one unknown input, the unbiasedness constraint
``L H B = B`` determines the gain completely: ``L = B / (H B)``. The
covariance then has no say in the gain, and the estimation error evolves as

    e[k+1] = (I - L H) (A e[k] + w[k]) - L v[k+1].

For a zero-order-hold oscillator the matrix ``(I - L H) A`` has eigenvalues
0 and -1, whatever the mass, frequency or sampling period. The -1 mode is
never damped, so noise accumulates in it like a random walk.
"""
import numpy as np

from forcetrack import OptoParams, build_optomechanical, discretize
from forcetrack.umvfilter import gain_schedule

for m, w, dt in [(5.88e-4, 1.76e5, 1e-4), (1.0, 1.0, 0.1), (2.0, 30.0, 0.7)]:
    dm = discretize(build_optomechanical(OptoParams(m, w, 1.0)), dt)
    L = dm.B / dm.HB[0, 0]
    T = (np.eye(2) - L @ dm.H) @ dm.A
    print(f"m={m:g} w={w:g} dt={dt:g}: eigenvalues {np.sort(np.linalg.eigvals(T).real)}")

###############################################################################
# The position error variance sits exactly at the measurement variance,
# while the momentum error variance grows by a fixed amount every step.
sc_dm = discretize(build_optomechanical(
    OptoParams(5.88e-4, 1.76e5, 1e-14, measurement_intensity=1e-18)), 1e-4)
P, _ = gain_schedule(sc_dm, 1e-14 * np.eye(2), 1000)
print("P[k][0,0] / R:", P[[1, 10, 999], 0, 0] / sc_dm.R[0, 0])
print("P[k][1,1]:", P[[10, 100, 999], 1, 1])
print("per-step growth of P[1,1]:", np.diff(P[-3:, 1, 1]))
