"""
=====================================
Sampling the mechanical oscillator
=====================================

The mirror is a lossless oscillator. Sampled every 0.1 ms, its phase
advances by 17.6 rad per sample, so nothing about the sampled model is
"slow". This script discretizes the bundled model and compares the result
with the closed-form oscillator solution.
"""
import numpy as np

from forcetrack import Scenario

sc = Scenario.bundled()
cm = sc.continuous_model()
dm = sc.discrete_model()

###############################################################################
# The continuous drift matrix has zero trace, so the sampled transition
# matrix has unit determinant for every sampling period.
print("A0 =\n", cm.A0)
print("det(A) - 1 =", np.linalg.det(dm.A) - 1)

###############################################################################
# Closed form: with theta = w dt,
# A = [[cos, sin/(m w)], [-m w sin, cos]] and
# B = [(1 - cos)/(m w^2), sin/w].
m, w = sc.raw["model"]["mass"], sc.raw["model"]["omega_m"]
th = w * sc.dt
A_ref = np.array([[np.cos(th), np.sin(th) / (m * w)], [-m * w * np.sin(th), np.cos(th)]])
B_ref = np.array([[(1 - np.cos(th)) / (m * w**2)], [np.sin(th) / w]])
print("max rel. error in A:", np.max(np.abs(dm.A - A_ref) / np.abs(A_ref)))
print("max rel. error in B:", np.max(np.abs(dm.B - B_ref) / np.abs(B_ref)))

###############################################################################
# Process noise only enters the momentum, but integrating over one sample
# spreads it into the position as well: Q is full rank.
print("Q =\n", dm.Q)
print("eigenvalues of Q:", np.linalg.eigvalsh(dm.Q))
