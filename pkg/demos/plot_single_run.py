"""
=====================================
Tracking a random force in one run
=====================================

Simulate the bundled scenario once, run the unbiased filter, and
reconstruct the force from consecutive state estimates. Figures are written
next to this script.
"""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from forcetrack import Scenario, run_single, time_average_bias

sc = Scenario.bundled()
dm = sc.discrete_model()
res = run_single(dm, sc.force_signal(), sc.x0, sc.filter_init(), sc.steps, sc.seed)
t = res.trajectory.t

###############################################################################
# With a single position readout the gain is fixed by the unbiasedness
# constraint alone, and its position entry is exactly one: the position
# estimate simply follows the measurement.
print("L =", res.L[-1].ravel())
print("position estimate == measurement:",
      np.allclose(res.x_hat[1:, 0], res.trajectory.y[1:, 0]))

fig, ax = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
for i, name in enumerate(("position", "momentum")):
    ax[i].plot(t, res.trajectory.x_true[:, i], label="true")
    ax[i].plot(t, res.x_hat[:, i], "--", label="estimate")
    ax[i].set_ylabel(name)
ax[0].legend()
ax[1].set_xlabel("t [s]")
fig.savefig(Path(__file__).with_name("single_run_state.png"), dpi=120)

###############################################################################
# The force estimate is unbiased but noisy. Its error variance grows along
# the run; see ``plot_error_dynamics.py`` for why.
f_err = res.f_err[:, 0]
print("time-average force error:", time_average_bias(f_err))
print("RMS force error:", np.sqrt(np.mean(f_err**2)))

fig, ax = plt.subplots(2, 1, sharex=True, figsize=(7, 5))
ax[0].plot(t[:-1], res.trajectory.f_true[:-1, 0], label="true")
ax[0].plot(t[:-1], res.f_hat[:, 0], "--", label="estimate")
ax[0].legend()
ax[1].plot(t[:-1], f_err, color="tab:orange")
ax[1].plot(t[:-1], 2 * np.sqrt(res.mse_theory[:, 0, 0]), "k:", label="2 sigma (theory)")
ax[1].plot(t[:-1], -2 * np.sqrt(res.mse_theory[:, 0, 0]), "k:")
ax[1].set_xlabel("t [s]")
ax[1].legend()
fig.savefig(Path(__file__).with_name("single_run_force.png"), dpi=120)
