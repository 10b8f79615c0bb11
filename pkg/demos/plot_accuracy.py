"""
==============================================
Theoretical versus numerical force accuracy
==============================================

Average the squared force error over many independent runs and compare it,
step by step, with the theoretical mean squared error computed from the
filter covariance.
"""
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from forcetrack import Scenario, monte_carlo

sc = Scenario.bundled()
dm = sc.discrete_model()

reports = {
    n: monte_carlo(dm, sc.force_signal(), sc.x0, sc.filter_init(), sc.steps, n, sc.seed)
    for n in (100, 1000)
}

###############################################################################
# With 100 runs each point is an average of 100 squared Gaussian errors, so
# the ratio scatters like chi-square(100)/100 around one.
for n, rep in reports.items():
    r = rep.ratio[rep.steady_start:, 0]
    print(f"N={n:5d}: mean ratio {r.mean():.3f}, "
          f"5-95% range [{np.quantile(r, 0.05):.3f}, {np.quantile(r, 0.95):.3f}]")

rep = reports[100]
fig, ax = plt.subplots(figsize=(7, 4))
ax.semilogy(rep.t, rep.mse_theory_diag[:, 0], label="theoretical")
ax.semilogy(rep.t, rep.v_numerical[:, 0], ".", ms=2, label="numerical, 100 runs")
ax.set_xlabel("t [s]")
ax.set_ylabel("mean squared force error")
ax.legend()
fig.savefig(Path(__file__).with_name("accuracy.png"), dpi=120)
