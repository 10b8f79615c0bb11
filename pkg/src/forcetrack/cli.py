"""Command-line front end.

    forcetrack run        --config scenario.toml [--seed N] [--out DIR]
    forcetrack montecarlo --config scenario.toml [--seed N] [--runs N] [--out DIR]
    forcetrack discretize --config scenario.toml

Without ``--config`` the bundled optomechanical scenario is used.
Exit codes: 0 success, 1 configuration error, 2 infeasible or invalid
model, 3 I/O error.
"""
import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import experiment
from .errors import ConfigError, ForceTrackError
from .scenario import Scenario

EXIT_OK, EXIT_CONFIG, EXIT_MODEL, EXIT_IO = 0, 1, 2, 3


def fmt(x):
    """Shortest text that parses back to the same float."""
    return repr(float(x))


def _names(n, m, p):
    xs = ["q", "p"] if n == 2 else [f"x{i + 1}" for i in range(n)]
    ys = ["y"] if p == 1 else [f"y{j + 1}" for j in range(p)]
    fs = [""] if m == 1 else [str(j + 1) for j in range(m)]
    return xs, ys, fs


def run_header(n, m, p):
    xs, ys, fs = _names(n, m, p)
    return (["k", "t"] + [f"{x}_true" for x in xs] + [f"{x}_est" for x in xs] + ys
            + [f"f{j}_true" for j in fs] + [f"f{j}_est" for j in fs]
            + [f"f{j}_err" for j in fs] + [f"mse_theory{j}" for j in fs])


def accuracy_header(m):
    _, _, fs = _names(0, m, 1)
    cols = ["k", "t"]
    for name in ("mse_theory", "v_numerical", "ratio", "bias_f"):
        cols += [f"{name}{j}" for j in fs]
    return cols


def write_run_csv(path, res):
    traj = res.trajectory
    dm = traj.dm
    steps = len(traj)
    mse_diag = np.diagonal(res.mse_theory, axis1=1, axis2=2)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(run_header(dm.n, dm.m, dm.p))
        for k in range(steps):
            row = [str(k), fmt(traj.t[k])]
            row += [fmt(v) for v in traj.x_true[k]]
            row += [fmt(v) for v in res.x_hat[k]]
            row += [fmt(v) for v in traj.y[k]]
            if k < steps - 1:
                row += [fmt(v) for v in traj.f_true[k]]
                row += [fmt(v) for v in res.f_hat[k]]
                row += [fmt(v) for v in res.f_err[k]]
                row += [fmt(v) for v in mse_diag[k]]
            else:
                row += [""] * (4 * dm.m)
            w.writerow(row)


def write_accuracy_csv(path, rep):
    mse = rep.mse_theory_diag
    ratio = rep.ratio
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(accuracy_header(mse.shape[1]))
        for k in range(len(mse)):
            row = [str(k), fmt(k * rep.dt)]
            for series in (mse, rep.v_numerical, ratio, rep.bias_f):
                row += [fmt(v) for v in series[k]]
            w.writerow(row)


def _write_json(path, obj):
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _floats(a):
    return [float(v) for v in np.ravel(a)]


def _out_dir(args, sc):
    out = Path(args.out or sc.output_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(args, sc):
    dm = sc.discrete_model()
    res = experiment.run_single(dm, sc.force_signal(), sc.x0, sc.filter_init(),
                                sc.steps, sc.seed)
    out = _out_dir(args, sc)
    write_run_csv(out / "run.csv", res)
    steady = min(sc.steady_start, len(res.f_err) - 1)
    mse_diag = np.diagonal(res.mse_theory, axis1=1, axis2=2)
    _write_json(out / "summary.json", {
        "time_average_bias": _floats(experiment.time_average_bias(res.f_err)),
        "rms_error": _floats(np.sqrt(np.mean(res.f_err**2, axis=0))),
        "steady_state_mse_theory": _floats(np.mean(mse_diag[steady:], axis=0)),
        "final_mse_theory": _floats(mse_diag[-1]),
        "seed": sc.seed,
        "steps": sc.steps,
        "config": sc.to_dict(),
    })
    print(f"wrote {out / 'run.csv'} and {out / 'summary.json'}")
    return EXIT_OK


def cmd_montecarlo(args, sc):
    if sc.n_runs < 2:
        raise ConfigError(f"montecarlo needs at least 2 runs, got {sc.n_runs}")
    dm = sc.discrete_model()
    rep = experiment.monte_carlo(
        dm, sc.force_signal(), sc.x0, sc.filter_init(), sc.steps, sc.n_runs,
        sc.seed, workers=sc.workers, steady_start=sc.steady_start,
        identical_seeds=sc.identical_seeds)
    out = _out_dir(args, sc)
    write_accuracy_csv(out / "accuracy.csv", rep)
    steady = rep.ratio[rep.steady_start:]
    _write_json(out / "summary.json", {
        "grand_average_ratio": rep.grand_average_ratio,
        "ratio_fraction_in_band": float(np.mean((steady >= 0.5) & (steady <= 1.7))),
        "mean_bias_f": _floats(rep.bias_f.mean(axis=0)),
        "n_runs": rep.n_runs,
        "seed": sc.seed,
        "steady_start": rep.steady_start,
        "config": sc.to_dict(),
    })
    print(f"wrote {out / 'accuracy.csv'} and {out / 'summary.json'}")
    return EXIT_OK


def cmd_discretize(args, sc):
    dm = sc.discrete_model()
    for name in ("A", "B", "H", "Q", "R"):
        print(f"{name} =")
        for row in getattr(dm, name):
            print("  " + "  ".join(f"{v:.17g}" for v in row))
    print(f"dt = {dm.dt:.17g}")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="forcetrack",
        description="Track an unknown force on a sampled linear Gaussian system.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, help_ in (
            ("run", cmd_run, "simulate and filter one run"),
            ("montecarlo", cmd_montecarlo, "numerical vs theoretical accuracy"),
            ("discretize", cmd_discretize, "print the sampled system matrices")):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--config", help="scenario TOML file (default: bundled example)")
        p.add_argument("--seed", type=int, help="override simulation.seed")
        p.add_argument("--out", help="output directory (default: output.dir)")
        if name == "montecarlo":
            p.add_argument("--runs", type=int, help="override experiment.n_runs")
            p.add_argument("--identical-seeds", action="store_true", default=None,
                           help="reuse one noise realisation for every run (debugging)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        sc = Scenario.load(args.config) if args.config else Scenario.bundled()
        sc = sc.with_overrides(seed=args.seed, runs=getattr(args, "runs", None),
                               identical_seeds=getattr(args, "identical_seeds", None))
        return args.func(args, sc)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ForceTrackError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
