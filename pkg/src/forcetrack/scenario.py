"""Scenario files.

A scenario is a TOML document with the sections ``model``,
``discretization``, ``simulation``, ``force``, ``filter``, ``experiment``
and ``output``; see README.md for the full grammar. :meth:`Scenario.to_dict`
produces a JSON-friendly echo that :meth:`Scenario.from_dict` parses back.
"""
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from . import simkit
from .discretize import discretize
from .errors import ConfigError, DimensionError
from .experiment import FilterInit
from .model import ContinuousModel, OptoParams, build_optomechanical

DEFAULT = "optomechanical.toml"

_FORCE_FIELDS = {
    "constant": ("value",),
    "sinusoid": ("amplitude", "frequency"),
    "gaussian_iid": ("mean", "variance"),
    "piecewise": ("starts", "values"),
    "from_file": ("path",),
}


def _get(section, key, where, kind=None):
    if key not in section:
        raise ConfigError(f"missing required field '{where}.{key}'")
    value = section[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"field '{where}.{key}' must be a number, got {value!r}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"field '{where}.{key}' must be an integer, got {value!r}")
        return value
    return value


def _section(doc, name, required=True):
    if name not in doc:
        if required:
            raise ConfigError(f"missing required section [{name}]")
        return {}
    if not isinstance(doc[name], dict):
        raise ConfigError(f"[{name}] must be a table")
    return doc[name]


def _matrix(section, key, where):
    try:
        return np.array(_get(section, key, where), dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"field '{where}.{key}' is not a numeric matrix") from exc


@dataclass(frozen=True)
class Scenario:
    """Parsed scenario; `raw` keeps the document for echoing."""

    raw: Dict[str, Any]
    base_dir: Path = field(default=Path("."), compare=False)

    @classmethod
    def from_dict(cls, doc, base_dir="."):
        sc = cls(raw=_plain(doc), base_dir=Path(base_dir))
        sc._check()
        return sc

    @classmethod
    def load(cls, path):
        path = Path(path)
        text = path.read_text()
        try:
            doc = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(doc, path.parent)

    @classmethod
    def bundled(cls, name=DEFAULT):
        text = resources.files("forcetrack.scenarios").joinpath(name).read_text()
        return cls.from_dict(tomllib.loads(text))

    def to_dict(self):
        return _plain(self.raw)

    def _check(self):
        # Touch every accessor so configuration errors surface at load time.
        self.continuous_model()
        self.dt
        self.steps
        self.x0
        self.seed
        self.force_signal()
        self.filter_init()
        self.n_runs

    # -- model ---------------------------------------------------------------

    def continuous_model(self) -> ContinuousModel:
        sec = _section(self.raw, "model")
        kind = sec.get("kind", "optomechanical")
        if kind == "optomechanical":
            meas = None
            if "measurement_intensity" in sec:
                meas = _get(sec, "measurement_intensity", "model", float)
            if "measurement_variance" in sec:
                if meas is not None:
                    raise ConfigError(
                        "give at most one of 'model.measurement_intensity' and "
                        "'model.measurement_variance'")
                meas = _get(sec, "measurement_variance", "model", float) * self.dt
            return build_optomechanical(OptoParams(
                mass=_get(sec, "mass", "model", float),
                omega_m=_get(sec, "omega_m", "model", float),
                noise_intensity=_get(sec, "noise_intensity", "model", float),
                measurement_intensity=meas,
            ))
        if kind == "matrices":
            mats = {k: _matrix(sec, k, "model") for k in ("A0", "B0", "H0", "Q0", "R0")}
            try:
                return ContinuousModel(**mats)
            except DimensionError as exc:
                raise ConfigError(f"[model] dimension error: {exc}") from exc
        raise ConfigError(f"unknown model kind {kind!r}")

    def discrete_model(self):
        return discretize(self.continuous_model(), self.dt)

    @property
    def dt(self) -> float:
        dt = _get(_section(self.raw, "discretization"), "dt", "discretization", float)
        if not dt > 0:
            raise ConfigError(f"'discretization.dt' must be positive, got {dt}")
        return dt

    # -- simulation ------------------------------------------------------------

    @property
    def steps(self) -> int:
        steps = _get(_section(self.raw, "simulation"), "steps", "simulation", int)
        if steps < 2:
            raise ConfigError("'simulation.steps' must be at least 2")
        return steps

    @property
    def x0(self):
        sec = _section(self.raw, "simulation")
        return np.array(_get(sec, "x0", "simulation"), dtype=float)

    @property
    def seed(self) -> int:
        seed = _get(_section(self.raw, "simulation"), "seed", "simulation", int)
        if seed < 0:
            raise ConfigError("'simulation.seed' must be non-negative")
        return seed

    def force_signal(self):
        sec = _section(self.raw, "force")
        kind = _get(sec, "kind", "force")
        if kind not in _FORCE_FIELDS:
            raise ConfigError(f"unknown force kind {kind!r}")
        for key in _FORCE_FIELDS[kind]:
            _get(sec, key, "force")
        try:
            if kind == "constant":
                return simkit.Constant(sec["value"])
            if kind == "sinusoid":
                return simkit.Sinusoid(_get(sec, "amplitude", "force", float),
                                       _get(sec, "frequency", "force", float),
                                       float(sec.get("phase", 0.0)))
            if kind == "gaussian_iid":
                return simkit.GaussianIID(_get(sec, "mean", "force", float),
                                          _get(sec, "variance", "force", float))
            if kind == "piecewise":
                return simkit.Piecewise(tuple(zip(sec["starts"], sec["values"])))
            path = Path(sec["path"])
            if not path.is_absolute():
                path = self.base_dir / path
            return simkit.FromFile(str(path))
        except ValueError as exc:
            raise ConfigError(f"[force]: {exc}") from exc

    # -- filter / experiment / output --------------------------------------------

    def filter_init(self) -> FilterInit:
        sec = _section(self.raw, "filter", required=False)
        x0_hat = sec.get("x0_hat")
        if x0_hat is not None:
            x0_hat = np.array(x0_hat, dtype=float)
        p0_scale = float(sec.get("p0_scale", 1e-10))
        if p0_scale < 0:
            raise ConfigError("'filter.p0_scale' must be non-negative")
        return FilterInit(x0_hat=x0_hat, p0_scale=p0_scale)

    @property
    def n_runs(self) -> int:
        return int(_section(self.raw, "experiment", required=False).get("n_runs", 100))

    @property
    def workers(self) -> int:
        return int(_section(self.raw, "experiment", required=False).get("workers", 1))

    @property
    def steady_start(self) -> int:
        return int(_section(self.raw, "experiment", required=False).get("steady_start", 50))

    @property
    def identical_seeds(self) -> bool:
        return bool(_section(self.raw, "experiment", required=False).get("identical_seeds", False))

    @property
    def output_dir(self) -> Optional[str]:
        return _section(self.raw, "output", required=False).get("dir")

    def with_overrides(self, seed=None, runs=None, out=None, identical_seeds=None):
        doc = self.to_dict()
        if seed is not None:
            doc.setdefault("simulation", {})["seed"] = int(seed)
        if runs is not None:
            doc.setdefault("experiment", {})["n_runs"] = int(runs)
        if out is not None:
            doc.setdefault("output", {})["dir"] = str(out)
        if identical_seeds is not None:
            doc.setdefault("experiment", {})["identical_seeds"] = bool(identical_seeds)
        return Scenario.from_dict(doc, self.base_dir)


def _plain(obj):
    """Deep copy into JSON-compatible builtins."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj
