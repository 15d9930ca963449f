"""Scenario files: TOML with dotted section keys.

A scenario is a flat list of ``section.key = value`` lines (ordinary TOML
tables are accepted too)::

    run.kind = "decoherence"
    system.lambdas = [0.0, 1.0]
    bath.kind = "ohmic"
    bath.n = 1.0
    bath.b = 1.0
    thermal.beta = inf
    time.t_min = 0.0
    time.t_max = 20.0
    time.points = 41

See the README for every key. :func:`load_config` raises
:class:`~qmeasure.errors.ConfigError` for syntax, unknown keys and wrong
types; :func:`validate` raises
:class:`~qmeasure.errors.PreconditionError` naming the offending key for any
value the numerical code would reject.
"""
from __future__ import annotations

import dataclasses
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .decoherence import ThermalParams
from .errors import ConfigError, PreconditionError
from .reduced_density import SystemSpec
from .spectral import Mode, ModeEnsemble, OhmicFamily

RUN_KINDS = ("decoherence", "pointer", "regimes", "oracle-compare", "sweep")
SWEEP_AXES = ("b", "p", "beta", "n", "omega_d", "t")
ORACLE_MAX_MODES = 3


@dataclass
class EnsembleConfig:
    kind: str = "ohmic"
    big_omega: float = 1.0
    n: float = 1.0
    omega_d: float = 1.0
    modes: int = 400
    omega_max: float | None = None
    omegas: list[float] = field(default_factory=list)
    g: list[float] = field(default_factory=list)
    scale: float = 1.0
    method: str = "auto"

    def family(self) -> OhmicFamily:
        return OhmicFamily(self.big_omega, self.n, self.omega_d)

    def ensemble(self) -> ModeEnsemble:
        if self.kind == "ohmic":
            return ModeEnsemble.continuum(self.family(), self.modes, self.omega_max)
        return ModeEnsemble.explicit([Mode(w, g) for w, g in zip(self.omegas, self.g)])


@dataclass
class TimeGrid:
    t_min: float = 0.0
    t_max: float = 1.0
    points: int = 11
    spacing: str = "linear"
    values: list[float] | None = None

    def times(self) -> np.ndarray:
        if self.values is not None:
            return np.asarray(self.values, dtype=float)
        if self.points < 1:
            return np.empty(0)
        if self.spacing == "log":
            return np.geomspace(self.t_min, self.t_max, self.points)
        return np.linspace(self.t_min, self.t_max, self.points)


@dataclass
class ScenarioConfig:
    kind: str = "decoherence"
    lambdas: list[float] = field(default_factory=lambda: [0.0, 1.0])
    rho: list[list[complex]] | None = None
    bath: EnsembleConfig | None = None
    pointer: EnsembleConfig | None = None
    pointer_lambda: float | None = None
    pointer_tau: list[float] = field(default_factory=list)
    beta: float = math.inf
    time: TimeGrid = field(default_factory=TimeGrid)
    sweep_parameter: str | None = None
    sweep_values: list[float] = field(default_factory=list)
    sweep_kind: str | None = None
    sweep_t: float | None = None
    oracle_start: int = 4
    oracle_budget: int = 20000

    def thermal(self) -> ThermalParams:
        return ThermalParams(self.beta)

    def system(self) -> SystemSpec:
        if self.rho is None:
            d = len(self.lambdas)
            return SystemSpec.pure(self.lambdas, np.ones(d))
        return SystemSpec(tuple(self.lambdas), np.array(self.rho, dtype=complex))

    def inner_sweep_kind(self) -> str:
        if self.sweep_kind is not None:
            return self.sweep_kind
        return self.kind if self.kind in ("decoherence", "pointer", "regimes") else "decoherence"

    def conditioning_lambda(self) -> float:
        return self.lambdas[-1] if self.pointer_lambda is None else self.pointer_lambda

    def with_value(self, parameter: str, value: float) -> "ScenarioConfig":
        """Copy with one sweep axis set to ``value`` (``t`` is handled by the caller)."""
        new = dataclasses.replace(self)
        if parameter == "b":
            new.bath = dataclasses.replace(self.bath, scale=value)
        elif parameter == "p":
            new.pointer = dataclasses.replace(self.pointer, scale=value)
        elif parameter == "beta":
            new.beta = value
        elif parameter in ("n", "omega_d"):
            for name in ("bath", "pointer"):
                ens = getattr(self, name)
                if ens is not None and ens.kind == "ohmic":
                    setattr(new, name, dataclasses.replace(ens, **{parameter: value}))
        return new


# key -> (attribute path, converter)
def _real(v):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError("expected a number")
    return float(v)


def _int(v):
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError("expected an integer")
    return v


def _str(v):
    if not isinstance(v, str):
        raise TypeError("expected a string")
    return v


def _reals(v):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return [float(v)]
    if not isinstance(v, list):
        raise TypeError("expected a list of numbers")
    return [_real(x) for x in v]


def _entry(x):
    if isinstance(x, str):
        return complex(x.replace(" ", ""))
    return complex(_real(x))


def _matrix(v):
    if not isinstance(v, list) or not all(isinstance(r, list) for r in v):
        raise TypeError("expected a list of rows")
    return [[_entry(x) for x in row] for row in v]


def _beta(v):
    if isinstance(v, str):
        if v.strip().lower() in ("inf", "infinite", "infinity"):
            return math.inf
        raise TypeError('expected a number or "inf"')
    return _real(v)


_ENSEMBLE_KEYS = {
    "kind": _str,
    "big_omega": _real,
    "n": _real,
    "omega_d": _real,
    "modes": _int,
    "omega_max": _real,
    "omegas": _reals,
    "g": _reals,
    "method": _str,
}


def _flatten(table: dict, prefix: str = "") -> dict[str, Any]:
    out = {}
    for key, value in table.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            out.update(_flatten(value, name + "."))
        else:
            out[name] = value
    return out


def parse_config(text: str) -> ScenarioConfig:
    """Parse scenario text into a :class:`ScenarioConfig` (no range checks)."""
    try:
        flat = _flatten(tomllib.loads(text))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"syntax error: {exc}") from None
    cfg = ScenarioConfig()
    ensembles: dict[str, dict[str, Any]] = {}
    simple = {
        "run.kind": ("kind", _str),
        "system.lambdas": ("lambdas", _reals),
        "system.rho": ("rho", _matrix),
        "thermal.beta": ("beta", _beta),
        "pointer.lambda": ("pointer_lambda", _real),
        "pointer.tau": ("pointer_tau", _reals),
        "sweep.parameter": ("sweep_parameter", _str),
        "sweep.values": ("sweep_values", _reals),
        "sweep.kind": ("sweep_kind", _str),
        "sweep.t": ("sweep_t", _real),
        "oracle.cutoff_start": ("oracle_start", _int),
        "oracle.budget": ("oracle_budget", _int),
    }
    time_keys = {"t_min": _real, "t_max": _real, "points": _int, "spacing": _str, "values": _reals}
    for key, value in flat.items():
        section, _, leaf = key.partition(".")
        try:
            if key in simple:
                attr, conv = simple[key]
                setattr(cfg, attr, conv(value))
            elif section == "time" and leaf in time_keys:
                setattr(cfg.time, leaf, time_keys[leaf](value))
            elif section in ("bath", "pointer") and (leaf in _ENSEMBLE_KEYS or leaf == {"bath": "b", "pointer": "p"}[section]):
                conv = _real if leaf in ("b", "p") else _ENSEMBLE_KEYS[leaf]
                ensembles.setdefault(section, {})["scale" if leaf in ("b", "p") else leaf] = conv(value)
            else:
                raise ConfigError(f"unknown key {key!r}")
        except TypeError as exc:
            raise ConfigError(f"{key}: {exc}") from None
    for section, values in ensembles.items():
        setattr(cfg, section, EnsembleConfig(**values))
    return cfg


def load_config(path: str | Path) -> ScenarioConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text)


def _fail(key: str, message: str):
    raise PreconditionError(f"{key}: {message}")


def _validate_ensemble(name: str, ens: EnsembleConfig, scale_key: str):
    if ens.kind not in ("ohmic", "discrete"):
        _fail(f"{name}.kind", f"must be 'ohmic' or 'discrete', got {ens.kind!r}")
    if ens.method not in ("auto", "quadrature", "discrete", "closed"):
        _fail(f"{name}.method", f"unknown method {ens.method!r}")
    if not math.isfinite(ens.scale):
        _fail(f"{name}.{scale_key}", "coupling scale must be finite")
    if ens.kind == "ohmic":
        for key in ("big_omega", "omega_d", "n"):
            if not getattr(ens, key) > 0:
                _fail(f"{name}.{key}", f"must be positive, got {getattr(ens, key)!r}")
        if ens.modes < 1:
            _fail(f"{name}.modes", "mode count must be >= 1")
        if ens.omega_max is not None and not ens.omega_max > 0:
            _fail(f"{name}.omega_max", "must be positive")
        if ens.method == "closed" and ens.n != 1:
            _fail(f"{name}.method", "closed form needs n = 1")
    else:
        if not ens.omegas:
            _fail(f"{name}.omegas", "discrete ensemble needs at least one mode")
        if len(ens.omegas) != len(ens.g):
            _fail(f"{name}.g", "needs one coupling per entry of omegas")
        if any(not w > 0 for w in ens.omegas):
            _fail(f"{name}.omegas", "frequencies must be positive")
        if ens.method in ("quadrature", "closed"):
            _fail(f"{name}.method", f"method {ens.method!r} needs kind = 'ohmic'")


def validate(cfg: ScenarioConfig, kind: str | None = None) -> None:
    """Check every precondition the run of ``kind`` (default ``cfg.kind``) relies on."""
    kind = kind or cfg.kind
    if kind not in RUN_KINDS:
        _fail("run.kind", f"must be one of {', '.join(RUN_KINDS)}, got {kind!r}")
    if not cfg.lambdas:
        _fail("system.lambdas", "spectrum must be nonempty")
    try:
        cfg.system()
    except PreconditionError as exc:
        _fail("system.rho" if cfg.rho is not None else "system.lambdas", str(exc))
    if not cfg.beta > 0:
        _fail("thermal.beta", f"must be positive or inf, got {cfg.beta!r}")
    grid = cfg.time
    if grid.spacing not in ("linear", "log"):
        _fail("time.spacing", f"must be 'linear' or 'log', got {grid.spacing!r}")
    if grid.values is None:
        if grid.points < 1:
            _fail("time.points", "time grid is empty")
        if grid.t_min < 0:
            _fail("time.t_min", "times must be nonnegative")
        if grid.t_max < grid.t_min:
            _fail("time.t_max", "t_max must be >= t_min")
        if grid.spacing == "log" and grid.t_min <= 0:
            _fail("time.t_min", "log spacing needs t_min > 0")
    else:
        if not grid.values:
            _fail("time.values", "time grid is empty")
        if any(t < 0 for t in grid.values):
            _fail("time.values", "times must be nonnegative")
    if cfg.bath is not None:
        _validate_ensemble("bath", cfg.bath, "b")
        if cfg.bath.method == "closed" and not math.isinf(cfg.beta):
            _fail("bath.method", "the closed form needs thermal.beta = inf")
    if cfg.pointer is not None:
        _validate_ensemble("pointer", cfg.pointer, "p")
    if any(t < 0 for t in cfg.pointer_tau):
        _fail("pointer.tau", "elapsed times must be nonnegative")
    if cfg.pointer_lambda is not None and cfg.pointer_lambda not in cfg.lambdas:
        _fail("pointer.lambda", "must be one of system.lambdas")

    if kind == "decoherence" and cfg.bath is None:
        _fail("bath", "a decoherence run needs a bath section")
    if kind == "pointer":
        if cfg.pointer is None:
            _fail("pointer", "a pointer run needs a pointer section")
        if cfg.pointer.method == "quadrature":
            _fail("pointer.method", "pointer observables use 'closed' or 'discrete'")
    if kind == "regimes":
        if cfg.bath is None or cfg.bath.kind != "ohmic":
            _fail("bath.kind", "regime classification needs an ohmic bath")
        if np.any(grid.times() <= 0):
            _fail("time.t_min", "regime classification needs t > 0")
    if kind == "oracle-compare":
        if cfg.bath is None and cfg.pointer is None:
            _fail("bath", "oracle comparison needs a bath or pointer section")
        for name in ("bath", "pointer"):
            ens = getattr(cfg, name)
            if ens is None:
                continue
            if ens.kind != "discrete":
                _fail(f"{name}.kind", "the oracle needs explicit discrete modes")
            if len(ens.omegas) > ORACLE_MAX_MODES:
                _fail(f"{name}.omegas", f"the oracle handles at most {ORACLE_MAX_MODES} modes")
        if cfg.oracle_start < 1:
            _fail("oracle.cutoff_start", "must be >= 1")
    if kind == "sweep":
        if cfg.sweep_parameter not in SWEEP_AXES:
            _fail("sweep.parameter", f"must be one of {', '.join(SWEEP_AXES)}, got {cfg.sweep_parameter!r}")
        if not cfg.sweep_values:
            _fail("sweep.values", "sweep axis is empty")
        inner = cfg.inner_sweep_kind()
        if inner not in ("decoherence", "pointer", "regimes"):
            _fail("sweep.kind", f"must be decoherence, pointer or regimes, got {inner!r}")
        axis = cfg.sweep_parameter
        if axis == "t":
            if any(t < 0 for t in cfg.sweep_values):
                _fail("sweep.values", "times must be nonnegative")
            if inner == "regimes" and any(t <= 0 for t in cfg.sweep_values):
                _fail("sweep.values", "regime classification needs t > 0")
            validate(cfg, inner)
            return
        if axis == "p" and cfg.pointer is None:
            _fail("pointer", "sweeping p needs a pointer section")
        if axis == "b" and cfg.bath is None:
            _fail("bath", "sweeping b needs a bath section")
        if cfg.sweep_t is not None and cfg.sweep_t < 0:
            _fail("sweep.t", "must be nonnegative")
        if inner == "regimes" and cfg.sweep_t is not None and cfg.sweep_t <= 0:
            _fail("sweep.t", "regime classification needs t > 0")
        for value in cfg.sweep_values:
            try:
                validate(cfg.with_value(axis, value), inner)
            except PreconditionError as exc:
                raise PreconditionError(f"sweep.values ({axis}={value!r}) -> {exc}") from None
