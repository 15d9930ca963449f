"""Turn a validated :class:`~qmeasure.config.ScenarioConfig` into CSV tables.

Every table is a header plus rows; floats are written with 17 significant
digits so identical scenarios give byte-identical files.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import oracle
from .config import ScenarioConfig
from .decoherence import (
    Regime,
    _gamma_function,
    decoherence_curve,
    fit_thermal_exponent,
    regime_classify,
    suppression_factor,
)
from .errors import PreconditionError
from .pointer import (
    PointerCoupling,
    pointer_energy_change_discrete,
    pointer_energy_change_ohmic,
    pointer_energy_initial,
    pointer_x_after_switchoff,
    pointer_x_change_discrete,
    pointer_x_change_ohmic,
    switchoff_amplitudes,
)

FLOAT_FORMAT = ".17g"


@dataclass
class Table:
    header: list[str]
    rows: list[list[object]]

    def column(self, name: str) -> list[object]:
        i = self.header.index(name)
        return [row[i] for row in self.rows]


def format_value(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    # + 0.0 folds negative zero into zero
    return format(float(value) + 0.0, FLOAT_FORMAT)


def write_csv(table: Table, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(table.header)
        for row in table.rows:
            writer.writerow([format_value(v) for v in row])
    return path


def _ordered_map(fn: Callable, items: Sequence, threads: int | None):
    if threads and threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _supp_names(n: int) -> list[str]:
    return [f"supp_{i}_{j}" for i, j in _pairs(n)]


def _tau_names(taus: Sequence[float]) -> list[str]:
    return [f"x_after_tau={format_value(tau)}" for tau in taus]


def run_decoherence(cfg: ScenarioConfig, threads: int | None = None) -> Table:
    curve = decoherence_curve(
        cfg.bath.ensemble(),
        cfg.time.times(),
        cfg.thermal(),
        b=cfg.bath.scale,
        lambdas=cfg.lambdas,
        method=cfg.bath.method,
        threads=threads,
    )
    pairs = _pairs(len(cfg.lambdas))
    rows = [
        [t, g] + [curve.suppression[pair][k] for pair in pairs]
        for k, (t, g) in enumerate(zip(curve.times, curve.gamma))
    ]
    return Table(["t", "gamma"] + _supp_names(len(cfg.lambdas)), rows)


def _pointer_functions(cfg: ScenarioConfig):
    ens_cfg = cfg.pointer
    ens = ens_cfg.ensemble()
    coupling = PointerCoupling(ens_cfg.scale, cfg.conditioning_lambda())
    method = ens_cfg.method
    if method == "closed":
        fam = ens_cfg.family()
        de = lambda t: pointer_energy_change_ohmic(fam, coupling, t)
        x = lambda t: pointer_x_change_ohmic(fam, coupling, t)
    else:
        de = lambda t: pointer_energy_change_discrete(ens, coupling, t)
        x = lambda t: pointer_x_change_discrete(ens, coupling, t)

    def row(t: float) -> list[float]:
        late = [pointer_x_after_switchoff(ens, coupling, t, tau) for tau in cfg.pointer_tau]
        return [de(t), x(t)] + late

    return row


def run_pointer(cfg: ScenarioConfig, threads: int | None = None) -> Table:
    row = _pointer_functions(cfg)
    times = list(cfg.time.times())
    values = _ordered_map(row, times, threads)
    header = ["t", "delta_e", "x"] + _tau_names(cfg.pointer_tau)
    return Table(header, [[t] + v for t, v in zip(times, values)])


def run_regimes(cfg: ScenarioConfig, threads: int | None = None) -> Table:
    fam = cfg.bath.family()
    thermal = cfg.thermal()
    gamma_of = _gamma_function(cfg.bath.ensemble(), thermal, cfg.bath.method, 1e-8)
    times = list(cfg.time.times())
    gammas = _ordered_map(gamma_of, times, threads)
    rows = [[t, str(regime_classify(t, fam, thermal)), g] for t, g in zip(times, gammas)]
    return Table(["t", "regime_label", "gamma"], rows)


def _thermal_exponent(cfg: ScenarioConfig) -> float:
    fam, thermal = cfg.bath.family(), cfg.thermal()
    grid = cfg.time.times()
    try:
        return fit_thermal_exponent(fam, thermal, grid)
    except PreconditionError:
        return math.nan


def run_sweep(cfg: ScenarioConfig, threads: int | None = None) -> Table:
    axis = cfg.sweep_parameter
    inner = cfg.inner_sweep_kind()
    t_default = cfg.sweep_t if cfg.sweep_t is not None else float(cfg.time.times()[-1])

    def evaluate(value: float) -> list[object]:
        c = cfg if axis == "t" else cfg.with_value(axis, value)
        t = value if axis == "t" else t_default
        if inner == "decoherence":
            g = _gamma_function(c.bath.ensemble(), c.thermal(), c.bath.method, 1e-8)(t)
            lam = c.lambdas
            return [g] + [suppression_factor(c.bath.scale, lam[i], lam[j], g) for i, j in _pairs(len(lam))]
        if inner == "pointer":
            return _pointer_functions(c)(t)
        fam, thermal = c.bath.family(), c.thermal()
        g = _gamma_function(c.bath.ensemble(), thermal, c.bath.method, 1e-8)(t)
        return [str(regime_classify(t, fam, thermal)), g, _thermal_exponent(c)]

    values = list(cfg.sweep_values)
    results = _ordered_map(evaluate, values, threads)
    if inner == "decoherence":
        header = ["gamma"] + _supp_names(len(cfg.lambdas))
    elif inner == "pointer":
        header = ["delta_e", "x"] + _tau_names(cfg.pointer_tau)
    else:
        header = ["regime_label", "gamma", "thermal_exponent"]
    return Table([axis] + header, [[v] + r for v, r in zip(values, results)])


def _oracle_start(cfg: ScenarioConfig, omegas, thermal) -> int:
    need = max(oracle.min_thermal_cutoff(w, thermal) for w in omegas)
    return max(cfg.oracle_start, need)


def run_oracle_compare(cfg: ScenarioConfig, tolerance: float = 1e-6, threads: int | None = None) -> Table:
    """Closed forms against converged Fock-space evolution.

    Cutoffs are raised until the oracle values move by less than
    ``tolerance / 100``.
    """
    thermal = cfg.thermal()
    times = [float(t) for t in cfg.time.times()]
    conv_tol = tolerance / 100.0
    rows: list[list[object]] = []

    def add(name: str, closed: float, oracle_value: float):
        rows.append([name, closed, oracle_value, abs(closed - oracle_value)])

    if cfg.bath is not None:
        ens = cfg.bath.ensemble()
        omegas, _ = ens.arrays
        lam = cfg.lambdas
        d, m = len(lam), omegas.size
        b = cfg.bath.scale

        def observable(n: int) -> np.ndarray:
            return oracle.system_coherence_ratio(lam, ens, b, thermal, times, n)

        res = oracle.converge_cutoff(
            observable,
            conv_tol,
            start=_oracle_start(cfg, omegas, thermal),
            dim_of=lambda n: d * (n + 1) ** m,
            budget=cfg.oracle_budget,
        )
        closed_curve = decoherence_curve(ens, times, thermal, b=b, lambdas=lam, method="discrete")
        for k, t in enumerate(times):
            for i, j in _pairs(d):
                add(f"coherence_{i}_{j}@t={format_value(t)}", closed_curve.suppression[(i, j)][k], res.value[k, i, j])

    if cfg.pointer is not None:
        ens = cfg.pointer.ensemble()
        omegas, _ = ens.arrays
        m = omegas.size
        coupling = PointerCoupling(cfg.pointer.scale, cfg.conditioning_lambda())
        taus = list(cfg.pointer_tau)

        def pointer_values(n: int) -> np.ndarray:
            out = []
            for t in times:
                obs = oracle.pointer_observables(ens, coupling, thermal, t, n)
                out += [obs["e_initial"], obs["delta_e"], obs["x"]]
                out += list(obs["alpha"].real) + list(obs["alpha"].imag)
                out += [oracle.pointer_x_after_switchoff_oracle(ens, coupling, thermal, t, tau, n) for tau in taus]
            return np.array(out)

        res = oracle.converge_cutoff(
            pointer_values,
            conv_tol,
            start=_oracle_start(cfg, omegas, thermal),
            dim_of=lambda n: (n + 1) ** m,
            budget=cfg.oracle_budget,
        )
        values = iter(res.value)
        e0 = pointer_energy_initial(ens, thermal)
        for t in times:
            tag = f"@t={format_value(t)}"
            oracle_e0 = next(values)
            if t == times[0]:
                add("e_initial", e0, oracle_e0)
            add("delta_e" + tag, pointer_energy_change_discrete(ens, coupling, t), next(values))
            add("x" + tag, pointer_x_change_discrete(ens, coupling, t), next(values))
            alpha = switchoff_amplitudes(ens, coupling, t)
            re = [next(values) for _ in range(m)]
            im = [next(values) for _ in range(m)]
            for k in range(m):
                add(f"re_alpha_{k}" + tag, alpha[k].real, re[k])
                add(f"im_alpha_{k}" + tag, alpha[k].imag, im[k])
            for tau in taus:
                add(f"x_after_tau={format_value(tau)}" + tag, pointer_x_after_switchoff(ens, coupling, t, tau), next(values))

    return Table(["quantity", "closed_form", "oracle", "abs_err"], rows)


RUNNERS = {
    "decoherence": run_decoherence,
    "pointer": run_pointer,
    "regimes": run_regimes,
    "sweep": run_sweep,
}

OUTPUT_NAMES = {
    "decoherence": "decoherence.csv",
    "pointer": "pointer.csv",
    "regimes": "regimes.csv",
    "sweep": "sweep.csv",
    "oracle-compare": "oracle_compare.csv",
}


def execute(cfg: ScenarioConfig, kind: str, *, tolerance: float = 1e-6, threads: int | None = None) -> Table:
    if kind == "oracle-compare":
        return run_oracle_compare(cfg, tolerance, threads)
    return RUNNERS[kind](cfg, threads)
