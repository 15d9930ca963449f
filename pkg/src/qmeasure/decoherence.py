"""Spectral decoherence function and the off-diagonal suppression it controls.

For modes ``(omega_k, g_k)`` at inverse temperature ``beta``::

    Gamma(t) = sum_k (g_k / omega_k)**2 * sin(omega_k t / 2)**2 * coth(beta omega_k / 2)

and an off-diagonal element between eigenvalues ``l1`` and ``l2`` of the
measured operator shrinks by ``exp(-2 b**2 (l1 - l2)**2 Gamma(t))``.
"""
from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import PreconditionError, UnsupportedSpectrumError
from .quadrature import integrate_half_line
from .spectral import ModeEnsemble, ModesLike, OhmicFamily, mode_arrays

__all__ = [
    "ThermalParams",
    "ZERO_TEMPERATURE",
    "Regime",
    "DecoherenceCurve",
    "gamma_discrete",
    "gamma_continuum",
    "gamma_ohmic_lowT",
    "suppression_factor",
    "regime_classify",
    "fit_thermal_exponent",
    "decoherence_curve",
]

REGIME_MARGIN = 10.0


@dataclass(frozen=True)
class ThermalParams:
    """Inverse temperature ``beta``; ``math.inf`` is the zero-temperature limit."""

    beta: float = math.inf

    def __post_init__(self):
        if isinstance(self.beta, str):
            object.__setattr__(self, "beta", _parse_beta(self.beta))
        if not self.beta > 0:
            raise PreconditionError(f"inverse temperature must be positive or inf, got {self.beta!r}")
        object.__setattr__(self, "beta", float(self.beta))

    @property
    def is_zero_temperature(self) -> bool:
        return math.isinf(self.beta)

    def coth_factor(self, omega):
        """``coth(beta * omega / 2)``, exactly 1 in the zero-temperature limit."""
        omega = np.asarray(omega, dtype=float)
        if self.is_zero_temperature:
            return np.ones_like(omega)
        return 1.0 / np.tanh(0.5 * self.beta * omega)


def _parse_beta(text: str) -> float:
    if text.strip().lower() in ("inf", "infinite", "infinity"):
        return math.inf
    return float(text)


ZERO_TEMPERATURE = ThermalParams()


class Regime(str, enum.Enum):
    QUIET = "quiet"
    QUANTUM = "quantum"
    THERMAL = "thermal"
    CROSSOVER = "crossover"

    def __str__(self):
        return self.value


def _check_times(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.isnan(t)) or np.any(t < 0):
        raise PreconditionError("times must be nonnegative")
    return t


def gamma_discrete(modes: ModesLike, t, thermal: ThermalParams = ZERO_TEMPERATURE):
    """Decoherence function of a finite mode set.

    ``t`` may be a scalar or an array; the result has the same shape.
    """
    t = _check_times(t)
    omega, g = mode_arrays(modes)
    weight = (g / omega) ** 2 * thermal.coth_factor(omega)
    s = np.sin(0.5 * np.multiply.outer(t, omega))
    out = np.sum(weight * s * s, axis=-1)
    return float(out) if out.ndim == 0 else out


def _continuum_integrand(family: OhmicFamily, t: float, thermal: ThermalParams):
    amp, n, wd = family.big_omega, family.n, family.omega_d

    def f(w):
        s = np.sin(0.5 * w * t)
        return amp * w ** (n - 2.0) * np.exp(-w / wd) * s * s * thermal.coth_factor(w)

    return f


def _upper_limit(family: OhmicFamily) -> float:
    # exp(-x) x**max(n, 1) is below 1e-20 of its peak well before x = 60 + 2n.
    return family.omega_d * (60.0 + 2.0 * family.n)


def gamma_continuum(
    family: OhmicFamily,
    t,
    thermal: ThermalParams = ZERO_TEMPERATURE,
    rel_tol: float = 1e-8,
):
    """Decoherence function of a power-law continuum, by quadrature.

    Integrates ``Omega omega**(n-2) exp(-omega/omega_d) sin(omega t/2)**2
    coth(beta omega/2)`` over ``omega > 0`` to relative tolerance ``rel_tol``.
    ``t`` may be a scalar or an array; each time is integrated separately.
    """
    t = _check_times(t)
    if t.ndim:
        return np.array([gamma_continuum(family, float(x), thermal, rel_tol) for x in t.ravel()]).reshape(t.shape)
    t = float(t)
    if t == 0.0:
        return 0.0
    value, _ = integrate_half_line(
        _continuum_integrand(family, t, thermal),
        upper=_upper_limit(family),
        period=2.0 * math.pi / t,
        smooth_scale=family.omega_d,
        rel_tol=rel_tol,
    )
    return value


def gamma_ohmic_lowT(family: OhmicFamily, t):
    """Zero-temperature Ohmic closed form ``(Omega / 4) ln(1 + (omega_d t)**2)``."""
    if not family.is_ohmic:
        raise UnsupportedSpectrumError(f"closed form needs n = 1, got n = {family.n!r}")
    t = _check_times(t)
    out = 0.25 * family.big_omega * np.log1p((family.omega_d * t) ** 2)
    return float(out) if out.ndim == 0 else out


def suppression_factor(b: float, lambda1: float, lambda2: float, gamma):
    """Off-diagonal suppression ``exp(-2 b**2 (lambda1 - lambda2)**2 gamma)``."""
    gamma = np.asarray(gamma, dtype=float)
    if np.any(gamma < 0) or np.any(np.isnan(gamma)):
        raise PreconditionError("gamma must be nonnegative")
    out = np.exp(-2.0 * b * b * (lambda1 - lambda2) ** 2 * gamma)
    return float(out) if out.ndim == 0 else out


def regime_classify(t: float, family: OhmicFamily, thermal: ThermalParams = ZERO_TEMPERATURE) -> Regime:
    """Label ``t`` by its ordering against ``1/omega_d`` and ``beta``.

    A decade of margin separates the regimes; anything in between is
    :attr:`Regime.CROSSOVER`.
    """
    if not t > 0:
        raise PreconditionError(f"regime classification needs t > 0, got {t!r}")
    quantum_time = 1.0 / family.omega_d
    if t < quantum_time / REGIME_MARGIN:
        return Regime.QUIET
    if t > REGIME_MARGIN * thermal.beta:
        return Regime.THERMAL
    if REGIME_MARGIN * quantum_time < t < thermal.beta / REGIME_MARGIN:
        return Regime.QUANTUM
    return Regime.CROSSOVER


def fit_thermal_exponent(family: OhmicFamily, thermal: ThermalParams, t_grid: Sequence[float]) -> float:
    """Least-squares slope of ``log Gamma`` against ``log t`` over a thermal-regime grid.

    For ``0 < n < 2`` the slope approaches ``2 - n`` deep in the thermal regime.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2:
        raise PreconditionError("exponent fit needs at least two times")
    if not 0 < family.n < 2:
        raise PreconditionError(f"thermal power law holds for 0 < n < 2, got n = {family.n!r}")
    if thermal.is_zero_temperature:
        raise PreconditionError("no thermal regime at zero temperature")
    outside = [t for t in t_grid if regime_classify(t, family, thermal) is not Regime.THERMAL]
    if outside:
        raise PreconditionError(f"times outside the thermal regime (t > 10 beta): {outside}")
    gammas = np.array([gamma_continuum(family, t, thermal) for t in t_grid])
    slope, _ = np.polyfit(np.log(t_grid), np.log(gammas), 1)
    return float(slope)


@dataclass
class DecoherenceCurve:
    """``Gamma(t)`` on a time grid plus suppression factors per eigenvalue pair.

    ``suppression[(i, j)]`` holds the factor for ``lambdas[i]``, ``lambdas[j]``
    with ``i < j``.
    """

    times: np.ndarray
    gamma: np.ndarray
    lambdas: tuple[float, ...] = ()
    b: float = 1.0
    suppression: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)


BathLike = Union[ModeEnsemble, OhmicFamily, Sequence]


def _gamma_function(bath: BathLike, thermal: ThermalParams, method: str, rel_tol: float):
    if isinstance(bath, OhmicFamily):
        bath = ModeEnsemble.continuum(bath)
    if not isinstance(bath, ModeEnsemble):
        bath = ModeEnsemble.explicit(bath)
    if method == "auto":
        method = "quadrature" if bath.is_continuum else "discrete"
    if method == "discrete":
        return lambda t: gamma_discrete(bath, t, thermal)
    if not bath.is_continuum:
        raise PreconditionError(f"method {method!r} needs a continuum bath")
    if method == "quadrature":
        return lambda t: gamma_continuum(bath.family, t, thermal, rel_tol)
    if method == "closed":
        if not thermal.is_zero_temperature:
            raise PreconditionError("the low-temperature closed form needs beta = inf")
        gamma_ohmic_lowT(bath.family, 0.0)
        return lambda t: gamma_ohmic_lowT(bath.family, t)
    raise PreconditionError(f"unknown gamma method {method!r}")


def decoherence_curve(
    bath: BathLike,
    times: Sequence[float],
    thermal: ThermalParams = ZERO_TEMPERATURE,
    *,
    b: float = 1.0,
    lambdas: Sequence[float] = (),
    method: str = "auto",
    rel_tol: float = 1e-8,
    threads: int | None = None,
) -> DecoherenceCurve:
    """Evaluate ``Gamma`` over ``times`` and the pairwise suppression factors.

    ``method`` is ``"discrete"`` (mode sum), ``"quadrature"`` (continuum),
    ``"closed"`` (zero-temperature Ohmic formula) or ``"auto"``. With
    ``threads > 1`` the time points are evaluated concurrently; output order
    always follows ``times``.
    """
    times = _check_times(np.asarray(times, dtype=float).ravel())
    gamma_of = _gamma_function(bath, thermal, method, rel_tol)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            gamma = np.array(list(pool.map(gamma_of, times)), dtype=float)
    else:
        gamma = np.array([gamma_of(t) for t in times], dtype=float)
    lambdas = tuple(float(x) for x in lambdas)
    supp = {
        (i, j): suppression_factor(b, lambdas[i], lambdas[j], gamma)
        for i in range(len(lambdas))
        for j in range(i + 1, len(lambdas))
    }
    return DecoherenceCurve(times=times, gamma=gamma, lambdas=lambdas, b=b, suppression=supp)
