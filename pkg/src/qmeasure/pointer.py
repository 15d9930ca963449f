"""Pointer observables conditioned on an eigenvalue of the measured operator.

Each pointer mode evolves under ``omega a^dag a + p lam g (a + a^dag)``, a
displaced oscillator. Starting from a thermal state, the mean amplitude at
time ``t`` is ``alpha = -(p lam g / omega) (1 - exp(-i omega t))`` and

* energy gain  ``dE(t) = 4 p**2 lam**2 sum g**2/omega sin(omega t/2)**2``
* field        ``X(t)  = -4 p lam     sum g**2/omega sin(omega t/2)**2``

so ``dE = -p lam X`` term by term. Neither depends on temperature.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decoherence import ThermalParams, ZERO_TEMPERATURE, _check_times
from .errors import UnsupportedSpectrumError
from .spectral import ModesLike, OhmicFamily, mode_arrays

__all__ = [
    "PointerCoupling",
    "PointerReport",
    "pointer_energy_initial",
    "pointer_energy_initial_as_printed",
    "pointer_energy_change_discrete",
    "pointer_energy_change_ohmic",
    "pointer_x_change_discrete",
    "pointer_x_change_ohmic",
    "switchoff_amplitudes",
    "pointer_x_after_switchoff",
    "pointer_report",
]


@dataclass(frozen=True)
class PointerCoupling:
    """Pointer coupling scale ``p`` and the conditioning eigenvalue ``lam``."""

    p: float
    lam: float

    def __post_init__(self):
        if isinstance(self.p, complex) or isinstance(self.lam, complex):
            raise UnsupportedSpectrumError("pointer coupling and eigenvalue must be real")
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "lam", float(self.lam))


@dataclass
class PointerReport:
    """Pointer energy and field for one conditioning eigenvalue at one time.

    ``delta_e_terms`` and ``x_terms`` are the per-mode contributions whose
    sums are ``delta_e`` and ``x``.
    """

    lam: float
    t: float
    e_initial: float
    delta_e: float
    x: float
    delta_e_terms: np.ndarray
    x_terms: np.ndarray


def _sum(terms) -> float:
    # numpy pairwise summation: fixed reduction tree for a given length.
    return float(np.sum(terms))


def pointer_energy_initial(modes: ModesLike, thermal: ThermalParams) -> float:
    """Thermal pointer energy ``sum omega / (exp(beta omega) - 1)``; zero at ``beta = inf``."""
    if thermal.is_zero_temperature:
        return 0.0
    omega, _ = mode_arrays(modes)
    return _sum(omega / np.expm1(thermal.beta * omega))


def pointer_energy_initial_as_printed(modes: ModesLike, thermal: ThermalParams) -> float:
    """``sum omega e^{-beta omega} / (1 - e^{-beta omega})**2``.

    This is the squared-denominator variant that appears in print for the
    initial pointer energy. It is kept only so tests can show it disagrees
    with the thermal trace; use :func:`pointer_energy_initial` instead.
    """
    if thermal.is_zero_temperature:
        return 0.0
    omega, _ = mode_arrays(modes)
    q = np.exp(-thermal.beta * omega)
    return _sum(omega * q / (-np.expm1(-thermal.beta * omega)) ** 2)


def _response_terms(modes: ModesLike, t: float, tau: float = 0.0) -> np.ndarray:
    # g^2/omega * sin(omega t/2) * sin(omega (t + 2 tau)/2); tau = 0 gives the
    # sin^2 kernel bit for bit.
    omega, g = mode_arrays(modes)
    s = np.sin(0.5 * omega * t)
    s_late = s if tau == 0.0 else np.sin(0.5 * omega * (t + 2.0 * tau))
    return g * g / omega * s * s_late


def pointer_energy_change_discrete(modes: ModesLike, coupling: PointerCoupling, t: float) -> float:
    """Energy gained by the pointer after coupling time ``t``."""
    t = float(_check_times(t))
    p, lam = coupling.p, coupling.lam
    return 4.0 * p * p * lam * lam * _sum(_response_terms(modes, t))


def pointer_x_change_discrete(modes: ModesLike, coupling: PointerCoupling, t: float) -> float:
    """Expectation of ``X = sum g (a + a^dag)`` after coupling time ``t``."""
    t = float(_check_times(t))
    return -4.0 * coupling.p * coupling.lam * _sum(_response_terms(modes, t))


def _ohmic_saturation_profile(family: OhmicFamily, t) -> np.ndarray:
    if not family.is_ohmic:
        raise UnsupportedSpectrumError(f"closed form needs n = 1, got n = {family.n!r}")
    t = _check_times(t)
    x2 = (family.omega_d * t) ** 2
    return x2 / (1.0 + x2)


def pointer_energy_change_ohmic(family: OhmicFamily, coupling: PointerCoupling, t):
    """Ohmic continuum energy gain ``2 Omega omega_d lam**2 p**2 (wt)**2/(1+(wt)**2)``."""
    prof = _ohmic_saturation_profile(family, t)
    out = 2.0 * family.big_omega * family.omega_d * coupling.lam**2 * coupling.p**2 * prof
    return float(out) if np.ndim(out) == 0 else out


def pointer_x_change_ohmic(family: OhmicFamily, coupling: PointerCoupling, t):
    """Ohmic continuum field ``-2 Omega omega_d lam p (wt)**2/(1+(wt)**2)``."""
    prof = _ohmic_saturation_profile(family, t)
    out = -2.0 * family.big_omega * family.omega_d * coupling.lam * coupling.p * prof
    return float(out) if np.ndim(out) == 0 else out


def switchoff_amplitudes(modes: ModesLike, coupling: PointerCoupling, t_meas: float) -> np.ndarray:
    """Mean mode amplitudes ``<a_m>`` at the moment the coupling is switched off.

    ``alpha_m = -(p lam g_m / omega_m) (1 - exp(-i omega_m t_meas))`` for an
    initially thermal (zero-mean) pointer.
    """
    t_meas = float(_check_times(t_meas))
    omega, g = mode_arrays(modes)
    return -(coupling.p * coupling.lam * g / omega) * (1.0 - np.exp(-1j * omega * t_meas))


def pointer_x_after_switchoff(modes: ModesLike, coupling: PointerCoupling, t_meas: float, tau: float) -> float:
    """``<X>`` a time ``tau`` after the coupling was switched off at ``t_meas``.

    After switch-off each amplitude rotates freely, ``alpha_m exp(-i omega_m
    tau)``, and ``<X> = sum_m 2 g_m Re[alpha_m exp(-i omega_m tau)]``. That
    sum is evaluated in the real form ``-4 p lam sum g**2/omega
    sin(omega t/2) sin(omega (t + 2 tau)/2)``, which equals
    :func:`pointer_x_change_discrete` exactly at ``tau = 0``.
    """
    t_meas = float(_check_times(t_meas))
    tau = float(_check_times(tau))
    return -4.0 * coupling.p * coupling.lam * _sum(_response_terms(modes, t_meas, tau))


def pointer_report(
    modes: ModesLike,
    coupling: PointerCoupling,
    t: float,
    thermal: ThermalParams = ZERO_TEMPERATURE,
) -> PointerReport:
    terms = _response_terms(modes, float(_check_times(t)))
    p, lam = coupling.p, coupling.lam
    de_terms = 4.0 * p * p * lam * lam * terms
    x_terms = -4.0 * p * lam * terms
    return PointerReport(
        lam=lam,
        t=float(t),
        e_initial=pointer_energy_initial(modes, thermal),
        delta_e=pointer_energy_change_discrete(modes, coupling, t),
        x=pointer_x_change_discrete(modes, coupling, t),
        delta_e_terms=de_terms,
        x_terms=x_terms,
    )
