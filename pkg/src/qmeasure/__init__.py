"""Exactly solvable measurement model: bath decoherence, pointer amplification, Fock-space oracle."""
from .decoherence import (
    ZERO_TEMPERATURE,
    DecoherenceCurve,
    Regime,
    ThermalParams,
    decoherence_curve,
    fit_thermal_exponent,
    gamma_continuum,
    gamma_discrete,
    gamma_ohmic_lowT,
    regime_classify,
    suppression_factor,
)
from .errors import (
    ConfigError,
    ConvergenceError,
    DivergentSpectrumError,
    PreconditionError,
    QMeasureError,
    UnsupportedSpectrumError,
)
from .pointer import (
    PointerCoupling,
    PointerReport,
    pointer_energy_change_discrete,
    pointer_energy_change_ohmic,
    pointer_energy_initial,
    pointer_energy_initial_as_printed,
    pointer_report,
    pointer_x_after_switchoff,
    pointer_x_change_discrete,
    pointer_x_change_ohmic,
    switchoff_amplitudes,
)
from .reduced_density import MixtureReport, SystemSpec, mixture_report, offdiagonal_magnitudes
from .spectral import Mode, ModeEnsemble, OhmicFamily, discretize, spectral_weight, total_weight

__version__ = "0.1.0"
