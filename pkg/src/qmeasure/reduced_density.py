"""Reduced description of system plus pointer after the bath is traced out."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .decoherence import (
    ThermalParams,
    ZERO_TEMPERATURE,
    gamma_continuum,
    gamma_discrete,
    suppression_factor,
)
from .errors import PreconditionError
from .pointer import PointerCoupling, PointerReport, pointer_report
from .spectral import ModeEnsemble

__all__ = ["SystemSpec", "MixtureReport", "offdiagonal_magnitudes", "mixture_report", "DECOHERENCE_THRESHOLD"]

DECOHERENCE_THRESHOLD = 1e-3
_TRACE_TOL = 1e-12


@dataclass(frozen=True)
class SystemSpec:
    """Eigenvalues of the measured operator and the initial density matrix in its eigenbasis."""

    lambdas: tuple[float, ...]
    rho: np.ndarray

    def __post_init__(self):
        lambdas = tuple(float(x) for x in self.lambdas)
        rho = np.array(self.rho, dtype=complex)
        d = len(lambdas)
        if d == 0:
            raise PreconditionError("the spectrum must be nonempty")
        if len(set(lambdas)) != d:
            raise PreconditionError(f"eigenvalues must be pairwise distinct, got {lambdas}")
        if rho.shape != (d, d):
            raise PreconditionError(f"rho must be {d}x{d}, got shape {rho.shape}")
        if not np.allclose(rho, rho.conj().T, rtol=0, atol=_TRACE_TOL):
            raise PreconditionError("rho must be Hermitian")
        if abs(np.trace(rho) - 1.0) > _TRACE_TOL:
            raise PreconditionError(f"rho must have unit trace, got {np.trace(rho).real!r}")
        if np.linalg.eigvalsh(rho).min() < -_TRACE_TOL:
            raise PreconditionError("rho must be positive semidefinite")
        rho.flags.writeable = False
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "rho", rho)

    @classmethod
    def pure(cls, lambdas: Sequence[float], amplitudes: Sequence[complex]) -> "SystemSpec":
        """Pure initial state with the given (normalised on the fly) amplitudes."""
        psi = np.asarray(amplitudes, dtype=complex)
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise PreconditionError("amplitudes must not all vanish")
        psi = psi / norm
        return cls(tuple(lambdas), np.outer(psi, psi.conj()))

    @property
    def dim(self) -> int:
        return len(self.lambdas)


def offdiagonal_magnitudes(spec: SystemSpec, b: float, gamma: float) -> np.ndarray:
    """Matrix of ``|r_ij| / |rho_ij| = exp(-2 b**2 (l_i - l_j)**2 gamma)``.

    Only the bath trace changes the magnitude; the pointer factor acts as a
    unitary conjugation in pointer space.
    """
    lam = np.asarray(spec.lambdas)
    return suppression_factor(b, lam[:, None], lam[None, :], gamma)


@dataclass
class MixtureReport:
    """Born weights, off-diagonal suppression and per-outcome pointer reports.

    ``decohered`` is true when every off-diagonal suppression entry is below
    ``threshold``.
    """

    t: float
    gamma: float
    weights: np.ndarray
    offdiag_magnitudes: np.ndarray
    coherences: np.ndarray
    pointer: dict[float, PointerReport]
    decohered: bool
    threshold: float = DECOHERENCE_THRESHOLD


def _bath_gamma(bath: ModeEnsemble, t: float, thermal: ThermalParams) -> float:
    if bath.is_continuum:
        return gamma_continuum(bath.family, t, thermal)
    return gamma_discrete(bath, t, thermal)


def mixture_report(
    spec: SystemSpec,
    b: float,
    p: float,
    bath: ModeEnsemble,
    pointer: ModeEnsemble,
    thermal: ThermalParams = ZERO_TEMPERATURE,
    t: float = 0.0,
    threshold: float = DECOHERENCE_THRESHOLD,
) -> MixtureReport:
    """Summarise the reduced state at time ``t``.

    A continuum bath enters through its exact ``Gamma`` quadrature; pointer
    reports always use the discrete pointer modes so that per-mode terms are
    available.
    """
    gamma = _bath_gamma(bath, t, thermal)
    supp = offdiagonal_magnitudes(spec, b, gamma)
    weights = np.real(np.diag(spec.rho)).copy()
    off = ~np.eye(spec.dim, dtype=bool)
    worst = float(supp[off].max()) if spec.dim > 1 else 0.0
    reports = {
        lam: pointer_report(pointer, PointerCoupling(p, lam), t, thermal) for lam in spec.lambdas
    }
    return MixtureReport(
        t=float(t),
        gamma=gamma,
        weights=weights,
        offdiag_magnitudes=supp,
        coherences=np.abs(spec.rho) * supp,
        pointer=reports,
        decohered=worst < threshold,
        threshold=threshold,
    )
