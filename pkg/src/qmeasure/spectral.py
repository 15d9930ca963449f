"""Bath and pointer spectral content.

Frequencies and couplings are in natural units (hbar = k_B = 1). Only the
product of mode density and squared coupling is ever represented; for the
power-law family it reads ``Omega * omega**n * exp(-omega / omega_d)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import DivergentSpectrumError, PreconditionError

__all__ = [
    "Mode",
    "OhmicFamily",
    "ModeEnsemble",
    "spectral_weight",
    "total_weight",
    "discretize",
    "mode_arrays",
]

DEFAULT_OMEGA_MAX_FACTOR = 40.0


@dataclass(frozen=True)
class Mode:
    """A single bosonic mode with frequency ``omega`` and real coupling ``g``."""

    omega: float
    g: float

    def __post_init__(self):
        if isinstance(self.g, complex) or isinstance(self.omega, complex):
            raise PreconditionError("mode frequency and coupling must be real")
        if not self.omega > 0:
            raise PreconditionError(f"mode frequency must be positive, got {self.omega!r}")
        object.__setattr__(self, "omega", float(self.omega))
        object.__setattr__(self, "g", float(self.g))


@dataclass(frozen=True)
class OhmicFamily:
    """Power-law spectral family ``Omega * omega**n`` with an exponential Debye cutoff.

    ``n == 1`` is the Ohmic case. Decoherence grows without bound at large
    times only for ``n < 2`` (see :attr:`decoheres_fully`).
    """

    big_omega: float = 1.0
    n: float = 1.0
    omega_d: float = 1.0

    def __post_init__(self):
        if not self.big_omega > 0:
            raise PreconditionError(f"spectral amplitude must be positive, got {self.big_omega!r}")
        if not self.omega_d > 0:
            raise PreconditionError(f"Debye frequency must be positive, got {self.omega_d!r}")
        if not self.n > 0:
            raise DivergentSpectrumError(
                f"spectral exponent n={self.n!r}: the decoherence integral diverges at low "
                "frequency unless n > 0"
            )

    @property
    def is_ohmic(self) -> bool:
        return self.n == 1

    @property
    def decoheres_fully(self) -> bool:
        return self.n < 2


def spectral_weight(family: OhmicFamily, omega):
    """Evaluate ``Omega * omega**n * exp(-omega / omega_d)``.

    Accepts a scalar or an array of frequencies; all must be nonnegative.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0) or np.any(np.isnan(w)):
        raise PreconditionError("spectral weight is defined for omega >= 0 only")
    out = family.big_omega * w**family.n * np.exp(-w / family.omega_d)
    return float(out) if out.ndim == 0 else out


def total_weight(family: OhmicFamily) -> float:
    """Closed-form integral of :func:`spectral_weight` over ``(0, inf)``."""
    return family.big_omega * math.gamma(family.n + 1) * family.omega_d ** (family.n + 1)


def discretize(family: OhmicFamily, K: int, omega_max: float | None = None) -> list[Mode]:
    """Replace a continuum by ``K`` modes placed at Gauss-Legendre nodes.

    The nodes are mapped onto ``(0, omega_max]`` and each mode receives
    ``g_k**2 = spectral_weight(omega_k) * w_k`` with ``w_k`` the quadrature
    weight, so any sum ``sum_k g_k**2 f(omega_k)`` is a quadrature of
    ``int spectral_weight(omega) f(omega) domega``.

    Parameters
    ----------
    family : OhmicFamily
    K : int
        Number of modes, at least 1.
    omega_max : float, optional
        Upper end of the frequency window. Defaults to ``40 * omega_d``.
    """
    if int(K) != K or K < 1:
        raise PreconditionError(f"mode count must be a positive integer, got {K!r}")
    if omega_max is None:
        omega_max = DEFAULT_OMEGA_MAX_FACTOR * family.omega_d
    if not omega_max > 0:
        raise PreconditionError(f"omega_max must be positive, got {omega_max!r}")
    x, w = np.polynomial.legendre.leggauss(int(K))
    half = 0.5 * omega_max
    omegas = half * (x + 1.0)
    weights = half * w
    g2 = spectral_weight(family, omegas) * weights
    return [Mode(float(o), float(math.sqrt(c))) for o, c in zip(omegas, g2)]


@dataclass(frozen=True)
class ModeEnsemble:
    """Either an explicit list of modes or a power-law continuum plus a mode count.

    Use :meth:`explicit` or :meth:`continuum` to build one. The discrete view
    (:attr:`modes`) of a continuum is its :func:`discretize` output.
    """

    explicit_modes: tuple[Mode, ...] | None = None
    family: OhmicFamily | None = None
    count: int = 400
    omega_max: float | None = field(default=None)

    def __post_init__(self):
        if (self.explicit_modes is None) == (self.family is None):
            raise PreconditionError("a mode ensemble needs exactly one of explicit modes or a family")
        if self.explicit_modes is not None and len(self.explicit_modes) == 0:
            raise PreconditionError("explicit mode list must be nonempty")
        if self.family is not None and (int(self.count) != self.count or self.count < 1):
            raise PreconditionError(f"mode count must be >= 1, got {self.count!r}")

    @classmethod
    def explicit(cls, modes: Sequence[Mode]) -> "ModeEnsemble":
        return cls(explicit_modes=tuple(modes))

    @classmethod
    def continuum(cls, family: OhmicFamily, count: int = 400, omega_max: float | None = None) -> "ModeEnsemble":
        return cls(family=family, count=count, omega_max=omega_max)

    @property
    def is_continuum(self) -> bool:
        return self.family is not None

    @cached_property
    def modes(self) -> tuple[Mode, ...]:
        if self.explicit_modes is not None:
            return self.explicit_modes
        return tuple(discretize(self.family, self.count, self.omega_max))

    @cached_property
    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        omega = np.array([m.omega for m in self.modes])
        g = np.array([m.g for m in self.modes])
        omega.flags.writeable = False
        g.flags.writeable = False
        return omega, g


ModesLike = Union[Sequence[Mode], ModeEnsemble]


def mode_arrays(modes: ModesLike) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(omega, g)`` arrays for a mode list or ensemble."""
    if isinstance(modes, ModeEnsemble):
        return modes.arrays
    if isinstance(modes, Mode):
        modes = [modes]
    if len(modes) == 0:
        raise PreconditionError("mode list must be nonempty")
    omega = np.fromiter((m.omega for m in modes), dtype=float, count=len(modes))
    g = np.fromiter((m.g for m in modes), dtype=float, count=len(modes))
    return omega, g
