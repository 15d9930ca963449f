"""Brute-force verifier: exact evolution in a truncated Fock space.

The measured system (dimension ``d``, in the eigenbasis of the coupling
operator) is tensored with a few oscillator modes, each cut off at ``N``
quanta. Because the coupling operator commutes with the Hamiltonian, the
Hamiltonian is block diagonal with one mode-space block per eigenvalue.
Each block is diagonalised once and reused for every time.

Nothing here uses the closed forms of the other modules; tests compare the
two routes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce
from typing import Callable, Sequence

import numpy as np

from .decoherence import ThermalParams, ZERO_TEMPERATURE
from .errors import ConvergenceError, PreconditionError
from .spectral import ModeEnsemble, ModesLike, mode_arrays

__all__ = [
    "DEFAULT_BUDGET",
    "FockSpace",
    "DenseState",
    "BlockHamiltonian",
    "Propagator",
    "CutoffResult",
    "annihilation",
    "min_thermal_cutoff",
    "thermal_mode_state",
    "product_state",
    "build_hamiltonian",
    "evolve",
    "partial_trace",
    "converge_cutoff",
    "thermal_energy",
    "system_coherence_ratio",
    "pointer_observables",
    "pointer_x_after_switchoff_oracle",
]

DEFAULT_BUDGET = 20000
THERMAL_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class FockSpace:
    """System dimension plus per-mode cutoffs; mode ``m`` keeps ``0..cutoffs[m]`` quanta."""

    system_dim: int
    cutoffs: tuple[int, ...]
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        cutoffs = tuple(int(n) for n in self.cutoffs)
        object.__setattr__(self, "cutoffs", cutoffs)
        if self.system_dim < 1:
            raise PreconditionError("system dimension must be at least 1")
        if any(n < 1 for n in cutoffs):
            raise PreconditionError(f"cutoffs must be >= 1, got {cutoffs}")
        if self.dim > self.budget:
            raise PreconditionError(f"Fock space dimension {self.dim} exceeds budget {self.budget}")

    @property
    def mode_dims(self) -> tuple[int, ...]:
        return tuple(n + 1 for n in self.cutoffs)

    @property
    def mode_dim(self) -> int:
        return math.prod(self.mode_dims)

    @property
    def dims(self) -> tuple[int, ...]:
        return (self.system_dim,) + self.mode_dims

    @property
    def dim(self) -> int:
        return self.system_dim * self.mode_dim


@dataclass
class DenseState:
    """Density matrix over a tensor product with subsystem dimensions ``dims``."""

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        self.dims = tuple(int(x) for x in self.dims)
        self.matrix = np.asarray(self.matrix, dtype=complex)
        n = math.prod(self.dims)
        if self.matrix.shape != (n, n):
            raise PreconditionError(f"matrix shape {self.matrix.shape} does not match dims {self.dims}")

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def hermiticity_error(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T)))

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(h).min())

    def expect(self, op: np.ndarray) -> complex:
        return complex(np.trace(self.matrix @ op))


def annihilation(cutoff: int) -> np.ndarray:
    """Truncated annihilation operator on ``0..cutoff`` quanta."""
    return np.diag(np.sqrt(np.arange(1, cutoff + 1, dtype=float)), 1)


def _embed(op: np.ndarray, index: int, dims: Sequence[int]) -> np.ndarray:
    factors = [op if i == index else np.eye(d) for i, d in enumerate(dims)]
    return reduce(np.kron, factors)


def min_thermal_cutoff(omega: float, thermal: ThermalParams, tail_tol: float = THERMAL_TAIL_TOL) -> int:
    """Smallest cutoff whose discarded thermal population is below ``tail_tol``."""
    if thermal.is_zero_temperature:
        return 1
    x = thermal.beta * omega
    # discarded fraction of a geometric distribution is q**(N+1), q = exp(-x)
    return max(1, math.ceil(-math.log(tail_tol) / x) - 1)


def thermal_mode_state(
    omega: float,
    thermal: ThermalParams,
    cutoff: int,
    tail_tol: float = THERMAL_TAIL_TOL,
) -> DenseState:
    """Truncated Gibbs state ``exp(-beta omega n) / Z`` of one oscillator.

    Raises
    ------
    ConvergenceError
        If the population above ``cutoff`` exceeds ``tail_tol`` of the total;
        ``suggested_cutoff`` carries a sufficient value.
    """
    if thermal.is_zero_temperature:
        pops = np.zeros(cutoff + 1)
        pops[0] = 1.0
        return DenseState(np.diag(pops), (cutoff + 1,))
    x = thermal.beta * omega
    tail = math.exp(-x * (cutoff + 1))
    if tail > tail_tol:
        need = min_thermal_cutoff(omega, thermal, tail_tol)
        raise ConvergenceError(
            f"thermal tail {tail:.3g} above {tail_tol:g} at cutoff {cutoff}; use cutoff >= {need}",
            suggested_cutoff=need,
        )
    log_w = -x * np.arange(cutoff + 1, dtype=float)
    w = np.exp(log_w - log_w.max())
    return DenseState(np.diag(w / w.sum()), (cutoff + 1,))


def product_state(*states: DenseState | np.ndarray) -> DenseState:
    """Tensor product of states (bare arrays count as single subsystems)."""
    mats, dims = [], []
    for s in states:
        if isinstance(s, DenseState):
            mats.append(s.matrix)
            dims.extend(s.dims)
        else:
            s = np.asarray(s, dtype=complex)
            mats.append(s)
            dims.append(s.shape[0])
    return DenseState(reduce(np.kron, mats), tuple(dims))


@dataclass
class BlockHamiltonian:
    """``H = sum_i |i><i| (H_free + lambda_i V)`` over system x modes.

    ``free`` and ``coupling`` act on the mode space only.
    """

    lambdas: tuple[float, ...]
    free: np.ndarray
    coupling: np.ndarray
    space: FockSpace

    def block(self, i: int) -> np.ndarray:
        return self.free + self.lambdas[i] * self.coupling

    def dense(self) -> np.ndarray:
        d = len(self.lambdas)
        out = np.zeros((self.space.dim, self.space.dim), dtype=complex)
        f = self.space.mode_dim
        for i in range(d):
            out[i * f:(i + 1) * f, i * f:(i + 1) * f] = self.block(i)
        return out


def _arrays_or_empty(modes: ModesLike) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(modes, ModeEnsemble) or len(modes):
        return mode_arrays(modes)
    return np.empty(0), np.empty(0)


def build_hamiltonian(
    lambdas: Sequence[float],
    space: FockSpace,
    bath: ModesLike = (),
    b: float = 0.0,
    pointer: ModesLike = (),
    p: float = 0.0,
) -> BlockHamiltonian:
    """Assemble the model Hamiltonian on ``space``.

    Modes are ordered bath first, then pointer;
    ``len(space.cutoffs)`` must equal the total mode count.
    """
    if hasattr(lambdas, "lambdas"):
        lambdas = lambdas.lambdas
    lambdas = tuple(float(x) for x in lambdas)
    if len(lambdas) != space.system_dim:
        raise PreconditionError("number of eigenvalues must equal the system dimension")
    bath_w, bath_g = _arrays_or_empty(bath)
    ptr_w, ptr_g = _arrays_or_empty(pointer)
    omegas = np.concatenate([bath_w, ptr_w])
    scaled_g = np.concatenate([b * bath_g, p * ptr_g])
    if omegas.size != len(space.cutoffs):
        raise PreconditionError(f"{omegas.size} modes but {len(space.cutoffs)} cutoffs")
    dims = space.mode_dims
    f = space.mode_dim
    free = np.zeros((f, f))
    coupling = np.zeros((f, f))
    for m, (w, cg) in enumerate(zip(omegas, scaled_g)):
        a = annihilation(space.cutoffs[m])
        free += w * _embed(a.T @ a, m, dims)
        if cg != 0.0:
            coupling += cg * _embed(a + a.T, m, dims)
    return BlockHamiltonian(lambdas, free, coupling, space)


class Propagator:
    """Cached eigendecomposition of a Hamiltonian, evaluated at arbitrary times."""

    def __init__(self, H: BlockHamiltonian | np.ndarray):
        self.H = H
        if isinstance(H, BlockHamiltonian):
            self._eig = [np.linalg.eigh(H.block(i)) for i in range(len(H.lambdas))]
        else:
            H = np.asarray(H)
            if not np.allclose(H, H.conj().T, rtol=0, atol=1e-12):
                raise PreconditionError("Hamiltonian must be Hermitian")
            self._eig = [np.linalg.eigh(H)]

    def _unitaries(self, t: float) -> list[np.ndarray]:
        return [(v * np.exp(-1j * e * t)) @ v.conj().T for e, v in self._eig]

    def unitary(self, t: float) -> np.ndarray:
        us = self._unitaries(t)
        if len(us) == 1:
            return us[0]
        f = us[0].shape[0]
        out = np.zeros((f * len(us),) * 2, dtype=complex)
        for i, u in enumerate(us):
            out[i * f:(i + 1) * f, i * f:(i + 1) * f] = u
        return out

    def evolve(self, rho0: DenseState, t: float) -> DenseState:
        us = self._unitaries(t)
        if len(us) == 1:
            u = us[0]
            return DenseState(u @ rho0.matrix @ u.conj().T, rho0.dims)
        d, f = len(us), us[0].shape[0]
        blocks = rho0.matrix.reshape(d, f, d, f)
        out = np.empty_like(blocks)
        for i in range(d):
            for j in range(d):
                out[i, :, j, :] = us[i] @ blocks[i, :, j, :] @ us[j].conj().T
        return DenseState(out.reshape(d * f, d * f), rho0.dims)


def evolve(rho0: DenseState, H: BlockHamiltonian | np.ndarray, t: float) -> DenseState:
    """``exp(-iHt) rho0 exp(iHt)`` via Hermitian eigendecomposition."""
    return Propagator(H).evolve(rho0, t)


def partial_trace(state: DenseState, keep: Sequence[int]) -> DenseState:
    """Trace out every subsystem whose index is not in ``keep``."""
    keep = sorted(set(int(k) for k in keep))
    n = len(state.dims)
    if any(k < 0 or k >= n for k in keep):
        raise PreconditionError(f"subsystem indices {keep} out of range for {n} subsystems")
    t = state.matrix.reshape(state.dims + state.dims)
    current = n
    for axis in reversed(range(n)):
        if axis in keep:
            continue
        t = np.trace(t, axis1=axis, axis2=axis + current)
        current -= 1
    kept_dims = tuple(state.dims[k] for k in keep)
    size = math.prod(kept_dims)
    return DenseState(t.reshape(size, size), kept_dims)


@dataclass
class CutoffResult:
    cutoff: int
    value: object
    delta: float
    schedule: list[tuple[int, object]] = field(default_factory=list)


def converge_cutoff(
    observable: Callable[[int], object],
    tol: float,
    *,
    start: int = 4,
    dim_of: Callable[[int], int] = lambda n: n + 1,
    budget: int = DEFAULT_BUDGET,
    growth: float = 1.5,
) -> CutoffResult:
    """Raise a uniform per-mode cutoff until ``observable`` stops changing.

    ``observable(N)`` returns a number or array; convergence means the largest
    absolute change between consecutive levels is below ``tol``. ``dim_of(N)``
    gives the Hilbert-space dimension at cutoff ``N`` and is checked
    against ``budget``.
    """

    def next_level(n: int) -> int:
        return max(n + 2, math.ceil(n * growth))

    if dim_of(start) > budget or dim_of(next_level(start)) > budget:
        raise PreconditionError("budget does not permit two cutoff levels")
    schedule = []
    n = start
    prev = np.asarray(observable(n))
    schedule.append((n, prev))
    delta = math.inf
    while True:
        n_next = next_level(n)
        if dim_of(n_next) > budget:
            raise ConvergenceError(
                f"cutoff budget exhausted at N={n}; last change {delta:.3g}",
                best=prev,
                delta=delta,
            )
        n = n_next
        value = np.asarray(observable(n))
        schedule.append((n, value))
        delta = float(np.max(np.abs(value - prev)))
        if delta < tol:
            out = value.item() if value.ndim == 0 else value
            return CutoffResult(cutoff=n, value=out, delta=delta, schedule=schedule)
        prev = value


def thermal_energy(omega: float, thermal: ThermalParams, cutoff: int) -> float:
    """Mean energy ``Tr(theta omega a^dag a)`` of one truncated thermal mode."""
    theta = thermal_mode_state(omega, thermal, cutoff)
    a = annihilation(cutoff)
    return float(theta.expect(omega * (a.T @ a)).real)


def _mode_states(omegas, thermal: ThermalParams, cutoff: int) -> list[DenseState]:
    return [thermal_mode_state(w, thermal, cutoff) for w in omegas]


def system_coherence_ratio(
    lambdas: Sequence[float],
    bath: ModesLike,
    b: float,
    thermal: ThermalParams,
    times: Sequence[float],
    cutoff: int,
) -> np.ndarray:
    """``|r_ij(t)| / |rho_ij|`` from full evolution and a partial trace over the bath.

    The system starts in the uniform superposition, so every ``rho_ij`` is
    ``1/d``. Returns an array of shape ``(len(times), d, d)``.
    """
    lambdas = tuple(float(x) for x in lambdas)
    d = len(lambdas)
    omegas, _ = mode_arrays(bath)
    space = FockSpace(d, (cutoff,) * omegas.size)
    psi = np.full(d, 1.0 / math.sqrt(d))
    rho0 = product_state(np.outer(psi, psi), *_mode_states(omegas, thermal, cutoff))
    prop = Propagator(build_hamiltonian(lambdas, space, bath=bath, b=b))
    out = []
    for t in np.atleast_1d(times):
        r = partial_trace(prop.evolve(rho0, float(t)), keep=[0]).matrix
        out.append(np.abs(r) * d)
    return np.array(out)


def _pointer_setup(modes: ModesLike, coupling, thermal: ThermalParams, cutoff: int):
    omegas, g = mode_arrays(modes)
    space = FockSpace(1, (cutoff,) * omegas.size)
    rho0 = product_state(np.ones((1, 1)), *_mode_states(omegas, thermal, cutoff))
    dims = space.dims
    a_ops = [_embed(annihilation(cutoff), m + 1, dims) for m in range(omegas.size)]
    energy = sum(w * (a.conj().T @ a) for w, a in zip(omegas, a_ops))
    x_op = sum(gm * (a + a.conj().T) for gm, a in zip(g, a_ops))
    H = build_hamiltonian([coupling.lam], space, pointer=modes, p=coupling.p)
    return rho0, H, a_ops, energy, x_op


def pointer_observables(
    modes: ModesLike,
    coupling,
    thermal: ThermalParams,
    t: float,
    cutoff: int,
) -> dict[str, object]:
    """Pointer energy change, ``<X>`` and per-mode ``<a_m>`` after coupling time ``t``.

    ``coupling`` is a :class:`~qmeasure.pointer.PointerCoupling`.
    """
    rho0, H, a_ops, energy, x_op = _pointer_setup(modes, coupling, thermal, cutoff)
    rho_t = evolve(rho0, H, t)
    e0 = rho0.expect(energy).real
    return {
        "e_initial": e0,
        "delta_e": rho_t.expect(energy).real - e0,
        "x": rho_t.expect(x_op).real,
        "alpha": np.array([rho_t.expect(a) for a in a_ops]),
    }


def pointer_x_after_switchoff_oracle(
    modes: ModesLike,
    coupling,
    thermal: ThermalParams,
    t_meas: float,
    tau: float,
    cutoff: int,
) -> float:
    """``<X>`` after coupling for ``t_meas`` and then evolving freely for ``tau``."""
    rho0, H, _, _, x_op = _pointer_setup(modes, coupling, thermal, cutoff)
    rho_meas = evolve(rho0, H, t_meas)
    rho_late = evolve(rho_meas, H.free, tau)
    return rho_late.expect(x_op).real
