import math

import numpy as np
import pytest

from qmeasure.decoherence import ThermalParams, ZERO_TEMPERATURE, gamma_discrete, suppression_factor
from qmeasure.errors import ConvergenceError, PreconditionError
from qmeasure.oracle import (
    DenseState,
    FockSpace,
    Propagator,
    annihilation,
    build_hamiltonian,
    converge_cutoff,
    evolve,
    min_thermal_cutoff,
    partial_trace,
    pointer_observables,
    pointer_x_after_switchoff_oracle,
    product_state,
    system_coherence_ratio,
    thermal_energy,
    thermal_mode_state,
)
from qmeasure.pointer import (
    PointerCoupling,
    pointer_energy_change_discrete,
    pointer_energy_initial,
    pointer_x_after_switchoff,
    pointer_x_change_discrete,
    switchoff_amplitudes,
)
from qmeasure.spectral import Mode

BATH = [Mode(1.0, 0.3)]


def assert_physical(state: DenseState, tol=1e-10):
    assert state.hermiticity_error() < 1e-12
    assert abs(state.trace - 1) < tol
    assert state.min_eigenvalue() > -tol


def test_fock_space_budget():
    space = FockSpace(2, (3, 4))
    assert space.dims == (2, 4, 5)
    assert space.dim == 40
    with pytest.raises(PreconditionError):
        FockSpace(2, (200, 200))
    with pytest.raises(PreconditionError):
        FockSpace(2, (0,))


def test_thermal_state_examples():
    ground = thermal_mode_state(1.0, ZERO_TEMPERATURE, 5)
    assert ground.matrix[0, 0] == 1.0 and ground.trace == 1.0
    n = np.arange(61)
    st = thermal_mode_state(1.0, ThermalParams(math.log(2)), 60)
    assert float(np.real(np.diag(st.matrix)) @ n) == pytest.approx(1.0, abs=1e-9)
    assert thermal_energy(1.0, ThermalParams(1.0), 60) == pytest.approx(1 / (math.e - 1), abs=1e-9)


def test_thermal_state_tail_check():
    with pytest.raises(ConvergenceError) as info:
        thermal_mode_state(1.0, ThermalParams(0.5), 10)
    need = info.value.suggested_cutoff
    assert need == min_thermal_cutoff(1.0, ThermalParams(0.5))
    thermal_mode_state(1.0, ThermalParams(0.5), need)


def test_free_spectrum_without_coupling():
    modes = [Mode(1.0, 0.5), Mode(2.5, 0.2)]
    space = FockSpace(2, (3, 2))
    H = build_hamiltonian([0.0, 1.0], space, bath=modes[:1], b=0.0, pointer=modes[1:], p=0.0)
    expected = sorted(n1 * 1.0 + n2 * 2.5 for n1 in range(4) for n2 in range(3))
    np.testing.assert_allclose(np.linalg.eigvalsh(H.block(1)), expected, atol=1e-12)
    dense = H.dense()
    np.testing.assert_allclose(dense, dense.conj().T)


def test_zero_eigenvalue_decouples():
    space = FockSpace(1, (6,))
    H = build_hamiltonian([0.0], space, bath=BATH, b=5.0)
    np.testing.assert_allclose(H.block(0), np.diag(np.arange(7.0)))


def test_displaced_ground_energy():
    b, g, w = 1.2, 0.5, 1.0
    space = FockSpace(2, (40,))
    H = build_hamiltonian([-1.0, 1.0], space, bath=[Mode(w, g)], b=b)
    for i in range(2):
        assert np.linalg.eigvalsh(H.block(i)).min() == pytest.approx(-(b * g) ** 2 / w, abs=1e-10)


def test_evolve_identities():
    space = FockSpace(2, (14,))
    H = build_hamiltonian([0.0, 1.0], space, bath=BATH, b=1.0)
    rho0 = product_state(np.array([[0.5, 0.5], [0.5, 0.5]]), thermal_mode_state(1.0, ThermalParams(3.0), 14))
    np.testing.assert_allclose(evolve(rho0, H, 0.0).matrix, rho0.matrix, atol=1e-14)
    # diagonal number-basis state is stationary under free evolution
    free = build_hamiltonian([0.0, 1.0], space, bath=BATH, b=0.0)
    diag = product_state(np.diag([0.3, 0.7]), thermal_mode_state(1.0, ThermalParams(3.0), 14))
    np.testing.assert_allclose(evolve(diag, free, 2.3).matrix, diag.matrix, atol=1e-14)
    out = evolve(rho0, H, 1.7)
    assert_physical(out)
    # block route and dense route agree
    np.testing.assert_allclose(evolve(rho0, H.dense(), 1.7).matrix, out.matrix, atol=1e-12)


def test_stationary_state_commuting():
    space = FockSpace(1, (8,))
    H = build_hamiltonian([0.7], space, bath=BATH, b=1.0)
    e, v = np.linalg.eigh(H.block(0))
    rho = DenseState(v @ np.diag(np.linspace(1, 2, len(e)) / np.linspace(1, 2, len(e)).sum()) @ v.T, space.dims)
    np.testing.assert_allclose(evolve(rho, H, 4.0).matrix, rho.matrix, atol=1e-12)


def test_partial_trace_identities():
    a = np.array([[0.6, 0.1], [0.1, 0.4]])
    b = np.diag([0.2, 0.5, 0.3])
    st = product_state(a, b)
    np.testing.assert_allclose(partial_trace(st, [0]).matrix, a)
    np.testing.assert_allclose(partial_trace(st, [1]).matrix, b)
    bell = np.array([1, 0, 0, 1]) / math.sqrt(2)
    st = DenseState(np.outer(bell, bell), (2, 2))
    np.testing.assert_allclose(partial_trace(st, [0]).matrix, np.eye(2) / 2)
    three = product_state(a, b, np.diag([1.0, 0.0]))
    kept = partial_trace(three, [0, 2])
    assert kept.dims == (2, 2)
    assert kept.trace == pytest.approx(1.0)
    with pytest.raises(PreconditionError):
        partial_trace(st, [5])


@pytest.mark.parametrize("beta", [math.inf, 2.0])
@pytest.mark.parametrize("t", [0.7, math.pi])
def test_bath_coherence_matches_closed_form(beta, t):
    th = ThermalParams(beta)
    res = converge_cutoff(
        lambda n: system_coherence_ratio((0.0, 1.0), BATH, 2.0, th, [t], n)[0, 0, 1],
        1e-9,
        start=max(4, min_thermal_cutoff(1.0, th)),
    )
    closed = suppression_factor(2.0, 0.0, 1.0, gamma_discrete(BATH, t, th))
    assert abs(res.value - closed) < 1e-6


def test_two_mode_bath_and_three_levels():
    bath = [Mode(1.0, 0.3), Mode(1.7, 0.2)]
    th = ThermalParams(3.0)
    lam = (-1.0, 0.0, 2.0)
    ratio = system_coherence_ratio(lam, bath, 1.0, th, [1.3], 18)[0]
    gamma = gamma_discrete(bath, 1.3, th)
    for i in range(3):
        for j in range(3):
            assert ratio[i, j] == pytest.approx(suppression_factor(1.0, lam[i], lam[j], gamma), abs=1e-8)


def test_converge_cutoff_trivial_and_failure():
    res = converge_cutoff(lambda n: system_coherence_ratio((0.0, 1.0), BATH, 0.0, ZERO_TEMPERATURE, [1.0], n)[0, 0, 1], 1e-12)
    assert len(res.schedule) == 2
    assert res.value == pytest.approx(1.0)
    with pytest.raises(ConvergenceError) as info:
        converge_cutoff(lambda n: float(n), 1e-3, budget=50)
    assert info.value.best is not None
    with pytest.raises(PreconditionError):
        converge_cutoff(lambda n: 0.0, 1e-3, start=10, budget=5)


def test_displacement_cutoff_scales_with_occupancy():
    # b lam g / omega = 1; the bath amplitude peaks at 2 (occupancy 4) at t = pi
    res = converge_cutoff(
        lambda n: system_coherence_ratio((0.0, 1.0), [Mode(1.0, 0.5)], 2.0, ZERO_TEMPERATURE, [math.pi], n)[0, 0, 1],
        1e-10,
    )
    assert res.cutoff <= 10 * 4
    assert res.value == pytest.approx(math.exp(-2 * 4 * 0.25), rel=1e-8)


@pytest.mark.parametrize("beta", [math.inf, 2.0])
def test_pointer_matches_closed_forms(beta):
    th = ThermalParams(beta)
    modes = [Mode(1.0, 1.0)]
    c = PointerCoupling(1.0, 1.0)
    for t in (0.7, 2.0, math.pi):
        res = converge_cutoff(
            lambda n: np.array([pointer_observables(modes, c, th, t, n)[k] for k in ("delta_e", "x")]),
            1e-10,
            start=max(4, min_thermal_cutoff(1.0, th)),
        )
        assert res.value[0] == pytest.approx(pointer_energy_change_discrete(modes, c, t), abs=1e-6)
        assert res.value[1] == pytest.approx(pointer_x_change_discrete(modes, c, t), abs=1e-6)
        obs = pointer_observables(modes, c, th, t, res.cutoff)
        np.testing.assert_allclose(obs["alpha"], switchoff_amplitudes(modes, c, t), atol=1e-6)
        assert obs["e_initial"] == pytest.approx(pointer_energy_initial(modes, th), abs=1e-9)
        for tau in (0.0, 0.9, 4.0):
            assert pointer_x_after_switchoff_oracle(modes, c, th, t, tau, res.cutoff) == pytest.approx(
                pointer_x_after_switchoff(modes, c, t, tau), abs=1e-6
            )


def test_two_pointer_modes():
    modes = [Mode(1.0, 0.4), Mode(1.9, 0.6)]
    c = PointerCoupling(1.5, -1.0)
    th = ThermalParams(2.5)
    obs = pointer_observables(modes, c, th, 1.4, 25)
    assert obs["delta_e"] == pytest.approx(pointer_energy_change_discrete(modes, c, 1.4), abs=1e-8)
    assert obs["x"] == pytest.approx(pointer_x_change_discrete(modes, c, 1.4), abs=1e-8)


def test_propagator_unitary():
    space = FockSpace(2, (6,))
    H = build_hamiltonian([0.0, 1.0], space, bath=BATH, b=1.0)
    u = Propagator(H).unitary(0.8)
    np.testing.assert_allclose(u @ u.conj().T, np.eye(space.dim), atol=1e-12)
    assert annihilation(3).shape == (4, 4)
