import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmeasure.decoherence import ThermalParams, ZERO_TEMPERATURE, gamma_discrete
from qmeasure.errors import PreconditionError
from qmeasure.reduced_density import SystemSpec, mixture_report, offdiagonal_magnitudes
from qmeasure.spectral import Mode, ModeEnsemble, OhmicFamily

OHMIC = OhmicFamily(1.0, 1.0, 1.0)


def test_system_spec_validation():
    with pytest.raises(PreconditionError):
        SystemSpec((0.0, 0.0), np.eye(2) / 2)
    with pytest.raises(PreconditionError):
        SystemSpec((0.0, 1.0), np.eye(2))
    with pytest.raises(PreconditionError):
        SystemSpec((0.0, 1.0), [[0.5, 0.5j], [0.5j, 0.5]])
    with pytest.raises(PreconditionError):
        SystemSpec((0.0, 1.0), [[1.5, 0.0], [0.0, -0.5]])
    with pytest.raises(PreconditionError):
        SystemSpec((0.0, 1.0), np.eye(3) / 3)
    pure = SystemSpec.pure((0.0, 1.0), (1.0, 1.0j))
    assert pure.rho[0, 1] == pytest.approx(-0.5j)


def test_offdiagonal_examples():
    spec = SystemSpec.pure((0.0, 1.0), (1, 1))
    np.testing.assert_array_equal(offdiagonal_magnitudes(spec, 1.0, 0.0), np.ones((2, 2)))
    m = offdiagonal_magnitudes(spec, 1.0, 1.0)
    assert m[0, 1] == pytest.approx(math.exp(-2), rel=1e-15)
    spec3 = SystemSpec.pure((0.0, 1.0, 3.0), (1, 1, 1))
    m3 = offdiagonal_magnitudes(spec3, 1.0, 0.5)
    assert m3[0, 1] == pytest.approx(math.exp(-1), rel=1e-15)
    assert m3[0, 2] == pytest.approx(math.exp(-9), rel=1e-15)
    assert m3[1, 2] == pytest.approx(math.exp(-4), rel=1e-15)


@given(gamma=st.floats(0, 10), b=st.floats(0, 4), db=st.floats(0, 1), dg=st.floats(0, 1))
def test_offdiagonal_monotone(gamma, b, db, dg):
    spec = SystemSpec.pure((-1.0, 0.5, 2.0), (1, 1, 1))
    m = offdiagonal_magnitudes(spec, b, gamma)
    assert np.all(offdiagonal_magnitudes(spec, b, gamma + dg) <= m)
    assert np.all(offdiagonal_magnitudes(spec, b + db, gamma) <= m)
    np.testing.assert_array_equal(m, m.T)
    np.testing.assert_array_equal(np.diag(m), 1.0)


def pointer_modes():
    return ModeEnsemble.continuum(OHMIC, 40)


def test_pure_eigenstate():
    spec = SystemSpec.pure((0.0, 2.0), (0.0, 1.0))
    rep = mixture_report(spec, 1.0, 1.0, ModeEnsemble.continuum(OHMIC), pointer_modes(), t=5.0)
    np.testing.assert_allclose(rep.weights, [0.0, 1.0], atol=1e-15)
    assert rep.coherences[0, 1] == 0.0
    assert rep.pointer[2.0].delta_e > 0
    assert rep.pointer[0.0].delta_e == 0.0


def test_equal_superposition_strong_coupling():
    spec = SystemSpec.pure((0.0, 1.0), (1.0, 1.0))
    rep = mixture_report(spec, 10.0, 1.0, ModeEnsemble.continuum(OHMIC), pointer_modes(), t=5.0)
    np.testing.assert_allclose(rep.weights, [0.5, 0.5], rtol=1e-15)
    assert rep.offdiag_magnitudes[0, 1] < 1e-3
    assert rep.decohered


def test_weighted_state_suppression():
    # pick the mode so that b^2 (dl)^2 Gamma = 5 exactly: Gamma(pi) = (g/omega)^2 = 5
    bath = ModeEnsemble.explicit([Mode(1.0, math.sqrt(5.0))])
    rho = np.array([[0.3, math.sqrt(0.21)], [math.sqrt(0.21), 0.7]])
    spec = SystemSpec((0.0, 1.0), rho)
    rep = mixture_report(spec, 1.0, 1.0, bath, pointer_modes(), t=math.pi)
    np.testing.assert_allclose(rep.weights, [0.3, 0.7], rtol=1e-15)
    assert rep.offdiag_magnitudes[0, 1] == pytest.approx(math.exp(-10), rel=1e-12)
    assert math.exp(-10) == pytest.approx(4.54e-5, rel=1e-3)
    assert rep.coherences[0, 1] == pytest.approx(math.sqrt(0.21) * math.exp(-10), rel=1e-12)


def test_weights_invariant_over_run():
    rho = np.array([[0.25, 0.1 + 0.2j, 0.05], [0.1 - 0.2j, 0.5, 0.0], [0.05, 0.0, 0.25]])
    spec = SystemSpec((-1.0, 0.0, 2.0), rho)
    bath = ModeEnsemble.continuum(OHMIC, 200)
    weights = [
        mixture_report(spec, b, 1.0, bath, pointer_modes(), ThermalParams(beta), t).weights
        for t in np.linspace(0, 30, 7)
        for b in (0.0, 3.0)
        for beta in (math.inf, 0.5)
    ]
    for w in weights:
        np.testing.assert_array_equal(w, weights[0])
    assert abs(weights[0].sum() - 1) < 1e-12


def test_discrete_bath_uses_mode_sum():
    bath = ModeEnsemble.explicit([Mode(1.0, 0.3), Mode(2.0, 0.1)])
    spec = SystemSpec.pure((0.0, 1.0), (1.0, 1.0))
    rep = mixture_report(spec, 2.0, 0.0, bath, pointer_modes(), ZERO_TEMPERATURE, t=0.9)
    assert rep.gamma == gamma_discrete(bath, 0.9)
    assert not rep.decohered
