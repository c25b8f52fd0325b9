import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from maxhyp.errors import NonpositiveRelaxationTime, NonpositiveVolume, NotPositiveDefinite
from maxhyp.material import ElasticParams, MaxwellParams, PressureLaw
from maxhyp.relaxation import relax_exact
from maxhyp.symmetrizer import random_state
from maxhyp.system import (
    StateElasto7,
    a_of_y,
    check_admissible,
    entropy_eta,
    flux,
    flux_elasto,
    flux_ucm,
    involutions,
    source_ucm,
    state_from_vector,
    xi,
    y_of_a,
)
from maxhyp.tensor_core import SymTensor2, Tensor2

UNIT = ElasticParams(1.0, 1.0, 2.0)
REST7 = np.array([0, 0, 1, 1, 0, 0, 1], dtype=float)
REST10 = np.r_[REST7, 1, 0, 1]


def test_state_roundtrip():
    v = np.array([0.1, -0.2, 1.1, 1.0, 0.2, 0.1, 0.9])
    s = state_from_vector(v)
    assert isinstance(s, StateElasto7)
    np.testing.assert_array_equal(s.to_vector(), v)
    w = np.r_[v, 2.0, 0.1, 1.0]
    np.testing.assert_array_equal(state_from_vector(w).to_vector(), w)
    with pytest.raises(ValueError):
        state_from_vector(np.zeros(5))


def test_admissibility():
    with pytest.raises(NonpositiveVolume):
        check_admissible(np.r_[0, 0, -1.0, 1, 0, 0, 1])
    with pytest.raises(NotPositiveDefinite):
        check_admissible(np.r_[REST7, 1.0, 2.0, 1.0])


def test_flux_elasto_examples():
    law = PressureLaw.elasto(UNIT)
    fp = flux_elasto(REST7, law)
    np.testing.assert_allclose(fp.Ga, 0, atol=1e-15)
    np.testing.assert_allclose(fp.Gb, 0, atol=1e-15)
    fp = flux_elasto(np.r_[1.0, 0, 1, 1, 0, 0, 1], law)
    np.testing.assert_allclose(fp.Ga, [0, 0, -1, -1, 0, 0, 0], atol=1e-15)
    np.testing.assert_allclose(fp.Gb, [0, 0, 0, 0, -1, 0, 0], atol=1e-15)


def test_flux_elasto_rotation_at_unit_pressure():
    th = 0.4
    c, s = math.cos(th), math.sin(th)
    fp = flux_elasto(np.r_[0, 0, 1.0, c, -s, s, c], PressureLaw.elasto(UNIT))
    np.testing.assert_allclose(fp.Ga[:2], 0, atol=1e-15)
    np.testing.assert_allclose(fp.Gb[:2], 0, atol=1e-15)


def test_flux_ucm_examples():
    law = PressureLaw.ucm(UNIT)
    fp = flux_ucm(REST10, law)
    assert math.isclose(fp.Ga[0], 1.0)
    np.testing.assert_array_equal(fp.Ga[7:], 0)
    np.testing.assert_array_equal(fp.Gb[7:], 0)


@given(st.integers(0, 10_000))
def test_flux_ucm_reduces_with_identity_a(seed):
    rng = np.random.default_rng(seed)
    v = random_state("elasto7", rng)
    law = PressureLaw.ucm(UNIT)
    a = flux_ucm(np.r_[v, 1, 0, 1], law)
    b = flux(v, law)
    np.testing.assert_allclose(a.Ga[:7], b.Ga, atol=1e-13)
    np.testing.assert_allclose(a.Gb[:7], b.Gb, atol=1e-13)


def test_involution_matrices():
    inv = involutions("elasto7")
    assert inv.Ma[0, 4] == 1 and inv.Mb[0, 3] == -1
    assert inv.Ma.shape == (2, 7)
    assert involutions("ucm10").Ma.shape == (2, 10)


def test_involution_vanishes_on_gradient_field():
    # F = grad phi for phi = (x + sin a cos b, y + cos a), so curl F = 0
    a, b = 0.3, 1.1
    dUa = np.zeros(7)
    dUb = np.zeros(7)
    # second derivatives of phi_x and phi_y
    dUa[3], dUa[4] = -math.sin(a) * math.cos(b), -math.cos(a) * math.sin(b)
    dUb[3], dUb[4] = -math.cos(a) * math.sin(b), -math.sin(a) * math.cos(b)
    dUa[5], dUb[5] = -math.cos(a), 0.0
    inv = involutions("elasto7")
    np.testing.assert_allclose(inv.Ma @ dUa + inv.Mb @ dUb, 0, atol=1e-15)


def test_xi_examples():
    v = xi(REST7, PressureLaw.elasto(UNIT))
    assert (v.x, v.y) == (0, 0)
    v = xi(np.r_[1.0, 0, 1, 1, 0, 0, 1, 1, 0, 1], PressureLaw.ucm(UNIT))
    assert (v.x, v.y) == (0, -2)
    v = xi(np.r_[0, 1.0, 1, 1, 0, 0, 1], PressureLaw.elasto(UNIT))
    assert (v.x, v.y) == (1, 0)


def test_entropy_examples():
    p = MaxwellParams(UNIT)
    assert math.isclose(entropy_eta(REST7, p), 1.0)
    assert math.isclose(entropy_eta(np.r_[1.0, REST7[1:]], p), 1.5)
    assert math.isclose(entropy_eta(REST10, p), 2.0)


def test_a_y_roundtrip():
    Y = SymTensor2(2.0, 0.3, 0.7)
    back = y_of_a(a_of_y(Y))
    np.testing.assert_allclose(back.as_matrix(), Y.as_matrix(), rtol=1e-12)


def test_source_examples():
    np.testing.assert_array_equal(source_ucm(REST10, 1.0), 0)
    v = np.r_[0.2, 0.1, 1.2, 1.1, 0.2, -0.1, 0.9, 2.0, 0.3, 0.7]
    np.testing.assert_array_equal(source_ucm(v, math.inf), 0)
    with pytest.raises(NonpositiveRelaxationTime):
        source_ucm(v, 0.0)


def test_source_matches_exact_relaxation():
    # F = I, A = 2I, lam = 1; compare with the time derivative of Y(A(t))
    Y0 = y_of_a(SymTensor2.diag(2.0, 2.0))
    v = np.r_[REST7, Y0.aa, Y0.ab, Y0.bb]
    src = source_ucm(v, 1.0)
    dt = 1e-5

    def y_at(t):
        return y_of_a(relax_exact(SymTensor2.diag(2.0, 2.0), Tensor2.identity(), t, 1.0))

    yp, ym = y_at(dt), y_at(0.0)
    fd = np.array([yp.aa - ym.aa, yp.ab - ym.ab, yp.bb - ym.bb]) / dt
    np.testing.assert_allclose(src[7:], fd, rtol=1e-4)
    np.testing.assert_array_equal(src[:7], 0)


def test_source_equilibrium_sheared():
    F = np.array([[1.0, 0.4], [0.0, 1.0]])
    B = np.linalg.inv(F) @ np.linalg.inv(F).T
    Y = y_of_a(SymTensor2.from_matrix(B))
    v = np.r_[0, 0, 1.0, F.ravel(), Y.aa, Y.ab, Y.bb]
    np.testing.assert_allclose(source_ucm(v, 0.5), 0, atol=1e-12)
