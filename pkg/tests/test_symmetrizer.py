import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from maxhyp.errors import NotPositiveDefinite
from maxhyp.material import ElasticParams, MaxwellParams
from maxhyp.symmetrizer import (
    analytic_jacobian_elasto,
    assemble_symmetric,
    directions,
    elasto_speed_closed_form,
    generalized_speeds,
    hessian_eta,
    jacobian_flux,
    max_speed_closed_form,
    random_state,
    wave_speeds,
)

UNIT = MaxwellParams(ElasticParams(1.0, 1.0, 2.0))
REST7 = np.array([0, 0, 1, 1, 0, 0, 1], dtype=float)
REST10 = np.r_[REST7, 1, 0, 1]
seeds = st.integers(0, 2**31 - 1)


def test_hessian_at_rest():
    H = hessian_eta(REST7, UNIT)
    np.testing.assert_allclose(H[:2, :2], np.eye(2), atol=1e-7)
    np.testing.assert_allclose(H[3:, 3:], np.eye(4), atol=1e-7)
    assert math.isclose(H[2, 2], 2.0, rel_tol=1e-7)


@given(seeds, st.sampled_from(["elasto7", "ucm10"]))
def test_hessian_positive(seed, system):
    U = random_state(system, np.random.default_rng(seed))
    H = hessian_eta(U, UNIT)
    np.testing.assert_allclose(H, H.T)
    assert np.linalg.eigvalsh(H).min() > 0


def test_jacobian_rest_row():
    D = jacobian_flux(REST7, (1.0, 0.0), UNIT)
    # p' = -2 at J = 1; momentum x couples to J with e_x C nu = 1, to Fxa with -1
    np.testing.assert_allclose(D[0], [0, 0, -2, -1, 0, 0, 1], atol=1e-8)
    D10 = jacobian_flux(REST10, (0.6, 0.8), UNIT)
    np.testing.assert_array_equal(D10[7:], 0)


@given(seeds, st.sampled_from(directions(8)))
def test_fd_jacobian_matches_analytic(seed, nu):
    U = random_state("elasto7", np.random.default_rng(seed))
    D = jacobian_flux(U, nu, UNIT)
    ref = analytic_jacobian_elasto(U, nu, UNIT)
    assert np.abs(D - ref).max() <= 1e-6 * max(1.0, np.abs(ref).max())


def test_assembled_entries_at_rest():
    K = assemble_symmetric(REST7, (1.0, 0.0), UNIT).assembled
    assert math.isclose(K[0, 2], -2.0, rel_tol=1e-7)
    assert math.isclose(K[0, 3], -1.0, rel_tol=1e-7)
    assert abs(K[0, 4]) < 1e-9


@given(seeds, st.sampled_from(["elasto7", "ucm10"]), st.sampled_from(directions(8)))
def test_assembled_is_symmetric(seed, system, nu):
    U = random_state(system, np.random.default_rng(seed))
    assert assemble_symmetric(U, nu, UNIT).symmetry_defect <= 1e-7


def test_ablation_breaks_symmetry():
    U = np.array([0.7, -0.4, 1.1, 1.05, 0.1, -0.05, 0.98])
    rep = assemble_symmetric(U, (1.0, 0.0), UNIT, with_xi=False)
    assert rep.symmetry_defect > 1e-3


def test_canonical_spectra():
    s = wave_speeds(REST7, (1.0, 0.0), UNIT)
    np.testing.assert_allclose(s, [-math.sqrt(3), -1, 0, 0, 0, 1, math.sqrt(3)], atol=1e-8)
    soft = MaxwellParams(ElasticParams(1.0, 0.0, 2.0))
    s = np.array(wave_speeds(REST7, (1.0, 0.0), soft))
    assert np.all(np.min(np.abs(s[:, None] - np.array([-1, 0, 1])), axis=1) < 1e-8)
    s = np.array(wave_speeds(REST10, (1.0, 0.0), UNIT))
    np.testing.assert_allclose(s, -s[::-1], atol=1e-8)
    assert np.sum(np.abs(s) < 1e-8) == 6


def test_elasto_closed_form_examples():
    assert math.isclose(elasto_speed_closed_form(REST7, (1.0, 0.0), UNIT), math.sqrt(3))
    soft = MaxwellParams(ElasticParams(1.0, 0.0, 2.0))
    assert elasto_speed_closed_form(REST7, (1.0, 0.0), soft) == 1.0
    U = np.array([0, 0, 2.0, 2, 0, 0, 1])
    assert math.isclose(elasto_speed_closed_form(U, (1.0, 0.0), UNIT), math.sqrt(1.25))
    assert math.isclose(max(wave_speeds(U, (1.0, 0.0), UNIT)), math.sqrt(1.25), rel_tol=1e-8)


@given(seeds, st.sampled_from(["elasto7", "ucm10"]))
def test_max_speed_matches_numeric(seed, system):
    U = random_state(system, np.random.default_rng(seed))
    nu = (0.6, -0.8)
    assert math.isclose(max(wave_speeds(U, nu, UNIT)), max_speed_closed_form(U, nu, UNIT),
                        rel_tol=1e-6)


def test_generalized_speeds_rejects_indefinite():
    with pytest.raises(NotPositiveDefinite):
        generalized_speeds(np.eye(2), np.diag([1.0, -1.0]))


def test_non_unit_direction_rejected():
    with pytest.raises(ValueError):
        assemble_symmetric(REST7, (1.0, 1.0), UNIT)
