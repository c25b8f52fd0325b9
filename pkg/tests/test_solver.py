import math

import numpy as np
import pytest

from maxhyp.errors import AdmissibilityLoss, ValidationError
from maxhyp.material import ElasticParams, MaxwellParams
from maxhyp.scenarios import gauss_grid, riemann_grid
from maxhyp.solver import (
    DiagnosticsSeries,
    Grid1D,
    Grid2D,
    RunConfig,
    ShearParams,
    analytic_shear_mode,
    analytic_shear_tau,
    cfl_dt,
    detf_consistency,
    elastic_reference,
    heat_reference,
    integrate,
    integrate_shear,
    involution_residual,
    l2_norm,
    max_speed,
    rusanov_flux,
    shear_energy,
    shear_mode_grid,
    step,
    total_energy,
)

UNIT = ElasticParams(1.0, 1.0, 2.0)


def test_grid_validation():
    with pytest.raises(ValidationError):
        Grid1D(3, 1.0, np.zeros((2, 3)))
    with pytest.raises(ValidationError):
        Grid1D(8, 1.0, np.zeros((2, 7)))
    with pytest.raises(ValidationError):
        Grid1D(8, 1.0, np.zeros((2, 8)), boundary="reflect")
    with pytest.raises(ValidationError):
        Grid2D(8, 8, 1.0, 1.0, np.zeros((10, 8, 7)))
    g = Grid1D(4, 2.0, np.zeros((2, 4)), origin=-1.0)
    np.testing.assert_allclose(g.centers, [-0.75, -0.25, 0.25, 0.75])


def test_run_config_validation():
    with pytest.raises(ValidationError, match=r"cfl must lie in \(0,1\]"):
        RunConfig("ucm10", "gauss2d_ucm", cfl=1.5)
    with pytest.raises(ValidationError):
        RunConfig("ucm10", "gauss2d_ucm", scheme="upwind")
    with pytest.raises(ValidationError):
        RunConfig("stokes", "gauss2d_ucm")


def test_series_requires_increasing_time():
    s = DiagnosticsSeries()
    s.append(time=0.0)
    with pytest.raises(ValueError):
        s.append(time=0.0)


def test_rusanov_consistency():
    v = np.array([0.2, -0.1, 1.1, 1.05, 0.1, 0.02, 1.0])
    p = MaxwellParams(UNIT)
    from maxhyp.system import PressureLaw, flux

    fp = flux(v, PressureLaw.elasto(UNIT))
    np.testing.assert_allclose(rusanov_flux(v, v, (0.6, 0.8), p), fp.along((0.6, 0.8)),
                               atol=1e-15)


def test_rest_state_is_steady():
    U = np.zeros((10, 8, 8))
    U[[2, 3, 6, 7, 9]] = 1.0
    g = Grid2D(8, 8, 1.0, 1.0, U)
    cfg = RunConfig("ucm10", "gauss2d_ucm", MaxwellParams(UNIT, 1.0), scheme="rusanov")
    out = step(g, 0.01, cfg)
    np.testing.assert_allclose(out.U, U, atol=1e-15)


def test_cfl_dt_uses_max_speed():
    g = gauss_grid(16, 16, 1.0, 0.1, 0.1, 0.01, "gauss")
    p = MaxwellParams(UNIT, 1.0)
    assert math.isclose(cfl_dt(g, 0.5, p), 0.5 * g.ha / max_speed(g, p))
    assert max_speed(g, p) > 1.9  # near sqrt(4) for the ucm rest state


def test_admissibility_loss_reports_cell():
    g = riemann_grid(16, 1.0, -0.1, 0.1)
    U = g.U.copy()
    U[2, 5] = -1.0
    cfg = RunConfig("elasto7", "riemann1d_elasto", MaxwellParams(UNIT), scheme="rusanov")
    with pytest.raises(AdmissibilityLoss) as exc:
        step(g.copy(U), 1e-3, cfg)
    assert exc.value.cell[0] == 5


@pytest.mark.parametrize("scheme", ["central", "rusanov"])
def test_conservation_periodic(scheme):
    g0 = gauss_grid(16, 16, 1.0, 0.1, 0.15, 0.01, "gauss")
    cfg = RunConfig("ucm10", "gauss2d_ucm", MaxwellParams(UNIT, 1.0), cfl=0.4, t_end=0.05,
                    scheme=scheme)
    g, series, _ = integrate(g0, cfg)
    np.testing.assert_allclose(g.U[:7].sum(axis=(1, 2)), g0.U[:7].sum(axis=(1, 2)),
                               atol=1e-11)
    assert series.column("time")[-1] == 0.05
    assert np.all(series.column("min_dissipation") >= -1e-12)
    assert np.all(np.diff(series.column("energy")) <= 1e-12 * abs(series.column("energy")[0]))


def test_central_preserves_discrete_curl():
    g0 = gauss_grid(16, 16, 1.0, 0.1, 0.15, 0.02, "gauss")
    cfg = RunConfig("ucm10", "gauss2d_ucm", MaxwellParams(UNIT, 1.0), cfl=0.3, t_end=0.05)
    assert involution_residual(g0) < 1e-12
    g, series, _ = integrate(g0, cfg)
    assert series.column("involution").max() < 1e-12
    assert detf_consistency(g0) == 0.0


def test_energy_budget_closes_with_relaxation():
    g0 = gauss_grid(16, 16, 1.0, 0.1, 0.15, 0.02, "gauss")
    cfg = RunConfig("ucm10", "gauss2d_ucm", MaxwellParams(UNIT, 0.05), cfl=0.1, t_end=0.02)
    _, series, _ = integrate(g0, cfg)
    assert np.all(series.column("dissipation")[1:] >= 0)
    E0 = series.column("energy")[0]
    assert np.abs(series.column("budget")).max() < 1e-6 * E0


def test_snapshots_and_callback():
    g0 = riemann_grid(32, 1.0, -0.1, 0.1)
    cfg = RunConfig("elasto7", "riemann1d_elasto", MaxwellParams(UNIT), cfl=0.9, t_end=0.05,
                    scheme="rusanov")
    seen = []
    g, series, snaps = integrate(g0, cfg, snapshot_every=2, on_step=lambda t, dt, gr: seen.append(t))
    assert snaps[0][0] == 0.0 and snaps[-1][0] == 0.05
    assert seen[-1] == 0.05 and len(seen) == len(series) - 1
    assert total_energy(g, cfg.params) <= total_energy(g0, cfg.params)


def test_shear_params():
    sp = ShearParams.from_viscosity(0.5, 2.0)
    assert sp.G == 4.0 and sp.mu_dot == 2.0
    assert ShearParams(math.inf, 1.0).G == 1.0
    with pytest.raises(ValidationError):
        ShearParams(1.0, math.inf)


def test_analytic_mode_solves_telegraph_equation():
    k, lam, mu = 2 * math.pi, 0.7, 1.0
    for lam in (0.7, 0.01, 1.0 / (4 * math.pi**2 * 4) * 1.0):
        h = 1e-4
        y = np.array([0.13])
        f = lambda t: analytic_shear_mode(t, y, k, lam, mu)[0]
        t = 0.3
        utt = (f(t + h) - 2 * f(t) + f(t - h)) / h**2
        ut = (f(t + h) - f(t - h)) / (2 * h)
        assert abs(lam * utt + ut + mu * k * k * f(t)) < 1e-4 * (1 + abs(mu * k * k * f(t)))
        # u_t = tau_y
        tau = lambda yy: analytic_shear_tau(t, np.array([yy]), k, lam, mu)[0]
        tau_y = (tau(0.13 + h) - tau(0.13 - h)) / (2 * h)
        assert abs(ut - tau_y) < 1e-5 * (1 + abs(ut))


def test_analytic_mode_rejects_frozen():
    with pytest.raises(ValueError):
        analytic_shear_mode(0.1, np.zeros(2), 1.0, math.inf, 1.0)


def test_shear_matches_analytic_mode():
    g, _, _ = integrate_shear(shear_mode_grid(128), ShearParams(1.0, 1.0), 0.5)
    ref = analytic_shear_mode(0.5, g.centers, 2 * math.pi, 1.0, 1.0)
    assert l2_norm(g.U[0] - ref, g.h) < 2e-3


def test_shear_energy_decreases_and_frozen_conserves():
    _, series, _ = integrate_shear(shear_mode_grid(64), ShearParams(0.2, 1.0), 0.5)
    assert np.all(np.diff(series.column("energy")) <= 1e-15)
    # SSP-RK2 gains about (cfl h k)^4 / 4 per step on an undamped mode
    g0 = shear_mode_grid(256)
    g, series, _ = integrate_shear(g0, ShearParams(math.inf, 1.0), 0.5, cfl=0.1)
    E = series.column("energy")
    assert np.abs(np.diff(E)).max() <= 1e-10 * E[0]
    ref = elastic_reference(0.5, g.centers, 2 * math.pi, 1.0)
    assert l2_norm(g.U[0] - ref, g.h) < 1e-3


def test_heat_reference():
    y = np.linspace(0, 1, 5)
    np.testing.assert_allclose(heat_reference(0.0, y, 2.0, 1.0), np.sin(2.0 * y))


def test_dirichlet_wall_drives_flow():
    g = Grid1D(64, 4.0, np.zeros((2, 64)), boundary="dirichlet_velocity", wall_u=1.0)
    out, _, _ = integrate_shear(g, ShearParams(0.1, 10.0), 0.2)
    assert out.U[0, 0] > 0.3 and abs(out.U[0, -1]) < 1e-6
    assert shear_energy(out, ShearParams(0.1, 10.0)) > 0
