"""Finite-volume integration of the Lagrangian systems and the 1D shear-wave model.

Grids store states component-first: ``Grid1D.U`` is ``(nvar, n)`` and
``Grid2D.U`` is ``(nvar, nx, ny)``.  Material grids are periodic.  The
hyperbolic substep uses collocated central differences or the Rusanov flux
with SSP-RK2 (or forward Euler); relaxation of A is integrated exactly and
combined by Lie or Strang splitting.

All reductions are plain numpy sums over whole arrays, so diagnostics do not
depend on the number of kernel threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import AdmissibilityLoss, ValidationError
from .material import MaxwellParams
from .symmetrizer import max_speed_closed_form
from .system import _law_args, as_vector, check_admissible, law_for, system_of, SYSTEMS

_K = kernels._numpy

SCHEMES = ("rusanov", "central")
SPLITTINGS = ("strang", "lie")
INTEGRATORS = ("ssprk2", "euler")
BOUNDARIES = ("periodic", "dirichlet_velocity")


@dataclass
class Grid1D:
    """``n`` cells of width ``length / n`` starting at ``origin``."""

    n: int
    length: float
    U: np.ndarray
    boundary: str = "periodic"
    origin: float = 0.0
    wall_u: float = 0.0

    def __post_init__(self):
        if self.n < 4:
            raise ValidationError("a grid needs at least 4 cells", "n")
        if not self.length > 0:
            raise ValidationError("length must be > 0", "length")
        if self.boundary not in BOUNDARIES:
            raise ValidationError(f"unknown boundary {self.boundary!r}", "boundary")
        self.U = np.asarray(self.U, dtype=float)
        if self.U.shape[-1] != self.n:
            raise ValidationError("state array does not match the cell count", "U")

    @property
    def h(self) -> float:
        return self.length / self.n

    @property
    def centers(self) -> np.ndarray:
        return self.origin + (np.arange(self.n) + 0.5) * self.h

    def copy(self, U=None) -> "Grid1D":
        return Grid1D(self.n, self.length, self.U.copy() if U is None else U, self.boundary,
                      self.origin, self.wall_u)


@dataclass
class Grid2D:
    nx: int
    ny: int
    la: float
    lb: float
    U: np.ndarray
    boundary: str = "periodic"
    origin: tuple = (0.0, 0.0)

    def __post_init__(self):
        if self.nx < 4 or self.ny < 4:
            raise ValidationError("a grid needs at least 4 cells per axis", "n")
        if self.boundary != "periodic":
            raise ValidationError("2D grids are periodic", "boundary")
        self.U = np.asarray(self.U, dtype=float)
        if self.U.shape[1:] != (self.nx, self.ny):
            raise ValidationError("state array does not match the grid shape", "U")

    @property
    def ha(self) -> float:
        return self.la / self.nx

    @property
    def hb(self) -> float:
        return self.lb / self.ny

    @property
    def centers(self):
        a = self.origin[0] + (np.arange(self.nx) + 0.5) * self.ha
        b = self.origin[1] + (np.arange(self.ny) + 0.5) * self.hb
        return np.meshgrid(a, b, indexing="ij")

    def copy(self, U=None) -> "Grid2D":
        return Grid2D(self.nx, self.ny, self.la, self.lb, self.U.copy() if U is None else U,
                      self.boundary, self.origin)


@dataclass
class RunConfig:
    system: str
    scenario: str
    params: MaxwellParams = field(default_factory=MaxwellParams)
    cfl: float = 0.5
    t_end: float = 1.0
    splitting: str = "strang"
    scheme: str = "central"
    integrator: str = "ssprk2"
    output_every: int = 0
    seed: int = 0

    def __post_init__(self):
        if self.system not in SYSTEMS and self.system != "shear1d":
            raise ValidationError(f"unknown system {self.system!r}", "system")
        if not 0.0 < self.cfl <= 1.0:
            raise ValidationError("cfl must lie in (0,1]", "cfl")
        if not self.t_end > 0:
            raise ValidationError("t_end must be > 0", "t_end")
        if self.splitting not in SPLITTINGS:
            raise ValidationError(f"splitting must be one of {SPLITTINGS}", "splitting")
        if self.scheme not in SCHEMES:
            raise ValidationError(f"scheme must be one of {SCHEMES}", "scheme")
        if self.integrator not in INTEGRATORS:
            raise ValidationError(f"integrator must be one of {INTEGRATORS}", "integrator")
        if self.output_every < 0:
            raise ValidationError("output_every must be >= 0", "output_every")


RECORD_FIELDS = ("time", "entropy", "energy", "dissipation", "budget", "involution", "detf",
                 "max_speed", "min_dissipation")


@dataclass
class DiagnosticsSeries:
    """One record per step; ``dissipation`` is the step's integral of the dissipation."""

    records: list = field(default_factory=list)

    def append(self, **rec) -> None:
        if self.records and not rec["time"] > self.records[-1]["time"]:
            raise ValueError("diagnostic timestamps must be strictly increasing")
        self.records.append({k: float(rec.get(k, 0.0)) for k in RECORD_FIELDS})

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.records])

    def __len__(self) -> int:
        return len(self.records)


# ---------------------------------------------------------------- systems


def _law(system, params):
    return _law_args(law_for(system, params))


def _cube(grid):
    """State as ``(nvar, nx, ny)`` plus spacings."""
    if isinstance(grid, Grid2D):
        return grid.U, grid.ha, grid.hb
    return grid.U[:, :, None], grid.h, 1.0


def _uncube(grid, U3):
    return U3 if isinstance(grid, Grid2D) else U3[:, :, 0]


def rusanov_flux(UL, UR, nu, params) -> np.ndarray:
    """Local Lax-Friedrichs flux along the unit direction ``nu``."""
    vl, vr = as_vector(UL).astype(float), as_vector(UR).astype(float)
    check_admissible(vl)
    check_admissible(vr)
    args = _law(system_of(vl), params)
    gl = np.stack(_K.fluxes(vl, *args))
    gr = np.stack(_K.fluxes(vr, *args))
    s = max(max_speed_closed_form(vl, nu, params), max_speed_closed_form(vr, nu, params))
    central = 0.5 * (nu[0] * (gl[0] + gr[0]) + nu[1] * (gl[1] + gr[1]))
    return central - 0.5 * s * (vr - vl)


def max_speed(grid, params) -> float:
    U3, _, _ = _cube(grid)
    sa, sb = kernels.speeds(U3, *_law(system_of(U3), params))
    if isinstance(grid, Grid1D):
        return float(sa.max())
    return float(max(sa.max(), sb.max()))


def cfl_dt(grid, cfl, params) -> float:
    """``cfl * min(h) / max |sigma|`` over cells and axis directions."""
    if isinstance(grid, Grid2D):
        h = min(grid.ha, grid.hb)
    else:
        h = grid.h
    return cfl * h / max_speed(grid, params)


def _check(U3, time=None):
    bad = ~np.all(np.isfinite(U3), axis=0)
    bad |= ~(U3[2] > 0)
    if U3.shape[0] == 10:
        bad |= ~(U3[7] > 0) | ~(U3[7] * U3[9] - U3[8] ** 2 > 0)
    if bad.any():
        cell = tuple(int(i) for i in np.argwhere(bad)[0])
        raise AdmissibilityLoss(f"state left the admissible set at cell {cell}", cell, time)


def _hyperbolic(U3, dt, ha, hb, args, config):
    diss = config.scheme == "rusanov"

    def rhs(W):
        return kernels.flux_divergence(W, *args, ha, hb, diss)

    U1 = U3 + dt * rhs(U3)
    if config.integrator == "euler":
        return U1
    _check(U1)
    return 0.5 * (U3 + U1 + dt * rhs(U1))


def _relax_dissipation(U3, dt, lam):
    """Simpson rule for the integral of ``(I - c^-1):(c - I)`` over an exact relaxation."""
    fxa, fxb, fya, fyb = U3[3], U3[4], U3[5], U3[6]
    maa = fxa * fxa + fya * fya
    mab = fxa * fxb + fya * fyb
    mbb = fxb * fxb + fyb * fyb
    det = maa * mbb - mab * mab
    b = (mbb / det, -mab / det, maa / det)
    a0 = _K.a_from_y(U3[7], U3[8], U3[9])
    vals = []
    for s in (0.0, 0.5 * dt, dt):
        w = math.exp(-s / lam)
        aaa, aab, abb = (bi + (ai - bi) * w for ai, bi in zip(a0, b))
        cxx = aaa * fxa * fxa + 2 * aab * fxa * fxb + abb * fxb * fxb
        cxy = aaa * fxa * fya + aab * (fxa * fyb + fxb * fya) + abb * fxb * fyb
        cyy = aaa * fya * fya + 2 * aab * fya * fyb + abb * fyb * fyb
        vals.append(_K.dissipation(cxx, cxy, cyy))
    return dt / 6.0 * (vals[0] + 4.0 * vals[1] + vals[2]), np.minimum.reduce(vals)


class _StepInfo:
    __slots__ = ("dissipation", "min_dissipation")

    def __init__(self):
        self.dissipation = None
        self.min_dissipation = math.inf


def _relax_part(U3, dt, lam, info):
    if U3.shape[0] != 10 or math.isinf(lam) or dt == 0.0:
        return U3
    if info is not None:
        d_int, d_min = _relax_dissipation(U3, dt, lam)
        info.dissipation = d_int if info.dissipation is None else info.dissipation + d_int
        info.min_dissipation = min(info.min_dissipation, float(d_min.min()))
    return kernels.relax(U3, dt, lam)


def step(grid, dt, config: RunConfig, info=None):
    """One split step; returns a new grid or raises AdmissibilityLoss."""
    U3, ha, hb = _cube(grid)
    system = system_of(U3)
    args = _law(system, config.params)
    lam = config.params.lam
    if config.splitting == "strang":
        W = _relax_part(U3, 0.5 * dt, lam, info)
        _check(W)
        W = _hyperbolic(W, dt, ha, hb, args, config)
        _check(W)
        W = _relax_part(W, 0.5 * dt, lam, info)
    else:
        W = _hyperbolic(U3, dt, ha, hb, args, config)
        _check(W)
        W = _relax_part(W, dt, lam, info)
    _check(W)
    return grid.copy(_uncube(grid, np.ascontiguousarray(W)))


def cell_volume(grid) -> float:
    return grid.ha * grid.hb if isinstance(grid, Grid2D) else grid.h


def total_entropy(grid, params) -> float:
    U3, _, _ = _cube(grid)
    return float(np.sum(_K.entropy(U3, *_law(system_of(U3), params)))) * cell_volume(grid)


def total_energy(grid, params) -> float:
    U3, _, _ = _cube(grid)
    return float(np.sum(_K.energy(U3, *_law(system_of(U3), params)))) * cell_volume(grid)


def _d(f, axis, h):
    if f.shape[axis] == 1:
        return np.zeros_like(f)
    return (np.roll(f, -1, axis=axis) - np.roll(f, 1, axis=axis)) / (2.0 * h)


def involution_residual(grid) -> float:
    """Max over cells of the central-difference ``|curl F|`` (both rows), periodic wrap."""
    U3, ha, hb = _cube(grid)
    rx = _d(U3[4], 0, ha) - _d(U3[3], 1, hb)
    ry = _d(U3[6], 0, ha) - _d(U3[5], 1, hb)
    return float(np.max(np.abs(rx) + np.abs(ry)))


def detf_consistency(grid) -> float:
    """Max over cells of ``|detF - det2(F)|``."""
    U3, _, _ = _cube(grid)
    return float(np.max(np.abs(U3[2] - (U3[3] * U3[6] - U3[4] * U3[5]))))


def energy_budget(e_before, e_after, dissipation_integral, lam) -> float:
    """``dE + int D/(2 lam) dt`` over one step; zero for an exact dissipative balance."""
    rate = 0.0 if math.isinf(lam) or dissipation_integral is None else dissipation_integral / (2 * lam)
    return (e_after - e_before) + rate


def _record(series, grid, t, params, full=True, energy=None, **extra):
    rec = dict(time=t, involution=involution_residual(grid), detf=detf_consistency(grid))
    if full:
        rec.update(entropy=total_entropy(grid, params),
                   energy=total_energy(grid, params) if energy is None else energy,
                   max_speed=max_speed(grid, params))
    else:
        rec.update(entropy=math.nan, energy=math.nan, max_speed=math.nan)
    rec.update(extra)
    series.append(**rec)


def _uniform_steps(t_left, dt_max):
    n = max(1, math.ceil(t_left / dt_max * (1.0 - 1e-12)))
    return n, t_left / n


def integrate(grid, config: RunConfig, snapshot_every: int = 0, on_step=None, full=True):
    """Advance to ``config.t_end`` with a uniform step fixed by the initial CFL bound.

    If the CFL bound later drops below the step, the remaining interval is
    re-divided.  ``full=False`` records only the involution and detF residuals,
    which is what refinement studies need.  Returns ``(grid, DiagnosticsSeries,
    snapshots)`` where ``snapshots`` is a list of ``(time, grid)``.
    """
    params = config.params
    series = DiagnosticsSeries()
    _record(series, grid, 0.0, params, full)
    snaps = [(0.0, grid)] if snapshot_every else []
    t = 0.0
    nsteps, dt = _uniform_steps(config.t_end, cfl_dt(grid, config.cfl, params))
    done = 0
    while done < nsteps:
        limit = cfl_dt(grid, config.cfl, params)
        if dt > limit * (1.0 + 1e-9):
            left, dt = _uniform_steps(config.t_end - t, limit)
            nsteps = done + left
        info = _StepInfo() if full else None
        try:
            grid = step(grid, dt, config, info)
        except AdmissibilityLoss as exc:
            exc.time = t
            raise
        done += 1
        t = config.t_end if done == nsteps else t + dt
        if full:
            e0 = series.records[-1]["energy"]
            e1 = total_energy(grid, params)
            d_int = None
            if info.dissipation is not None:
                d_int = float(np.sum(info.dissipation)) * cell_volume(grid)
            mind = 0.0 if info.dissipation is None else info.min_dissipation
            _record(series, grid, t, params, True, e1, dissipation=d_int or 0.0,
                    budget=energy_budget(e0, e1, d_int, params.lam), min_dissipation=mind)
        else:
            _record(series, grid, t, params, False)
        if on_step is not None:
            on_step(t, dt, grid)
        if snapshot_every and (done % snapshot_every == 0 or done == nsteps):
            snaps.append((t, grid))
    return grid, series, snaps


def curl_free_F(grid_shape, ha, hb, phi_x, phi_y):
    """``I + D phi`` with periodic central differences, so the discrete curl vanishes."""
    shape = (grid_shape[0], grid_shape[1])
    Fxa = 1.0 + _d(phi_x, 0, ha)
    Fxb = _d(phi_x, 1, hb)
    Fya = _d(phi_y, 0, ha)
    Fyb = 1.0 + _d(phi_y, 1, hb)
    return [np.broadcast_to(f, shape).astype(float) for f in (Fxa, Fxb, Fya, Fyb)]


# ---------------------------------------------------------------- 1D shear waves


@dataclass(frozen=True)
class ShearParams:
    """Relaxation time ``lam`` and shear modulus ``G``; the viscosity is ``lam * G``.

    Keeping G as the stored constant lets ``lam = inf`` describe an elastic solid.
    """

    lam: float = 1.0
    G: float = 1.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValidationError("lambda must be > 0", "lambda")
        if not (self.G > 0 and math.isfinite(self.G)):
            raise ValidationError("G must be finite and > 0", "G")

    @classmethod
    def from_viscosity(cls, lam: float, mu_dot: float) -> "ShearParams":
        if not mu_dot > 0:
            raise ValidationError("mu_dot must be > 0", "mu_dot")
        return cls(lam, mu_dot / lam)

    @property
    def mu_dot(self) -> float:
        return self.lam * self.G


def shear_cfl_dt(grid: Grid1D, cfl: float, params: ShearParams) -> float:
    return cfl * grid.h / math.sqrt(params.G)


def _padded(grid: Grid1D):
    u, tau = grid.U
    if grid.boundary == "periodic":
        return np.pad(u, 1, mode="wrap"), np.pad(tau, 1, mode="wrap")
    up = np.concatenate([[2.0 * grid.wall_u - u[0]], u, [-u[-1]]])
    tp = np.concatenate([[tau[0]], tau, [tau[-1]]])
    return up, tp


def _shear_rhs(grid: Grid1D, G: float, scheme: str) -> np.ndarray:
    up, tp = _padded(grid)
    # flux (-tau, -G u) at faces i+1/2 for i = -1 .. n-1
    fu = -0.5 * (tp[:-1] + tp[1:])
    ft = -0.5 * G * (up[:-1] + up[1:])
    if scheme == "rusanov":
        c = math.sqrt(G)
        fu = fu - 0.5 * c * (up[1:] - up[:-1])
        ft = ft - 0.5 * c * (tp[1:] - tp[:-1])
    return -np.stack([np.diff(fu), np.diff(ft)]) / grid.h


def shear1d_step(grid: Grid1D, dt: float, params: ShearParams, scheme: str = "central",
                 splitting: str = "strang", integrator: str = "ssprk2") -> Grid1D:
    """Acoustic substep for ``u_t = tau_y``, ``tau_t = G u_y`` and exact decay of tau."""
    G = params.G
    decay_full = math.exp(-dt / params.lam)
    decay_half = math.exp(-0.5 * dt / params.lam)

    def acoustic(g):
        g1 = g.copy(g.U + dt * _shear_rhs(g, G, scheme))
        if integrator == "euler":
            return g1
        return g.copy(0.5 * (g.U + g1.U + dt * _shear_rhs(g1, G, scheme)))

    def decay(g, w):
        U = g.U.copy()
        U[1] *= w
        return g.copy(U)

    if splitting == "strang":
        return decay(acoustic(decay(grid, decay_half)), decay_half)
    return decay(acoustic(grid), decay_full)


def shear_energy(grid: Grid1D, params: ShearParams) -> float:
    u, tau = grid.U
    return float(np.sum(0.5 * u * u + tau * tau / (2.0 * params.G))) * grid.h


def integrate_shear(grid: Grid1D, params: ShearParams, t_end: float, cfl: float = 0.5,
                    scheme: str = "central", splitting: str = "strang",
                    integrator: str = "ssprk2", snapshot_every: int = 0):
    """Uniform steps to ``t_end``; returns ``(grid, DiagnosticsSeries, snapshots)``."""
    nsteps, dt = _uniform_steps(t_end, shear_cfl_dt(grid, cfl, params))
    series = DiagnosticsSeries()
    series.append(time=0.0, energy=shear_energy(grid, params), max_speed=math.sqrt(params.G))
    snaps = [(0.0, grid)] if snapshot_every else []
    for k in range(1, nsteps + 1):
        tau = grid.U[1]
        # tau decays exactly, so the dissipated energy is known in closed form
        lost = float(np.sum(tau * tau * -np.expm1(-2.0 * dt / params.lam))) / (2 * params.G) * grid.h
        e0 = series.records[-1]["energy"]
        grid = shear1d_step(grid, dt, params, scheme, splitting, integrator)
        if not np.all(np.isfinite(grid.U)):
            raise AdmissibilityLoss("non-finite shear state", None, k * dt)
        e1 = shear_energy(grid, params)
        t = t_end if k == nsteps else k * dt
        series.append(time=t, energy=e1, entropy=e1, dissipation=lost, budget=e1 - e0,
                      max_speed=math.sqrt(params.G),
                      min_dissipation=float(np.min(tau * tau)) / (params.lam * params.G))
        if snapshot_every and (k % snapshot_every == 0 or k == nsteps):
            snaps.append((t, grid))
    return grid, series, snaps


def analytic_shear_mode(t, y, k, lam, mu_dot, u0=1.0):
    """Standing-mode solution of ``lam u_tt + u_t = mu_dot u_yy`` with ``u_t(0) = 0``."""
    return u0 * _shear_amplitude(t, k, lam, mu_dot)[0] * np.sin(k * np.asarray(y))


def analytic_shear_tau(t, y, k, lam, mu_dot, u0=1.0):
    """Companion stress ``tau = -U'(t) cos(ky) / k`` of :func:`analytic_shear_mode`."""
    return -u0 * _shear_amplitude(t, k, lam, mu_dot)[1] * np.cos(k * np.asarray(y)) / k


def _shear_amplitude(t, k, lam, mu_dot):
    """Time factor U(t) with U(0)=1, U'(0)=0 and its derivative."""
    if k <= 0:
        raise ValueError("k must be > 0")
    if math.isinf(lam):
        raise ValueError("the mode is undamped for lam = inf; use elastic_reference")
    stiff = mu_dot * k * k / lam
    disc = stiff - 1.0 / (4.0 * lam * lam)
    decay = math.exp(-t / (2.0 * lam))
    if disc > 0:
        w = math.sqrt(disc)
        amp = decay * (math.cos(w * t) + math.sin(w * t) / (2.0 * lam * w))
        return amp, -decay * math.sin(w * t) * stiff / w
    if disc == 0:
        return decay * (1.0 + t / (2.0 * lam)), -decay * t / (4.0 * lam * lam)
    beta = math.sqrt(-disc)
    r_minus = -1.0 / (2.0 * lam) - beta
    r_plus = stiff / r_minus
    em, ep = math.exp(r_minus * t), math.exp(r_plus * t)
    span = r_plus - r_minus
    return (r_plus * em - r_minus * ep) / span, stiff * (em - ep) / span


def heat_reference(t, y, k, mu_dot, u0=1.0):
    return u0 * math.exp(-mu_dot * k * k * t) * np.sin(k * np.asarray(y))


def elastic_reference(t, y, k, G, u0=1.0):
    return u0 * math.cos(math.sqrt(G) * k * t) * np.sin(k * np.asarray(y))


def shear_mode_grid(n, length=1.0, mode=1, u0=1.0) -> Grid1D:
    y = (np.arange(n) + 0.5) * length / n
    k = 2 * math.pi * mode / length
    return Grid1D(n, length, np.stack([u0 * np.sin(k * y), np.zeros(n)]))


def l2_norm(f, h) -> float:
    return math.sqrt(float(np.sum(np.asarray(f) ** 2)) * h)
