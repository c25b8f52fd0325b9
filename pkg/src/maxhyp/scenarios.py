"""Scenario registry, refinement studies, lambda sweeps and the symmetry audit.

Every runner returns a :class:`RunResult` holding the emitted tables, the
manifest and the process exit code (0 all gates pass, 2 a gate failed,
1 an error occurred).  Files are only written when an output directory is
given.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .config import ParsedConfig, ScenarioSpec
from .errors import MaxhypError, ValidationError
from .material import ElasticParams, MaxwellParams
from .outputs import canonical_json, content_hash, csv_bytes, write_manifest
from .solver import (
    RECORD_FIELDS,
    Grid1D,
    Grid2D,
    RunConfig,
    ShearParams,
    analytic_shear_mode,
    curl_free_F,
    elastic_reference,
    heat_reference,
    integrate,
    integrate_shear,
    l2_norm,
)
from .symmetrizer import (
    assemble_symmetric,
    directions,
    flux_jacobians,
    hessian_eta,
    random_state,
    xi_jacobian,
)
from .system import COMPONENTS, SYSTEMS
from .tensor_core import SymTensor2, a_from_y_closed_form, spd_inv_sqrt

EXIT_OK, EXIT_ERROR, EXIT_GATE = 0, 1, 2

ENERGY_TOL = 1e-10
DISSIPATION_TOL = 1e-12
CONSERVATION_TOL = 1e-12
INVOLUTION_TOL = 1e-12
DEFECT_TOL = 1e-7
ABLATION_MIN = 1e-3
CLOSED_FORM_TOL = 1e-12
SPEED_TOL = 1e-6
CANONICAL_TOL = 1e-8


@dataclass
class Gate:
    passed: bool
    value: float
    limit: float
    rule: str

    def as_dict(self):
        return {"passed": bool(self.passed), "value": self.value, "limit": self.limit,
                "rule": self.rule}


def gate_le(value, limit) -> Gate:
    return Gate(bool(value <= limit), float(value), float(limit), "<=")


def gate_ge(value, limit) -> Gate:
    return Gate(bool(value >= limit), float(value), float(limit), ">=")


def gate_gt(value, limit) -> Gate:
    return Gate(bool(value > limit), float(value), float(limit), ">")


@dataclass
class RunResult:
    manifest: dict
    tables: dict = field(default_factory=dict)
    series: object = None
    exit_code: int = EXIT_OK

    @property
    def gates(self) -> dict:
        return self.manifest.get("gates", {})


# ---------------------------------------------------------------- initial data


def shear_params(cfg: RunConfig, spec: ScenarioSpec, lam: float | None = None) -> ShearParams:
    """Shear modulus from ``mu_dot / lam`` when mu_dot is given, else ``c1_sq``."""
    lam = cfg.params.lam if lam is None else lam
    mu = spec.get("mu_dot")
    if mu is None:
        return ShearParams(lam, cfg.params.elastic.c1_sq)
    if math.isinf(lam):
        raise ValidationError("mu_dot cannot be combined with lambda = inf", "mu_dot")
    return ShearParams.from_viscosity(lam, mu)


def shear_grid(n, length, mode, u0) -> Grid1D:
    y = (np.arange(n) + 0.5) * length / n
    k = 2 * math.pi * mode / length
    return Grid1D(n, length, np.stack([u0 * np.sin(k * y), np.zeros(n)]))


def riemann_grid(n, length, u_left, u_right) -> Grid1D:
    a = -0.5 * length + (np.arange(n) + 0.5) * length / n
    z, one = np.zeros(n), np.ones(n)
    ux = np.where(a < 0.0, u_left, u_right)
    return Grid1D(n, length, np.stack([ux, z, one, one, z, z, one]), origin=-0.5 * length)


def gauss_grid(nx, ny, length, amplitude, width, displacement, profile) -> Grid2D:
    ha, hb = length / nx, length / ny
    a = -0.5 * length + (np.arange(nx) + 0.5) * ha
    b = -0.5 * length + (np.arange(ny) + 0.5) * hb
    A, B = np.meshgrid(a, b, indexing="ij")
    if profile == "gauss":
        g = np.exp(-(A * A + B * B) / (2.0 * width * width))
        ux, uy = amplitude * g, -0.5 * amplitude * g
        phx, phy = displacement * g, 0.5 * displacement * g
    else:
        ka, kb = 2 * math.pi * A / length, 2 * math.pi * B / length
        ux = amplitude * np.sin(ka) * np.cos(kb)
        uy = 0.5 * amplitude * np.cos(ka + 0.3) * np.sin(kb)
        phx = displacement * np.sin(ka) * np.sin(kb)
        phy = displacement * np.cos(ka) * np.cos(kb)
    Fxa, Fxb, Fya, Fyb = curl_free_F((nx, ny), ha, hb, phx, phy)
    J = Fxa * Fyb - Fxb * Fya
    one, zero = np.ones_like(J), np.zeros_like(J)
    U = np.stack([ux, uy, J, Fxa, Fxb, Fya, Fyb, one, zero, one])
    return Grid2D(nx, ny, length, length, U, origin=(-0.5 * length, -0.5 * length))


def build_grid(spec_id: str, cfg: RunConfig, spec: ScenarioSpec, n: int | None = None):
    """Initial grid of a time-dependent scenario; ``n`` overrides the resolution."""
    if spec_id == "shear1d_mode":
        return shear_grid(n or spec.get("n", 256), spec.get("length", 1.0), spec.get("mode", 1),
                          spec.get("u0", 1.0))
    if spec_id == "riemann1d_elasto":
        return riemann_grid(n or spec.get("n", 400), spec.get("length", 1.0),
                            spec.get("u_left", -0.1), spec.get("u_right", 0.1))
    if spec_id == "gauss2d_ucm":
        nx = n or spec.get("nx", spec.get("n", 64))
        ny = n or spec.get("ny", spec.get("n", 64))
        return gauss_grid(nx, ny, spec.get("length", 1.0), spec.get("amplitude", 0.1),
                          spec.get("width", 0.1), spec.get("displacement", 0.01),
                          spec.get("profile", "gauss"))
    raise ValidationError(f"scenario {spec_id} has no grid", "scenario")


# ---------------------------------------------------------------- helpers


def _summary(series) -> dict:
    out = {}
    for name in RECORD_FIELDS[1:]:
        col = series.column(name)
        col = col[np.isfinite(col)]
        if col.size:
            out[name] = {"max": float(col.max()), "min": float(col.min()), "final": float(col[-1])}
    return out


def _field_table(grid):
    if isinstance(grid, Grid2D):
        A, B = grid.centers
        cols = [A.ravel(), B.ravel()] + [c.ravel() for c in grid.U]
        names = ["a", "b"]
    else:
        cols = [grid.centers] + list(grid.U)
        names = ["a"]
    nvar = grid.U.shape[0]
    names += ["u", "tau"] if nvar == 2 else list(COMPONENTS[:nvar])
    return names, np.column_stack(cols)


def _diag_table(series):
    return list(RECORD_FIELDS), [[r[k] for k in RECORD_FIELDS] for r in series.records]


def _snap_tables(snaps, final_grid, t_end):
    if not snaps:
        snaps = [(t_end, final_grid)]
    tables = {}
    times = []
    for i, (t, g) in enumerate(snaps):
        names, rows = _field_table(g)
        tables[f"fields_{i:04d}.csv"] = (names, rows)
        times.append(t)
    return tables, times


def _rel_steps(E):
    E = np.asarray(E)
    if E.size < 2:
        return np.zeros(0)
    return np.diff(E) / np.abs(E[:-1])


def _lagrangian_gates(cfg: RunConfig, series, sums, grid0) -> dict:
    gates = {}
    dE = _rel_steps(series.column("energy"))
    E = series.column("energy")
    gates["dissipation_nonnegative"] = gate_ge(series.column("min_dissipation").min(),
                                               -DISSIPATION_TOL)
    gates["energy_nonincreasing"] = gate_le(dE.max() if dE.size else 0.0, ENERGY_TOL)
    if math.isinf(cfg.params.lam) and cfg.scheme == "central":
        gates["energy_conserved"] = gate_le(np.abs(dE).max() if dE.size else 0.0, ENERGY_TOL)
    sums = np.asarray(sums)
    scale = np.maximum(np.abs(grid0.U[:7]).reshape(7, -1).sum(axis=1), 1e-300)
    drift = np.abs(np.diff(sums, axis=0)) / scale if len(sums) > 1 else np.zeros((1, 7))
    gates["conservation"] = gate_le(drift.max(), CONSERVATION_TOL)
    if cfg.scheme == "central" and isinstance(grid0, Grid2D):
        gates["involution"] = gate_le(series.column("involution").max() / _field_scale(grid0),
                                      INVOLUTION_TOL)
    return gates


def _field_scale(grid) -> float:
    """``max |F| / h``, the natural size of a discrete derivative of F."""
    h = min(grid.ha, grid.hb) if isinstance(grid, Grid2D) else grid.h
    return float(np.abs(grid.U[3:7]).max()) / h


def _shear_gates(cfg, series) -> dict:
    dE = _rel_steps(series.column("energy"))
    gates = {
        "dissipation_nonnegative": gate_ge(series.column("min_dissipation").min(), -DISSIPATION_TOL),
        "energy_nonincreasing": gate_le(dE.max() if dE.size else 0.0, ENERGY_TOL),
    }
    if math.isinf(cfg.params.lam) and cfg.scheme == "central":
        gates["energy_conserved"] = gate_le(np.abs(dE).max() if dE.size else 0.0, ENERGY_TOL)
    return gates


def _shear_reference(t, y, k, sp: ShearParams, u0):
    if math.isinf(sp.lam):
        return elastic_reference(t, y, k, sp.G, u0)
    return analytic_shear_mode(t, y, k, sp.lam, sp.mu_dot, u0)


# ---------------------------------------------------------------- scenario runners


def _run_shear_mode(pc: ParsedConfig):
    cfg, spec = pc.run, pc.scenario
    sp = shear_params(cfg, spec)
    g0 = build_grid("shear1d_mode", cfg, spec)
    g, series, snaps = integrate_shear(g0, sp, cfg.t_end, cfg.cfl, cfg.scheme, cfg.splitting,
                                       cfg.integrator, cfg.output_every)
    k = 2 * math.pi * spec.get("mode", 1) / g.length
    ref = _shear_reference(cfg.t_end, g.centers, k, sp, spec.get("u0", 1.0))
    err = l2_norm(g.U[0] - ref, g.h)
    gates = _shear_gates(cfg, series)
    gates["l2_error"] = gate_le(err, spec.get("tol", 1e-3))
    return g, series, snaps, gates, {"l2_error": err, "G": sp.G, "steps": len(series) - 1}


def _erfc(x):
    return np.vectorize(math.erfc)(x)


def _run_stokes(pc: ParsedConfig):
    cfg, spec = pc.run, pc.scenario
    sp = shear_params(cfg, spec)
    wall = spec.get("wall_u", 1.0)
    mu = sp.mu_dot if math.isfinite(sp.lam) else 0.0
    need = 6.0 * math.sqrt(mu * cfg.t_end)
    length = spec.get("length", max(need, 1.5 * math.sqrt(sp.G) * cfg.t_end, 1.0))
    if length < need:
        raise ValidationError(f"length must be >= 6 sqrt(mu_dot t_end) = {need!r}", "length")
    n = spec.get("n", 400)
    g0 = Grid1D(n, length, np.zeros((2, n)), boundary="dirichlet_velocity", wall_u=wall)
    g, series, snaps = integrate_shear(g0, sp, cfg.t_end, cfg.cfl, cfg.scheme, cfg.splitting,
                                       cfg.integrator, cfg.output_every)
    far = abs(float(g.U[0, -1]))
    gates = {"far_field_quiescent": gate_le(far, 1e-6 * abs(wall) if wall else 1e-12),
             "finite": gate_le(0.0 if np.all(np.isfinite(g.U)) else 1.0, 0.0)}
    extra = {"length": length, "G": sp.G, "far_field_u": far, "steps": len(series) - 1}
    if mu > 0:
        newt = wall * _erfc(g.centers / (2.0 * math.sqrt(mu * cfg.t_end)))
        extra["distance_to_newtonian"] = l2_norm(g.U[0] - newt, g.h) / l2_norm(newt, g.h)
    return g, series, snaps, gates, extra


def _run_lagrangian(pc: ParsedConfig, spec_id: str):
    cfg, spec = pc.run, pc.scenario
    g0 = build_grid(spec_id, cfg, spec)
    axes = (1, 2) if isinstance(g0, Grid2D) else (1,)
    sums = [g0.U[:7].sum(axis=axes)]

    def on_step(t, dt, grid):
        sums.append(grid.U[:7].sum(axis=axes))

    g, series, snaps = integrate(g0, cfg, cfg.output_every, on_step)
    gates = _lagrangian_gates(cfg, series, sums, g0)
    E = series.column("energy")
    budget = np.abs(series.column("budget")[1:]) / np.abs(E[:-1])
    # discretisation-dependent, so reported rather than gated
    extra = {"steps": len(series) - 1,
             "energy_budget_max_rel": float(budget.max()) if budget.size else 0.0}
    return g, series, snaps, gates, extra


def limit_sweep(pc: ParsedConfig, lambdas=None) -> tuple:
    """Distances of the shear solution to the heat and undamped-wave references.

    Holds ``mu_dot`` fixed, so the wave modulus is ``mu_dot / lam``.  Returns
    ``(header, rows, gates, extra)``; distances are relative L2 norms.
    """
    cfg, spec = pc.run, pc.scenario
    lams = tuple(sorted(lambdas or spec.get("lambdas", (1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3))))
    if len(lams) < 2 or math.log10(lams[-1] / lams[0]) < 4 - 1e-9:
        raise ValidationError("lambdas must span at least 4 decades", "lambdas")
    mu = spec.get("mu_dot", 1.0)
    n = spec.get("n", 128)
    length = spec.get("length", 2 * math.pi)
    mode = spec.get("mode", 1)
    u0 = spec.get("u0", 1.0)
    t_newt = spec.get("t_newtonian", cfg.t_end)
    t_el = spec.get("t_elastic", cfg.t_end)
    k = 2 * math.pi * mode / length
    rows = []
    stable = True
    for lam in lams:
        sp = ShearParams.from_viscosity(lam, mu)
        out = {}
        for tag, t in (("newt", t_newt), ("el", t_el)):
            g, series, _ = integrate_shear(shear_grid(n, length, mode, u0), sp, t, cfg.cfl,
                                           cfg.scheme, cfg.splitting, cfg.integrator)
            u = g.U[0]
            stable &= bool(np.all(np.isfinite(g.U)) and np.abs(u).max() <= 1.01 * abs(u0))
            heat = heat_reference(t, g.centers, k, mu, u0)
            wave = elastic_reference(t, g.centers, k, sp.G, u0)
            out[tag] = (l2_norm(u - heat, g.h) / l2_norm(heat, g.h),
                        l2_norm(u - wave, g.h) / l2_norm(wave, g.h), len(series) - 1)
        rows.append([lam, sp.G, out["newt"][0], out["el"][1], out["el"][0], out["newt"][2],
                     out["el"][2]])
    header = ["lambda", "G", "dist_newtonian", "dist_elastic", "dist_newtonian_at_t_elastic",
              "steps_newtonian", "steps_elastic"]
    tol = spec.get("tol", 0.02)
    dn = [r[2] for r in rows]
    de = [r[3] for r in rows]
    gates = {
        "newtonian_limit": gate_le(dn[0], tol),
        "elastic_limit": gate_le(de[-1], tol),
        "elastic_closer_at_max_lambda": gate_le(de[-1] - rows[-1][4], 0.0),
        "stable_at_hyperbolic_cfl": gate_le(0.0 if stable else 1.0, 0.0),
    }
    extra = {
        "newtonian_monotone": bool(all(a <= b for a, b in zip(dn, dn[1:]))),
        "elastic_monotone": bool(all(a >= b for a, b in zip(de, de[1:]))),
        "mu_dot": mu, "t_newtonian": t_newt, "t_elastic": t_el,
    }
    return header, rows, gates, extra


def _restrict(fine: np.ndarray, ratio: int, axes) -> np.ndarray:
    """Sample a cell-centred fine field at coarse centres (mean of the two straddling cells)."""
    out = fine
    for ax in axes:
        n = out.shape[ax] // ratio
        idx = np.arange(n) * ratio + ratio // 2
        out = 0.5 * (np.take(out, idx - 1, axis=ax) + np.take(out, idx, axis=ax))
    return out


def converge(pc: ParsedConfig, levels: int | None = None) -> tuple:
    """Refinement table ``(n, h, value, order)`` for the configured target.

    ``quantity = error`` uses the analytic shear mode or, without one, the same
    scheme at 4x the finest resolution; ``involution`` and ``detf`` use the
    run maximum of the residual, whose exact value is zero.
    """
    cfg, spec = pc.run, pc.scenario
    levels = levels or spec.get("levels", 4)
    if levels < 2:
        raise ValidationError("levels must be >= 2", "levels")
    target = spec.get("target", "shear1d_mode")
    quantity = spec.get("quantity", "error")
    base = spec.get("n", {"shear1d_mode": 64, "gauss2d_ucm": 32, "riemann1d_elasto": 100}[target])
    ns = [base * 2**i for i in range(levels)]
    if target == "shear1d_mode" and quantity != "error":
        raise ValidationError("the shear model only supports quantity = error", "quantity")
    want_system = "elasto7" if target == "riemann1d_elasto" else "ucm10"
    if cfg.system != want_system:
        raise ValidationError(f"target {target} runs on {want_system}", "system")
    values, hs, scales = [], [], []
    finals = {}
    for n in ns:
        if target == "shear1d_mode":
            sp = shear_params(cfg, spec)
            g, _, _ = integrate_shear(build_grid(target, cfg, spec, n), sp, cfg.t_end, cfg.cfl,
                                      cfg.scheme, cfg.splitting, cfg.integrator)
            k = 2 * math.pi * spec.get("mode", 1) / g.length
            ref = _shear_reference(cfg.t_end, g.centers, k, sp, spec.get("u0", 1.0))
            values.append(l2_norm(g.U[0] - ref, g.h))
            hs.append(g.h)
            continue
        g0 = build_grid(target, cfg, spec, n)
        g, series, _ = integrate(g0, cfg, full=False)
        hs.append(g.ha if isinstance(g, Grid2D) else g.h)
        scales.append(_field_scale(g0))
        if quantity == "involution":
            values.append(float(series.column("involution").max()))
        elif quantity == "detf":
            values.append(float(series.column("detf").max()))
        else:
            finals[n] = g
    if quantity == "error" and target != "shear1d_mode":
        fine_n = 4 * ns[-1]
        ref, _, _ = integrate(build_grid(target, cfg, spec, fine_n), cfg, full=False)
        for n in ns:
            g = finals[n]
            two_d = isinstance(g, Grid2D)
            axes = (1, 2) if two_d else (1,)
            r = _restrict(ref.U[:2], fine_n // n, axes)
            vol = g.ha * g.hb if two_d else g.h
            values.append(math.sqrt(float(np.sum((g.U[:2] - r) ** 2)) * vol))
    orders = [math.nan] + [math.log(values[i] / values[i + 1]) / math.log(hs[i] / hs[i + 1])
                           if values[i] > 0 and values[i + 1] > 0 else math.nan
                           for i in range(len(values) - 1)]
    rows = [[i, n, h, v, o] for i, (n, h, v, o) in enumerate(zip(ns, hs, values, orders))]
    header = ["level", "n", "h", "value", "order"]
    measured = [round(o, 2) for o in orders[1:]]
    gates = {}
    if quantity == "involution" and cfg.scheme == "central":
        rel = max(v / s for v, s in zip(values, scales))
        gates["involution_preserved"] = gate_le(rel, INVOLUTION_TOL)
    elif quantity == "error":
        lo, hi = (1.8, 2.2) if cfg.scheme == "central" else (0.8, 1.2)
        gates["order_min"] = gate_ge(min(measured), lo)
        gates["order_max"] = gate_le(max(measured), hi)
    else:
        lo = 1.8 if cfg.scheme == "central" and quantity == "detf" else 1.0
        gates["order_min"] = gate_ge(min(measured), lo)
    extra = {"target": target, "quantity": quantity, "orders": orders[1:],
             "order_rounding": "orders are compared after rounding to two decimals"}
    return header, rows, gates, extra


def audit_symmetry(system: str, samples: int = 1000, seed: int = 0, gammas=(1.5, 2.0, 3.0),
                   ndirs: int = 8, elastic: ElasticParams | None = None) -> tuple:
    """Symmetry, Hessian, speed and closed-form audits over random admissible states."""
    if system not in SYSTEMS:
        raise ValidationError(f"unknown system {system!r}", "system")
    if samples < 1:
        raise ValidationError("samples must be >= 1", "samples")
    base = elastic or ElasticParams()
    rng = np.random.default_rng(seed)
    dirs = directions(ndirs)
    rows = []
    for idx in range(samples):
        gamma = float(gammas[rng.integers(len(gammas))])
        params = MaxwellParams(replace(base, gamma=gamma))
        U = random_state(system, rng)
        H = hessian_eta(U, params)
        jac = flux_jacobians(U, params, method="complex")
        dxi = xi_jacobian(U, params)
        defect = ablated = 0.0
        speed_err = 0.0
        for nu in dirs:
            rep = assemble_symmetric(U, nu, params, hessian=H, jacobians=jac, xi_jac=dxi)
            bare = assemble_symmetric(U, nu, params, with_xi=False, hessian=H, jacobians=jac,
                                      xi_jac=dxi)
            defect = max(defect, rep.symmetry_defect)
            ablated = max(ablated, bare.symmetry_defect)
            if rep.speeds:
                exact = closed_form_spectrum(U, nu, params)
                speed_err = max(speed_err, float(np.abs(np.sort(rep.speeds) - exact).max()))
            else:
                speed_err = math.inf
        hmin = float(np.linalg.eigvalsh(H).min())
        rows.append([idx, gamma, math.hypot(U[0], U[1]), U[2], defect, ablated, hmin, speed_err])
    header = ["sample", "gamma", "speed_u", "detF", "symmetry_defect", "ablated_defect",
              "hessian_min_eig", "speed_error"]
    arr = np.array(rows)
    moving = arr[:, 2] > 0
    canon = canonical_spectrum_error(system, base)
    cf = closed_form_audit(samples, seed)
    gates = {
        "symmetry_defect": gate_le(arr[:, 4].max(), DEFECT_TOL),
        "hessian_positive": gate_gt(arr[:, 6].min(), 0.0),
        "ablation_detected": gate_gt(arr[moving, 5].max() if moving.any() else 0.0, ABLATION_MIN),
        "speeds_match": gate_le(arr[:, 7].max(), SPEED_TOL),
        "canonical_spectrum": gate_le(canon, CANONICAL_TOL),
        "closed_form_A": gate_le(cf["max_rel_error"], CLOSED_FORM_TOL),
    }
    extra = {"closed_form": cf, "directions": ndirs, "gammas": list(gammas)}
    return header, rows, gates, extra


def closed_form_spectrum(U, nu, params) -> np.ndarray:
    """Sorted speeds: zeros, ``+-sqrt(nu.A.nu)`` and ``+-sqrt(nu.A.nu + |p'| |Cof(F) nu|^2)``."""
    v = np.asarray(U, dtype=float)
    from .system import _law_args, law_for, system_of

    ucm, ratio, gamma = _law_args(law_for(system_of(v), params))
    fxa, fxb, fya, fyb = v[3:7]
    na, nb = nu
    c_sq = (fyb * na - fya * nb) ** 2 + (-fxb * na + fxa * nb) ** 2
    k = abs(kernels.pressure_slope(v[2], ucm, ratio, gamma))
    if v.shape[0] == 10:
        aaa, aab, abb = kernels.a_from_y(v[7], v[8], v[9])
        a_nn = aaa * na * na + 2 * aab * na * nb + abb * nb * nb
    else:
        a_nn = 1.0
    s1, s2 = math.sqrt(a_nn), math.sqrt(a_nn + k * c_sq)
    zeros = [0.0] * (v.shape[0] - 4)
    return np.sort(np.array(zeros + [-s2, -s1, s1, s2]))


def canonical_state(system: str) -> np.ndarray:
    v = [0.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]
    if system == "ucm10":
        v += [1.0, 0.0, 1.0]
    return np.array(v)


def canonical_spectrum_error(system: str, elastic: ElasticParams | None = None) -> float:
    """Deviation of the numeric spectrum at F = I, gamma = 2, ratio 1, nu = (1, 0)."""
    params = MaxwellParams(ElasticParams(1.0, 1.0, 2.0, 1.0) if elastic is None
                           else replace(elastic, c1_sq=1.0, d1_sq=1.0, gamma=2.0))
    U = canonical_state(system)
    rep = assemble_symmetric(U, (1.0, 0.0), params)
    if system == "elasto7":
        exact = np.array([-math.sqrt(3), -1, 0, 0, 0, 1, math.sqrt(3)])
    else:
        exact = np.array([-2.0, -1.0] + [0.0] * 6 + [1.0, 2.0])
    return float(np.abs(np.sort(rep.speeds) - exact).max())


def closed_form_audit(samples: int = 1000, seed: int = 0, eig_range=(0.25, 4.0)) -> dict:
    """Compare the explicit 2x2 formula for A(Y) with ``sqrt(det Y) Y^(-1/2)``."""
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    ratios = []
    for _ in range(samples):
        ev = rng.uniform(*eig_range, size=2)
        th = rng.uniform(0.0, math.pi)
        c, s = math.cos(th), math.sin(th)
        Q = np.array([[c, -s], [s, c]])
        Y = SymTensor2.from_matrix(Q @ np.diag(ev) @ Q.T)
        closed = a_from_y_closed_form(Y).as_matrix()
        inv_sqrt = spd_inv_sqrt(Y).as_matrix()
        target = math.sqrt(Y.det()) * inv_sqrt
        worst = max(worst, float(np.abs(closed - target).max() / np.abs(target).max()))
        ratios.append(float(np.trace(closed) / np.trace(inv_sqrt)) / math.sqrt(Y.det()))
    return {"factor": "sqrt(det Y)", "max_rel_error": worst,
            "factor_ratio_range": [min(ratios), max(ratios)],
            "adopted": "A = Y^(-1/2)", "samples": samples}


# ---------------------------------------------------------------- driver


def _tables_bytes(tables: dict) -> dict:
    return {name: csv_bytes(header, rows) for name, (header, rows) in tables.items()}


def _finish(pc: ParsedConfig, scenario: str, tables: dict, gates: dict, summary: dict, extra: dict,
            started: float, out_dir, error: str | None = None) -> RunResult:
    files = _tables_bytes(tables)
    payload = {"config": pc.echo() if pc is not None else {}, "scenario": scenario,
               "summary": summary, "gates": {k: g.as_dict() for k, g in gates.items()},
               "extra": extra, "error": error, "version": __version__}
    passed = error is None and all(g.passed for g in gates.values())
    manifest = dict(payload)
    manifest.update({
        "artifact": {"name": "maxhyp", "version": __version__},
        "passed": passed,
        "outputs": {name: _sha(files[name]) for name in sorted(files)},
        "content_hash": content_hash(files, payload),
        "runtime": {"wall_clock_s": round(time.perf_counter() - started, 3),
                    "backend": kernels.BACKEND, "threads": kernels.configure_threads()},
    })
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, data in files.items():
            (out / name).write_bytes(data)
        write_manifest(out / "manifest.json", manifest)
    code = EXIT_ERROR if error is not None else (EXIT_OK if passed else EXIT_GATE)
    return RunResult(manifest, tables, None, code)


def _sha(data: bytes) -> str:
    import hashlib

    return hashlib.sha256(data).hexdigest()


def run_scenario(pc: ParsedConfig, out_dir=None, lambdas=None, levels=None) -> RunResult:
    """Run the configured scenario and emit CSV tables plus ``manifest.json``.

    ``out_dir`` defaults to the config's output directory; pass ``False`` to
    keep everything in memory.
    """
    started = time.perf_counter()
    if out_dir is None:
        out_dir = pc.output_dir
    if out_dir is False:
        out_dir = None
    sid = pc.scenario.id
    cfg, spec = pc.run, pc.scenario
    try:
        if sid == "audit_symmetry":
            header, rows, gates, extra = audit_symmetry(
                cfg.system, spec.get("samples", 1000), cfg.seed,
                spec.get("gammas", (1.5, 2.0, 3.0)), spec.get("directions", 8), cfg.params.elastic)
            arr = np.array(rows)
            summary = {"max_symmetry_defect": float(arr[:, 4].max()),
                       "min_hessian_eig": float(arr[:, 6].min()),
                       "max_ablated_defect": float(arr[:, 5].max()),
                       "max_speed_error": float(arr[:, 7].max())}
            return _finish(pc, sid, {"audit.csv": (header, rows)}, gates, summary, extra, started,
                           out_dir)
        if sid == "limit_sweep":
            header, rows, gates, extra = limit_sweep(pc, lambdas)
            return _finish(pc, sid, {"sweep.csv": (header, rows)}, gates, {}, extra, started,
                           out_dir)
        if sid == "converge":
            header, rows, gates, extra = converge(pc, levels)
            return _finish(pc, sid, {"converge.csv": (header, rows)}, gates, {}, extra, started,
                           out_dir)
        if sid == "shear1d_mode":
            g, series, snaps, gates, extra = _run_shear_mode(pc)
        elif sid == "stokes_first":
            g, series, snaps, gates, extra = _run_stokes(pc)
        else:
            g, series, snaps, gates, extra = _run_lagrangian(pc, sid)
        tables, times = _snap_tables(snaps, g, cfg.t_end)
        tables["diagnostics.csv"] = _diag_table(series)
        extra["snapshot_times"] = times
        res = _finish(pc, sid, tables, gates, _summary(series), extra, started, out_dir)
        res.series = series
        return res
    except MaxhypError as exc:
        err = f"{type(exc).__name__}: {exc}"
        return _finish(pc, sid, {}, {}, {}, {}, started, out_dir, error=err)


def dumps_manifest(result: RunResult) -> str:
    return canonical_json(result.manifest)
