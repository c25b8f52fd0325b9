"""Relaxation of A, conformation diagnostics and the dissipation balance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import InsufficientSamples, NonpositiveRelaxationTime, NotPositiveDefinite
from .material import ElasticParams, MaxwellParams, extra_stress_tau, piola_stress
from .system import _law_args, as_vector, check_admissible, law_for
from .tensor_core import SymTensor2, Tensor2, congruence, inverse2

_K = kernels._numpy


@dataclass(frozen=True)
class ConformationSample:
    c: SymTensor2
    dissipation: float
    tau: SymTensor2


def _check_spd(A: SymTensor2, name: str) -> None:
    if not (A.det() > 0 and A.trace() > 0):
        raise NotPositiveDefinite(f"{name} is not positive definite")


def relax_exact(A: SymTensor2, F: Tensor2, dt: float, lam: float) -> SymTensor2:
    """Exact solution of ``lam dA/dt + A = F^-1 F^-T`` after ``dt`` with F frozen."""
    if not lam > 0:
        raise NonpositiveRelaxationTime(f"lambda must be > 0, got {lam}")
    if dt < 0:
        raise ValueError("dt must be >= 0")
    _check_spd(A, "A")
    Finv = inverse2(F)
    B = congruence(Finv, SymTensor2.identity())
    w = 0.0 if math.isinf(dt) else math.exp(-dt / lam)
    return SymTensor2(B.aa + (A.aa - B.aa) * w, B.ab + (A.ab - B.ab) * w, B.bb + (A.bb - B.bb) * w)


def dissipation(c: SymTensor2, tol: float | None = None) -> float:
    """``(I - c^-1):(c - I) = sum_i (l_i - 1)^2 / l_i`` over the eigenvalues of c."""
    l1, l2 = _K.sym_eigs(c.aa, c.ab, c.bb)
    if tol is None:
        tol = 1e-12 * max(c.max_abs(), 1e-300)
    if not min(l1, l2) > tol:
        raise NotPositiveDefinite("conformation tensor is not positive definite")
    return float((l1 - 1.0) ** 2 / l1 + (l2 - 1.0) ** 2 / l2)


def conformation_sample(rho: float, F: Tensor2, A: SymTensor2, c1_sq: float) -> ConformationSample:
    c = congruence(F, A)
    return ConformationSample(c, dissipation(c), extra_stress_tau(rho, F, A, c1_sq))


@dataclass
class Trajectory:
    """Uniformly sampled history of one material point.

    Arrays are indexed by sample: ``rho`` (n,), ``F``, ``A``, ``grad_u`` (n, 2, 2)
    with ``grad_u[k][i, j] = d u_i / d x_j`` (spatial gradient).
    """

    dt: float
    rho: np.ndarray
    F: np.ndarray
    A: np.ndarray
    grad_u: np.ndarray

    def __len__(self) -> int:
        return len(self.rho)


def ucm_residual(traj: Trajectory, params: MaxwellParams) -> float:
    """Largest Frobenius residual of the compressible UCM law at interior samples.

    ``lam (dtau/dt - L tau - tau L^T + div(u) tau) + tau - 2 rho mu_dot D(u)``
    with ``tau = rho c1 (F A F^T - I)``; ``dtau/dt`` by central differences.
    The viscosity enters multiplied by the density because tau carries rho.
    """
    if len(traj) < 3:
        raise InsufficientSamples("need at least three samples")
    lam = params.lam
    c1 = params.elastic.c1_sq
    rho = np.asarray(traj.rho, dtype=float)
    F = np.asarray(traj.F, dtype=float)
    A = np.asarray(traj.A, dtype=float)
    L = np.asarray(traj.grad_u, dtype=float)
    eye = np.eye(2)
    tau = rho[:, None, None] * c1 * (F @ A @ np.transpose(F, (0, 2, 1)) - eye)
    dtau = (tau[2:] - tau[:-2]) / (2.0 * traj.dt)
    t, l = tau[1:-1], L[1:-1]
    div = np.trace(l, axis1=1, axis2=2)[:, None, None]
    D = 0.5 * (l + np.transpose(l, (0, 2, 1)))
    rate = dtau - l @ t - t @ np.transpose(l, (0, 2, 1)) + div * t
    res = lam * rate + t - 2.0 * rho[1:-1, None, None] * params.mu_dot * D
    return float(np.sqrt(np.sum(res**2, axis=(1, 2))).max())


def free_energy(U, params) -> float:
    """Thermodynamic free energy per unit reference volume (system units)."""
    v = as_vector(U)
    check_admissible(v)
    args = _law_args(law_for("ucm10", params))
    return float(_K.energy(v, *args) - 0.5 * (v[0] ** 2 + v[1] ** 2))


def energy_rate_check(before, after, dt: float, params: MaxwellParams, grad_a_u=None) -> float:
    """Midpoint residual of ``de/dt + D(c)/(2 lam) - grad_a u : S``.

    States are ucm10 vectors in system units (``c1_sq * rho_hat = 1``);
    ``grad_a_u`` is the material velocity gradient (defaults to zero).
    """
    v0 = as_vector(before).astype(float)
    v1 = as_vector(after).astype(float)
    vm = 0.5 * (v0 + v1)
    de = (free_energy(v1, params) - free_energy(v0, params)) / dt
    cxx, cxy, cyy = _K.conformation(vm)
    diss = 0.0 if params.frozen else float(_K.dissipation(cxx, cxy, cyy)) / (2.0 * params.lam)
    work = 0.0
    if grad_a_u is not None:
        F = Tensor2(*vm[3:7])
        A = SymTensor2(*_K.a_from_y(vm[7], vm[8], vm[9]))
        unit = ElasticParams(1.0, params.elastic.ratio, params.elastic.gamma, 1.0)
        S = piola_stress("ucm10", F, vm[2], A, unit).as_matrix()
        work = float(np.sum(np.asarray(grad_a_u) * S))
    return de + diss - work


def manufactured_trajectory(dt: float, samples: int, params: MaxwellParams, a0=(1.0, 1.0),
                            rate: float = 1.0) -> Trajectory:
    """Exact history under ``F = diag(e^(rt), e^(-rt))`` with diagonal A.

    Each diagonal entry solves ``lam A' + A = e^(-+2rt)`` in closed form, so the
    only error in :func:`ucm_residual` is the time differencing of tau.
    """
    if samples < 3:
        raise InsufficientSamples("need at least three samples")
    lam = params.lam
    t = dt * np.arange(samples)
    F = np.zeros((samples, 2, 2))
    F[:, 0, 0] = np.exp(rate * t)
    F[:, 1, 1] = np.exp(-rate * t)
    A = np.zeros((samples, 2, 2))
    for idx, s in ((0, -2.0 * rate), (1, 2.0 * rate)):
        denom = 1.0 + lam * s
        if math.isinf(lam):
            A[:, idx, idx] = a0[idx]
        elif denom == 0.0:
            A[:, idx, idx] = (a0[idx] + t / lam) * np.exp(-t / lam)
        else:
            A[:, idx, idx] = (a0[idx] - 1.0 / denom) * np.exp(-t / lam) + np.exp(s * t) / denom
    L = np.broadcast_to(np.diag([rate, -rate]), (samples, 2, 2)).copy()
    rho = np.full(samples, params.elastic.rho_hat)
    return Trajectory(dt, rho, F, A, L)
