"""Symmetric-hyperbolic structure of the Lagrangian systems.

The entropy Hessian ``H = D^2 eta`` premultiplies the flux Jacobian; together
with the involution correction ``D Xi^T M_nu`` the product must be symmetric,
and the generalized eigenvalues of ``(K, H)`` are the characteristic speeds.

Derivatives are numerical by default.  First derivatives of fluxes and of Xi
use central differences or the complex step; the Hessian uses the mixed
complex-step/central stencil

    H_jk ~ Im[eta(U + i h_j e_j + h_k e_k) - eta(U + i h_j e_j - h_k e_k)] / (2 h_j h_k)

which avoids the cancellation error of plain second differences.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import InadmissiblePerturbation, NotPositiveDefinite
from .system import _law_args, as_vector, check_admissible, involutions, law_for, system_of

_K = kernels._numpy


@dataclass
class SymmetrizerReport:
    nu: tuple
    hessian: np.ndarray
    jacobian: np.ndarray
    correction: np.ndarray
    assembled: np.ndarray
    symmetry_defect: float
    hessian_min_eig: float
    speeds: list = field(default_factory=list)


def _steps(v, fd_step):
    return fd_step * np.maximum(1.0, np.abs(v))


def _admissible_batch(W) -> bool:
    W = W.real
    ok = W[2] > 0
    if W.shape[0] == 10:
        ok &= (W[7] > 0) & (W[7] * W[9] - W[8] ** 2 > 0)
    return bool(np.all(ok))


def _with_shrinking(v, fd_step, build):
    h = _steps(v, fd_step)
    for _ in range(4):
        W = build(h)
        if _admissible_batch(W):
            return W, h
        h = h / 10.0
    raise InadmissiblePerturbation("finite-difference stencil leaves the admissible set")


def hessian_eta(U, params, fd_step: float = 1e-5) -> np.ndarray:
    v = as_vector(U).astype(float)
    check_admissible(v)
    n = v.shape[0]
    args = _law_args(law_for(system_of(v), params))

    def build(h):
        W = np.broadcast_to(v.astype(complex)[:, None, None, None], (n, n, n, 2)).copy()
        j, k = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        W[j, j, k, :] += 1j * h[j][..., None]
        W[k, j, k, 0] += h[k]
        W[k, j, k, 1] -= h[k]
        return W

    W, h = _with_shrinking(v, fd_step, build)
    eta = _K.entropy(W.reshape(n, -1), *args).reshape(n, n, 2)
    H = (eta[..., 0].imag - eta[..., 1].imag) / (2.0 * np.outer(h, h))
    return 0.5 * (H + H.T)


def _jacobian(func, v, fd_step, method):
    n = v.shape[0]
    if method == "complex":
        h = np.full(n, 1e-20)
        W = v.astype(complex)[:, None] + 1j * np.diag(h)
        return func(W).imag / h
    if method != "central":
        raise ValueError(f"unknown method {method!r}")

    def build(hh):
        return np.concatenate([v[:, None] + np.diag(hh), v[:, None] - np.diag(hh)], axis=1)

    W, h = _with_shrinking(v, fd_step, build)
    out = func(W)
    return (out[:, :n] - out[:, n:]) / (2.0 * h)


def flux_jacobians(U, params, fd_step: float = 1e-5, method: str = "central"):
    """``(DGa, DGb)``, each n x n."""
    v = as_vector(U).astype(float)
    check_admissible(v)
    args = _law_args(law_for(system_of(v), params))
    both = _jacobian(lambda W: np.concatenate(_K.fluxes(W, *args)), v, fd_step, method)
    n = v.shape[0]
    return both[:n], both[n:]


def jacobian_flux(U, nu, params, fd_step: float = 1e-5, method: str = "central") -> np.ndarray:
    _check_direction(nu)
    ja, jb = flux_jacobians(U, params, fd_step, method)
    return nu[0] * ja + nu[1] * jb


def xi_jacobian(U, params, fd_step: float = 1e-5, method: str = "complex") -> np.ndarray:
    v = as_vector(U).astype(float)
    args = _law_args(law_for(system_of(v), params))
    return _jacobian(lambda W: _K.xi(W, *args), v, fd_step, method)


def analytic_jacobian_elasto(U, nu, params) -> np.ndarray:
    """Closed-form ``nu_a DGa + nu_b DGb`` for elasto7."""
    v = as_vector(U)
    if v.shape != (7,):
        raise ValueError("analytic Jacobian is available for elasto7 only")
    ux, uy, J, fxa, fxb, fya, fyb = v
    na, nb = nu
    ucm, ratio, gamma = _law_args(law_for("elasto7", params))
    p = _K.pressure(J, ucm, ratio, gamma)
    dp = _K.pressure_slope(J, ucm, ratio, gamma)
    exc = fyb * na - fya * nb
    eyc = -fxb * na + fxa * nb
    D = np.zeros((7, 7))
    D[0, 2], D[0, 3], D[0, 4], D[0, 5], D[0, 6] = dp * exc, -na, -nb, -p * nb, p * na
    D[1, 2], D[1, 3], D[1, 4], D[1, 5], D[1, 6] = dp * eyc, p * nb, -p * na, -na, -nb
    D[2, 0], D[2, 1] = -exc, -eyc
    D[2, 3], D[2, 4], D[2, 5], D[2, 6] = -uy * nb, uy * na, ux * nb, -ux * na
    D[3, 0], D[4, 0], D[5, 1], D[6, 1] = -na, -nb, -na, -nb
    return D


def _check_direction(nu):
    if not math.isclose(math.hypot(nu[0], nu[1]), 1.0, rel_tol=1e-12):
        raise ValueError("direction must be a unit vector")


def generalized_speeds(K: np.ndarray, H: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``K r = sigma H r`` for symmetric K and SPD H, ascending."""
    try:
        L = np.linalg.cholesky(H)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("entropy Hessian is not positive definite") from exc
    Ks = 0.5 * (K + K.T)
    X = np.linalg.solve(L, Ks)
    C = np.linalg.solve(L, X.T).T
    return np.sort(np.linalg.eigvalsh(0.5 * (C + C.T)))


def assemble_symmetric(U, nu, params, with_xi: bool = True, fd_step: float = 1e-5,
                       hessian: np.ndarray | None = None, jacobians=None,
                       xi_jac: np.ndarray | None = None) -> SymmetrizerReport:
    """Build ``H DG_nu + D Xi^T M_nu`` and audit it.

    ``hessian``, ``jacobians`` (the pair ``(DGa, DGb)``) and ``xi_jac`` may be
    precomputed when the same state is audited along several directions.
    """
    _check_direction(nu)
    v = as_vector(U).astype(float)
    system = system_of(v)
    H = hessian_eta(v, params, fd_step) if hessian is None else hessian
    ja, jb = flux_jacobians(v, params, method="complex") if jacobians is None else jacobians
    DG = nu[0] * ja + nu[1] * jb
    dxi = xi_jacobian(v, params) if xi_jac is None else xi_jac
    M = involutions(system).along(nu)
    corr = dxi.T @ M if with_xi else np.zeros_like(DG)
    K = H @ DG + corr
    scale = max(float(np.abs(K).max()), 1e-300)
    defect = float(np.abs(K - K.T).max()) / scale
    hmin = float(np.linalg.eigvalsh(H).min())
    speeds = list(generalized_speeds(K, H)) if hmin > 0 else []
    return SymmetrizerReport(tuple(nu), H, DG, corr, K, defect, hmin, speeds)


def wave_speeds(U, nu, params) -> list:
    """Characteristic speeds along ``nu``, ascending.

    A semi-definite Hessian (``d1_sq = 0`` makes the entropy independent of
    detF) falls back to the real eigenvalues of the flux Jacobian.
    """
    report = assemble_symmetric(U, nu, params)
    if report.hessian_min_eig > 0:
        return report.speeds
    scale = max(float(np.abs(report.hessian).max()), 1.0)
    if report.hessian_min_eig < -1e-8 * scale:
        raise NotPositiveDefinite("entropy Hessian is not positive definite")
    ev = np.linalg.eigvals(report.jacobian)
    if np.abs(ev.imag).max() > 1e-8 * max(1.0, np.abs(ev).max()):
        raise NotPositiveDefinite("entropy Hessian is singular and the Jacobian has complex speeds")
    return list(np.sort(ev.real))


def max_speed_closed_form(U, nu, params) -> float:
    """``sqrt(nu.A.nu + |p'(J)| |Cof(F) nu|^2)``, A = I for elasto7."""
    v = as_vector(U)
    check_admissible(v)
    ucm, ratio, gamma = _law_args(law_for(system_of(v), params))
    fxa, fxb, fya, fyb = v[3:7]
    na, nb = nu
    c_sq = (fyb * na - fya * nb) ** 2 + (-fxb * na + fxa * nb) ** 2
    k = abs(_K.pressure_slope(v[2], ucm, ratio, gamma))
    if v.shape[0] == 10:
        aaa, aab, abb = _K.a_from_y(v[7], v[8], v[9])
        a_nn = aaa * na * na + 2 * aab * na * nb + abb * nb * nb
    else:
        a_nn = 1.0
    return float(math.sqrt(a_nn + k * c_sq))


def elasto_speed_closed_form(U, nu, params) -> float:
    """``sqrt(1 + c^2 (dp)^2 / kappa)`` with ``kappa = d^2 e / dJ^2 = -dp``."""
    v = as_vector(U)
    if v.shape != (7,):
        raise ValueError("elasto7 state expected")
    check_admissible(v)
    ucm, ratio, gamma = _law_args(law_for("elasto7", params))
    fxa, fxb, fya, fyb = v[3:7]
    na, nb = nu
    c_sq = (fyb * na - fya * nb) ** 2 + (-fxb * na + fxa * nb) ** 2
    dp = _K.pressure_slope(v[2], ucm, ratio, gamma)
    if dp == 0.0:
        return 1.0
    kappa = -dp
    return float(math.sqrt(1.0 + c_sq * dp * dp / kappa))


def directions(count: int = 8):
    return [(math.cos(2 * math.pi * k / count), math.sin(2 * math.pi * k / count))
            for k in range(count)]


def random_state(system: str, rng: np.random.Generator, detf_range=(0.5, 2.0),
                 y_eig_range=(0.25, 4.0), u_max: float = 1.0, stretch=(2 / 3, 1.5),
                 detf_mismatch: float = 0.05) -> np.ndarray:
    """Random admissible state.

    F = sqrt(J') R(theta) diag(s, 1/s) R(phi) with J' within ``detf_mismatch``
    of the stored J, so det2(F) and J differ slightly as on a discrete grid.
    """
    J = rng.uniform(*detf_range)
    th, ph = rng.uniform(0.0, 2 * math.pi, 2)
    s = rng.uniform(*stretch)

    def rot(t):
        return np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])

    jf = J * (1.0 + rng.uniform(-detf_mismatch, detf_mismatch))
    F = math.sqrt(jf) * rot(th) @ np.diag([s, 1.0 / s]) @ rot(ph)
    ang = rng.uniform(0.0, 2 * math.pi)
    speed = u_max * math.sqrt(rng.uniform(0.0, 1.0))
    out = [speed * math.cos(ang), speed * math.sin(ang), J, F[0, 0], F[0, 1], F[1, 0], F[1, 1]]
    if system == "ucm10":
        ev = rng.uniform(*y_eig_range, size=2)
        Q = rot(rng.uniform(0.0, math.pi))
        Y = Q @ np.diag(ev) @ Q.T
        out += [Y[0, 0], 0.5 * (Y[0, 1] + Y[1, 0]), Y[1, 1]]
    return np.array(out)
