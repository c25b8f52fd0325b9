"""Energies, pressure laws and stress measures.

The Lagrangian systems are written per unit reference mass with the
normalization ``c1_sq * rho_hat == 1`` in their fluxes; the functions here
keep ``c1_sq`` explicit so they can be cross-checked by finite differences
for any admissible constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import NonpositiveArgument, NonpositiveVolume, NotPositiveDefinite, ValidationError
from .tensor_core import SymTensor2, Tensor2, cofactor2, congruence, det2, frob, sym_part


@dataclass(frozen=True)
class ElasticParams:
    c1_sq: float = 1.0
    d1_sq: float = 1.0
    gamma: float = 2.0
    rho_hat: float = 1.0
    dim: int = field(default=2, init=False)

    def __post_init__(self):
        if not self.c1_sq > 0:
            raise ValidationError("c1_sq must be > 0", "c1_sq")
        if not self.d1_sq >= 0:
            raise ValidationError("d1_sq must be >= 0", "d1_sq")
        if not self.gamma > 1:
            raise ValidationError("gamma must be > 1", "gamma")
        if not self.rho_hat > 0:
            raise ValidationError("rho_hat must be > 0", "rho_hat")

    @property
    def ratio(self) -> float:
        """``d1_sq / c1_sq``, the only stiffness constant left after normalization."""
        return self.d1_sq / self.c1_sq


@dataclass(frozen=True)
class MaxwellParams:
    elastic: ElasticParams = field(default_factory=ElasticParams)
    lam: float = math.inf

    def __post_init__(self):
        if not self.lam > 0:
            raise ValidationError("lambda must be > 0", "lambda")

    @property
    def mu_dot(self) -> float:
        return self.lam * self.elastic.c1_sq

    @property
    def frozen(self) -> bool:
        return math.isinf(self.lam)


class PressureKind(Enum):
    ELASTO = "elasto_comp_neo_hookean"
    UCM = "ucm_lagrangian"
    POLYTROPIC = "polytropic"


@dataclass(frozen=True)
class PressureLaw:
    kind: PressureKind
    ratio: float = 1.0
    gamma: float = 2.0
    c0: float = 1.0

    @classmethod
    def elasto(cls, p: ElasticParams) -> "PressureLaw":
        return cls(PressureKind.ELASTO, ratio=p.ratio, gamma=p.gamma)

    @classmethod
    def ucm(cls, p: ElasticParams) -> "PressureLaw":
        return cls(PressureKind.UCM, ratio=p.ratio, gamma=p.gamma)

    @classmethod
    def polytropic(cls, c0: float, gamma: float) -> "PressureLaw":
        return cls(PressureKind.POLYTROPIC, gamma=gamma, c0=c0)


def _check_positive(v: float) -> None:
    if not v > 0:
        raise NonpositiveArgument(f"pressure argument must be > 0, got {v}")


def pressure(law: PressureLaw, v: float) -> float:
    """Evaluate the law at ``v`` (|F| for the Lagrangian laws, rho for polytropic)."""
    _check_positive(v)
    if law.kind is PressureKind.ELASTO:
        return law.ratio * v ** (-law.gamma)
    if law.kind is PressureKind.UCM:
        return 1.0 / v + law.ratio * v ** (-law.gamma)
    return law.c0 * v**law.gamma


def pressure_derivative(law: PressureLaw, v: float) -> float:
    _check_positive(v)
    g = law.gamma
    if law.kind is PressureKind.ELASTO:
        return -g * law.ratio * v ** (-g - 1.0)
    if law.kind is PressureKind.UCM:
        return -1.0 / v**2 - g * law.ratio * v ** (-g - 1.0)
    return g * law.c0 * v ** (g - 1.0)


def _check_volume(detF: float) -> None:
    if not detF > 0:
        raise NonpositiveVolume(f"detF must be > 0, got {detF}")


def energy_neo_hookean(F: Tensor2, p: ElasticParams) -> float:
    return 0.5 * p.c1_sq * (frob(F, F) - 2.0)


def volumetric_energy(detF: float, p: ElasticParams) -> float:
    _check_volume(detF)
    return -p.d1_sq / (1.0 - p.gamma) * detF ** (1.0 - p.gamma)


def energy_comp_neo_hookean(F: Tensor2, detF: float, p: ElasticParams) -> float:
    return energy_neo_hookean(F, p) + volumetric_energy(detF, p)


def energy_ucm(F: Tensor2, A: SymTensor2, detF: float, p: MaxwellParams) -> float:
    """Free energy of the Maxwell fluid per unit mass.

    ``(c1/2)(tr c - log det c) + e0(detF)`` with ``c = F A F^T``; ``det F`` inside
    ``log det c`` is taken as the independent volume ratio ``detF`` so that
    ``-de/d(detF)`` reproduces the pressure law ``1/J + (d1/c1) J**-gamma``
    (in units of c1).
    """
    _check_volume(detF)
    if not (A.det() > 0 and A.trace() > 0):
        raise NotPositiveDefinite("A is not positive definite")
    e = p.elastic
    trace_c = congruence(F, A).trace()
    log_det_c = math.log(A.det()) + 2.0 * math.log(detF)
    return 0.5 * e.c1_sq * (trace_c - log_det_c) + volumetric_energy(detF, e)


def piola_stress(system: str, F: Tensor2, detF: float, A: SymTensor2 | None, params) -> Tensor2:
    """First Piola-Kirchhoff stress per unit reference density.

    ``system`` is ``"elasto7"`` (``params``: ElasticParams) or ``"ucm10"``
    (``params``: MaxwellParams or ElasticParams, ``A`` required).
    """
    _check_volume(detF)
    e = params.elastic if isinstance(params, MaxwellParams) else params
    C = cofactor2(F).as_matrix()
    f = F.as_matrix()
    if system == "elasto7":
        if A is not None:
            raise ValueError("elasto7 stress takes no A")
        s = e.c1_sq * f - e.d1_sq * detF ** (-e.gamma) * C
    elif system == "ucm10":
        if A is None:
            raise ValueError("ucm10 stress requires A")
        pr = pressure(PressureLaw.ucm(e), detF)
        s = e.c1_sq * (f @ A.as_matrix() - pr * C)
    else:
        raise ValueError(f"unknown system {system!r}")
    return Tensor2.from_matrix(s)


def extra_stress_tau(rho: float, F: Tensor2, A: SymTensor2, c1_sq: float) -> SymTensor2:
    if not (A.det() > 0 and A.trace() > 0):
        raise NotPositiveDefinite("A is not positive definite")
    c = congruence(F, A)
    s = rho * c1_sq
    return SymTensor2(s * (c.aa - 1.0), s * c.ab, s * (c.bb - 1.0))


def cauchy_from_piola(S: Tensor2, F: Tensor2) -> Tensor2:
    J = det2(F)
    _check_volume(J)
    return Tensor2.from_matrix(S.as_matrix() @ F.as_matrix().T / J)


def push_forward(S: Tensor2, F: Tensor2, detF: float, rho_hat: float):
    """Eulerian density and Cauchy stress from Lagrangian fields.

    ``S`` is per unit reference density, so the physical Piola stress is
    ``rho_hat * S``.
    """
    _check_volume(detF)
    rho = rho_hat / detF
    sigma = Tensor2.from_matrix(rho_hat * S.as_matrix() @ F.as_matrix().T / det2(F))
    return rho, sigma


def newtonian_tau(grad_u: Tensor2, mu_dot: float, ell: float) -> SymTensor2:
    D = sym_part(grad_u)
    tr = D.aa + D.bb
    return SymTensor2(2 * mu_dot * D.aa + ell * tr, 2 * mu_dot * D.ab, 2 * mu_dot * D.bb + ell * tr)


def fd_piola(energy, F: Tensor2, h: float | None = None) -> Tensor2:
    """Central finite-difference gradient of ``energy(F)`` in each F component."""
    f = F.as_matrix()
    if h is None:
        h = 1e-5 * max(1.0, float(np.abs(f).max()))
    g = np.zeros((2, 2))
    for i in range(2):
        for j in range(2):
            fp = f.copy()
            fm = f.copy()
            fp[i, j] += h
            fm[i, j] -= h
            g[i, j] = (energy(Tensor2.from_matrix(fp)) - energy(Tensor2.from_matrix(fm))) / (2 * h)
    return Tensor2.from_matrix(g)
