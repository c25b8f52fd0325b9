"""Conserved states, fluxes, involutions and entropy of the 2D Lagrangian systems.

Two systems share the canonical component ordering
``(ux, uy, J, Fxa, Fxb, Fya, Fyb[, Yaa, Yab, Ybb])``:

* ``elasto7``: compressible neo-Hookean elastodynamics,
* ``ucm10``: the Maxwell fluid with the symmetrizing variable ``Y = A**-2``.

Fluxes are written in units ``c1_sq * rho_hat == 1``, so only the ratio
``d1_sq / c1_sq`` and ``gamma`` enter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import (
    NonpositiveRelaxationTime,
    NonpositiveVolume,
    NotPositiveDefinite,
    SingularTensor,
)
from .material import ElasticParams, MaxwellParams, PressureKind, PressureLaw
from .tensor_core import SymTensor2, Tensor2, Vec2, spd_power

SYSTEMS = {"elasto7": 7, "ucm10": 10}
COMPONENTS = ("ux", "uy", "J", "Fxa", "Fxb", "Fya", "Fyb", "Yaa", "Yab", "Ybb")


@dataclass(frozen=True)
class StateElasto7:
    u: Vec2
    detF: float
    F: Tensor2

    system = "elasto7"

    def to_vector(self) -> np.ndarray:
        F = self.F
        return np.array([self.u.x, self.u.y, self.detF, F.xa, F.xb, F.ya, F.yb], dtype=float)


@dataclass(frozen=True)
class StateUCM10:
    u: Vec2
    detF: float
    F: Tensor2
    Y: SymTensor2

    system = "ucm10"

    def to_vector(self) -> np.ndarray:
        F, Y = self.F, self.Y
        return np.array([self.u.x, self.u.y, self.detF, F.xa, F.xb, F.ya, F.yb, Y.aa, Y.ab, Y.bb],
                        dtype=float)

    @property
    def A(self) -> SymTensor2:
        return a_of_y(self.Y)


@dataclass(frozen=True)
class FluxPair:
    Ga: np.ndarray
    Gb: np.ndarray

    def along(self, nu) -> np.ndarray:
        return nu[0] * self.Ga + nu[1] * self.Gb


@dataclass(frozen=True)
class InvolutionSet:
    Ma: np.ndarray
    Mb: np.ndarray

    def along(self, nu) -> np.ndarray:
        return nu[0] * self.Ma + nu[1] * self.Mb


def state_from_vector(v):
    v = np.asarray(v, dtype=float)
    if v.shape not in ((7,), (10,)):
        raise ValueError(f"state vector must have 7 or 10 components, got {v.shape}")
    u = Vec2(v[0], v[1])
    F = Tensor2(v[3], v[4], v[5], v[6])
    if v.shape == (7,):
        return StateElasto7(u, float(v[2]), F)
    if v.shape == (10,):
        return StateUCM10(u, float(v[2]), F, SymTensor2(v[7], v[8], v[9]))
    raise ValueError(f"state vector must have 7 or 10 components, got {v.shape}")


def as_vector(U) -> np.ndarray:
    if isinstance(U, (StateElasto7, StateUCM10)):
        return U.to_vector()
    return np.asarray(U)


def system_of(U) -> str:
    n = as_vector(U).shape[0]
    for name, size in SYSTEMS.items():
        if size == n:
            return name
    raise ValueError(f"no system with {n} components")


def a_of_y(Y: SymTensor2) -> SymTensor2:
    """Relaxation tensor ``A = Y**(-1/2)``."""
    return spd_power(Y, -0.5)


def y_of_a(A: SymTensor2) -> SymTensor2:
    return spd_power(A, -2.0)


def _elastic(params) -> ElasticParams:
    return params.elastic if isinstance(params, MaxwellParams) else params


def law_for(system: str, params) -> PressureLaw:
    e = _elastic(params)
    return PressureLaw.ucm(e) if system == "ucm10" else PressureLaw.elasto(e)


def _law_args(law: PressureLaw):
    if law.kind is PressureKind.POLYTROPIC:
        raise ValueError("the Lagrangian systems take the elasto or ucm pressure law")
    return law.kind is PressureKind.UCM, law.ratio, law.gamma


def check_admissible(v: np.ndarray) -> None:
    if not np.all(np.isfinite(v)):
        raise NonpositiveVolume("state has non-finite components")
    if not v[2] > 0:
        raise NonpositiveVolume(f"detF must be > 0, got {v[2]}")
    if v.shape[0] == 10 and not (v[7] * v[9] - v[8] ** 2 > 0 and v[7] > 0):
        raise NotPositiveDefinite("Y is not positive definite")


def flux(U, law: PressureLaw) -> FluxPair:
    v = as_vector(U)
    check_admissible(v)
    ga, gb = kernels._numpy.fluxes(v, *_law_args(law))
    return FluxPair(ga, gb)


def flux_elasto(U, law: PressureLaw) -> FluxPair:
    v = as_vector(U)
    if v.shape != (7,):
        raise ValueError("flux_elasto expects a 7-component state")
    return flux(v, law)


def flux_ucm(U, law: PressureLaw) -> FluxPair:
    v = as_vector(U)
    if v.shape != (10,):
        raise ValueError("flux_ucm expects a 10-component state")
    return flux(v, law)


def involutions(system: str) -> InvolutionSet:
    """Constant matrices with ``Ma d_a U + Mb d_b U = curl F = 0``."""
    n = SYSTEMS[system]
    Ma = np.zeros((2, n))
    Mb = np.zeros((2, n))
    Ma[0, 4] = 1.0
    Ma[1, 6] = 1.0
    Mb[0, 3] = -1.0
    Mb[1, 5] = -1.0
    return InvolutionSet(Ma, Mb)


def xi(U, law: PressureLaw) -> Vec2:
    v = as_vector(U)
    check_admissible(v)
    x = kernels._numpy.xi(v, *_law_args(law))
    return Vec2(float(x[0]), float(x[1]))


def entropy_eta(U, params) -> float:
    v = as_vector(U)
    check_admissible(v)
    law = law_for(system_of(v), params)
    return float(kernels._numpy.entropy(v, *_law_args(law)))


def total_energy_density(U, params) -> float:
    """Kinetic plus thermodynamic free energy (includes ``-log det A / 2`` for ucm10)."""
    v = as_vector(U)
    check_admissible(v)
    law = law_for(system_of(v), params)
    return float(kernels._numpy.energy(v, *_law_args(law)))


def source_ucm(U, lam: float) -> np.ndarray:
    """Relaxation source in conserved variables.

    ``dA/dt = (F^-1 F^-T - A)/lam`` pulled back through ``Y = A**-2``:
    ``dY = -(A^-1 dA A^-2 + A^-2 dA A^-1)``.
    """
    if not lam > 0:
        raise NonpositiveRelaxationTime(f"lambda must be > 0, got {lam}")
    v = as_vector(U)
    out = np.zeros(v.shape[0])
    if math.isinf(lam):
        return out
    f = v[3:7].reshape(2, 2)
    d = f[0, 0] * f[1, 1] - f[0, 1] * f[1, 0]
    if d == 0.0:
        raise SingularTensor("F is singular")
    finv = np.linalg.inv(f)
    B = finv @ finv.T
    A = a_of_y(SymTensor2(v[7], v[8], v[9])).as_matrix()
    dA = (B - A) / lam
    ai = np.linalg.inv(A)
    ai2 = ai @ ai
    dY = -(ai @ dA @ ai2 + ai2 @ dA @ ai)
    out[7], out[8], out[9] = dY[0, 0], 0.5 * (dY[0, 1] + dY[1, 0]), dY[1, 1]
    return out
