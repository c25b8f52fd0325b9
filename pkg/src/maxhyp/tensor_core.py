"""Small dense tensor algebra in two dimensions.

Components of a two-point tensor are indexed by a spatial row (x|y) and a
material column (a|b), so ``Tensor2(xa, xb, ya, yb)`` is the matrix
``[[xa, xb], [ya, yb]]``.  Symmetric material tensors (A, Y) and symmetric
spatial tensors (c, tau) share :class:`SymTensor2`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NotPositiveDefinite, SingularTensor


@dataclass(frozen=True)
class Vec2:
    x: float
    y: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    @classmethod
    def from_array(cls, v) -> "Vec2":
        return cls(float(v[0]), float(v[1]))

    def norm(self) -> float:
        return math.hypot(self.x, self.y)


@dataclass(frozen=True)
class Tensor2:
    xa: float
    xb: float
    ya: float
    yb: float

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.xa, self.xb], [self.ya, self.yb]], dtype=float)

    @classmethod
    def from_matrix(cls, m) -> "Tensor2":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @classmethod
    def identity(cls) -> "Tensor2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def diag(cls, d0: float, d1: float) -> "Tensor2":
        return cls(d0, 0.0, 0.0, d1)

    def transpose(self) -> "Tensor2":
        return Tensor2(self.xa, self.ya, self.xb, self.yb)

    def max_abs(self) -> float:
        return max(abs(self.xa), abs(self.xb), abs(self.ya), abs(self.yb))


@dataclass(frozen=True)
class SymTensor2:
    aa: float
    ab: float
    bb: float

    def as_matrix(self) -> np.ndarray:
        return np.array([[self.aa, self.ab], [self.ab, self.bb]], dtype=float)

    @classmethod
    def from_matrix(cls, m, check: bool = True) -> "SymTensor2":
        m = np.asarray(m, dtype=float)
        if check and not np.isclose(m[0, 1], m[1, 0], rtol=1e-10, atol=1e-14):
            raise ValueError("matrix is not symmetric")
        return cls(m[0, 0], 0.5 * (m[0, 1] + m[1, 0]), m[1, 1])

    @classmethod
    def identity(cls) -> "SymTensor2":
        return cls(1.0, 0.0, 1.0)

    @classmethod
    def diag(cls, d0: float, d1: float) -> "SymTensor2":
        return cls(d0, 0.0, d1)

    def det(self) -> float:
        return self.aa * self.bb - self.ab * self.ab

    def trace(self) -> float:
        return self.aa + self.bb

    def max_abs(self) -> float:
        return max(abs(self.aa), abs(self.ab), abs(self.bb))

    def scaled(self, s: float) -> "SymTensor2":
        return SymTensor2(s * self.aa, s * self.ab, s * self.bb)


def _default_tol(scale: float) -> float:
    return 1e-12 * max(scale, 1e-300)


def det2(T: Tensor2) -> float:
    return T.xa * T.yb - T.xb * T.ya


def cofactor2(T: Tensor2) -> Tensor2:
    """Cofactor matrix, ``T @ cofactor2(T).T == det2(T) * I``."""
    return Tensor2(T.yb, -T.ya, -T.xb, T.xa)


def inverse2(T: Tensor2, tol: float | None = None) -> Tensor2:
    d = det2(T)
    if tol is None:
        tol = _default_tol(T.max_abs() ** 2)
    if not abs(d) > tol:
        raise SingularTensor(f"|det| = {abs(d):.3e} <= tol = {tol:.3e}")
    return Tensor2(T.yb / d, -T.xb / d, -T.ya / d, T.xa / d)


def matmul(P: Tensor2, Q: Tensor2) -> Tensor2:
    return Tensor2.from_matrix(P.as_matrix() @ Q.as_matrix())


def spd_eigendecomp(S: SymTensor2, tol: float | None = None):
    """Eigenvalues (descending) and orthonormal eigenvectors (as columns).

    Positivity is not checked here; ``tol`` is accepted for signature parity
    with the SPD functions and is unused.
    """
    w, v = np.linalg.eigh(S.as_matrix())
    order = np.argsort(w)[::-1]
    w = w[order]
    v = v[:, order]
    return (float(w[0]), float(w[1])), Tensor2.from_matrix(v)


def _check_spd(eigs, S: SymTensor2, tol: float | None) -> None:
    if tol is None:
        tol = _default_tol(S.max_abs())
    if not min(eigs) > tol:
        raise NotPositiveDefinite(f"min eigenvalue {min(eigs):.3e} <= tol = {tol:.3e}")


def spd_power(S: SymTensor2, power: float, tol: float | None = None) -> SymTensor2:
    """``S**power`` through the spectral decomposition; S must be SPD."""
    eigs, V = spd_eigendecomp(S)
    _check_spd(eigs, S, tol)
    v = V.as_matrix()
    out = v @ np.diag(np.power(eigs, power)) @ v.T
    return SymTensor2.from_matrix(out, check=False)


def spd_inv_sqrt(S: SymTensor2, tol: float | None = None) -> SymTensor2:
    return spd_power(S, -0.5, tol)


def a_from_y_closed_form(Y: SymTensor2) -> SymTensor2:
    """Closed-form adjugate of ``sqrt(Y)``.

    With ``Delta = det Y`` and ``delta = sqrt(tr Y + 2 sqrt(Delta))`` this
    returns ``[[Ybb + sqrt(Delta), -Yab], [-Yab, Yaa + sqrt(Delta)]] / delta``,
    which equals ``sqrt(Delta) * Y**(-1/2)``.  Divide by ``sqrt(det Y)`` to get
    the relaxation tensor A.
    """
    delta_sq_det = Y.det()
    if not (delta_sq_det > 0.0 and Y.trace() > 0.0):
        raise NotPositiveDefinite("Y is not positive definite")
    root = math.sqrt(delta_sq_det)
    delta = math.sqrt(Y.aa + Y.bb + 2.0 * root)
    return SymTensor2((Y.bb + root) / delta, -Y.ab / delta, (Y.aa + root) / delta)


def frob(P, Q) -> float:
    """Double contraction ``P : Q`` of two tensors of the same kind."""
    return float(np.sum(P.as_matrix() * Q.as_matrix()))


def sym_part(T: Tensor2) -> SymTensor2:
    return SymTensor2(T.xa, 0.5 * (T.xb + T.ya), T.yb)


def congruence(F: Tensor2, A: SymTensor2) -> SymTensor2:
    """``F A F^T``."""
    f = F.as_matrix()
    return SymTensor2.from_matrix(f @ A.as_matrix() @ f.T, check=False)
