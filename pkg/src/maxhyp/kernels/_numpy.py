"""Vectorized numpy kernels.

Every state array is component-first, ``U.shape == (nvar, *batch)``, in the
canonical ordering ``(ux, uy, J, Fxa, Fxb, Fya, Fyb[, Yaa, Yab, Ybb])``.
The point-wise functions avoid in-place tricks and real-only ufuncs so they
also accept complex arrays (complex-step differentiation).
"""

from __future__ import annotations

import numpy as np

UX, UY, J, FXA, FXB, FYA, FYB, YAA, YAB, YBB = range(10)


def a_from_y(yaa, yab, ybb):
    """``Y**(-1/2)`` for 2x2 SPD Y, componentwise."""
    s = np.sqrt(yaa * ybb - yab * yab)
    delta = np.sqrt(yaa + ybb + 2.0 * s)
    w = 1.0 / (delta * s)
    return (ybb + s) * w, -yab * w, (yaa + s) * w


def y_from_a(aaa, aab, abb):
    """``A**(-2)`` for 2x2 SPD A, componentwise."""
    det = aaa * abb - aab * aab
    iaa, iab, ibb = abb / det, -aab / det, aaa / det
    return iaa * iaa + iab * iab, iab * (iaa + ibb), iab * iab + ibb * ibb


def pressure(Jv, ucm, ratio, gamma):
    p = ratio * Jv ** (-gamma)
    if ucm:
        p = p + 1.0 / Jv
    return p


def pressure_slope(Jv, ucm, ratio, gamma):
    dp = -gamma * ratio * Jv ** (-gamma - 1.0)
    if ucm:
        dp = dp - 1.0 / (Jv * Jv)
    return dp


def _fa(U):
    fxa, fxb, fya, fyb = U[FXA], U[FXB], U[FYA], U[FYB]
    if U.shape[0] == 7:
        return fxa, fxb, fya, fyb
    aaa, aab, abb = a_from_y(U[YAA], U[YAB], U[YBB])
    return (fxa * aaa + fxb * aab, fxa * aab + fxb * abb,
            fya * aaa + fyb * aab, fya * aab + fyb * abb)


def fluxes(U, ucm, ratio, gamma):
    """Fluxes ``(Ga, Gb)`` of ``dU/dt + d_a Ga + d_b Gb = 0``.

    ``ucm`` selects the pressure law (``1/J`` term on); the A-weighted stress
    is used whenever U carries the Y block (10 components).
    """
    ux, uy, Jv = U[UX], U[UY], U[J]
    fxa, fxb, fya, fyb = U[FXA], U[FXB], U[FYA], U[FYB]
    p = pressure(Jv, ucm, ratio, gamma)
    sxa, sxb, sya, syb = _fa(U)
    zero = np.zeros_like(ux)
    ga = [fyb * p - sxa, -fxb * p - sya, fxb * uy - fyb * ux, -ux, zero, -uy, zero]
    gb = [-fya * p - sxb, fxa * p - syb, fya * ux - fxa * uy, zero, -ux, zero, -uy]
    if U.shape[0] == 10:
        ga += [zero, zero, zero]
        gb += [zero, zero, zero]
    return np.stack(ga), np.stack(gb)


def xi(U, ucm, ratio, gamma):
    p = pressure(U[J], ucm, ratio, gamma)
    return np.stack([p * U[UY], -p * U[UX]])


def entropy(U, ucm, ratio, gamma):
    """Mathematical entropy ``|u|^2/2 + e`` in units ``c1_sq * rho_hat = 1``.

    For UCM this is the explicit Lagrangian energy, which omits the
    ``log det A`` contribution of the thermodynamic free energy.
    """
    ux, uy, Jv = U[UX], U[UY], U[J]
    fxa, fxb, fya, fyb = U[FXA], U[FXB], U[FYA], U[FYB]
    vol = -ratio / (1.0 - gamma) * Jv ** (1.0 - gamma)
    if ucm:
        vol = vol - np.log(Jv)
    kin = 0.5 * (ux * ux + uy * uy)
    if U.shape[0] == 7:
        return kin + 0.5 * (fxa * fxa + fxb * fxb + fya * fya + fyb * fyb - 2.0) + vol
    aaa, aab, abb = a_from_y(U[YAA], U[YAB], U[YBB])
    tr_c = (aaa * (fxa * fxa + fya * fya) + 2.0 * aab * (fxa * fxb + fya * fyb)
            + abb * (fxb * fxb + fyb * fyb))
    return kin + 0.5 * tr_c + vol


def energy(U, ucm, ratio, gamma):
    """Total (kinetic + thermodynamic free) energy density, same units."""
    eta = entropy(U, ucm, ratio, gamma)
    if U.shape[0] == 7:
        return eta
    return eta + 0.25 * np.log(U[YAA] * U[YBB] - U[YAB] * U[YAB])


def conformation(U):
    """``c = F A F^T`` components ``(xx, xy, yy)``."""
    aaa, aab, abb = a_from_y(U[YAA], U[YAB], U[YBB])
    fxa, fxb, fya, fyb = U[FXA], U[FXB], U[FYA], U[FYB]
    cxx = aaa * fxa * fxa + 2 * aab * fxa * fxb + abb * fxb * fxb
    cxy = aaa * fxa * fya + aab * (fxa * fyb + fxb * fya) + abb * fxb * fyb
    cyy = aaa * fya * fya + 2 * aab * fya * fyb + abb * fyb * fyb
    return cxx, cxy, cyy


def sym_eigs(sxx, sxy, syy):
    m = 0.5 * (sxx + syy)
    r = np.hypot(0.5 * (sxx - syy), sxy)
    return m + r, m - r


def dissipation(cxx, cxy, cyy):
    """``(I - c^-1):(c - I)`` summed spectrally, nonnegative for SPD c."""
    l1, l2 = sym_eigs(cxx, cxy, cyy)
    return (l1 - 1.0) ** 2 / l1 + (l2 - 1.0) ** 2 / l2


def speeds(U, ucm, ratio, gamma):
    """Largest characteristic speed along the a and b axes per cell."""
    Jv = U[J]
    fxa, fxb, fya, fyb = U[FXA], U[FXB], U[FYA], U[FYB]
    k = np.abs(pressure_slope(Jv, ucm, ratio, gamma))
    if U.shape[0] == 10:
        aaa, _, abb = a_from_y(U[YAA], U[YAB], U[YBB])
    else:
        aaa = abb = 1.0
    sa = np.sqrt(aaa + k * (fyb * fyb + fxb * fxb))
    sb = np.sqrt(abb + k * (fya * fya + fxa * fxa))
    return sa, sb


def flux_divergence(U, ucm, ratio, gamma, ha, hb, dissipative):
    """``-(d_a Ga + d_b Gb)`` on a periodic grid, ``U.shape == (nvar, nx, ny)``.

    Interface flux is ``(G_L + G_R)/2 - s (U_R - U_L)/2`` with the local
    Rusanov speed ``s``, or ``s = 0`` (central differences) when
    ``dissipative`` is false.
    """
    ga, gb = fluxes(U, ucm, ratio, gamma)
    out = np.empty_like(U)
    if dissipative:
        sa, sb = speeds(U, ucm, ratio, gamma)
    for axis, g, h in ((1, ga, ha), (2, gb, hb)):
        gr = np.roll(g, -1, axis=axis)
        face = 0.5 * (g + gr)
        if dissipative:
            s_cell = sa if axis == 1 else sb
            s = np.maximum(s_cell, np.roll(s_cell, -1, axis=axis - 1))
            face = face - 0.5 * s * (np.roll(U, -1, axis=axis) - U)
        div = (face - np.roll(face, 1, axis=axis)) / h
        if axis == 1:
            out[...] = -div
        else:
            out -= div
    return out


def relax(U, dt, lam):
    """Exact relaxation of A toward ``F^-1 F^-T`` over ``dt`` with F frozen; returns new U."""
    fxa, fxb, fya, fyb = U[FXA], U[FXB], U[FYA], U[FYB]
    maa = fxa * fxa + fya * fya
    mab = fxa * fxb + fya * fyb
    mbb = fxb * fxb + fyb * fyb
    det = maa * mbb - mab * mab
    baa, bab, bbb = mbb / det, -mab / det, maa / det
    aaa, aab, abb = a_from_y(U[YAA], U[YAB], U[YBB])
    w = np.exp(-dt / lam)
    aaa = baa + (aaa - baa) * w
    aab = bab + (aab - bab) * w
    abb = bbb + (abb - bbb) * w
    out = U.copy()
    out[YAA], out[YAB], out[YBB] = y_from_a(aaa, aab, abb)
    return out
