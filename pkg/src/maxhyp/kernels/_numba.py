"""Numba twins of the grid kernels in ``_numpy``.

Loops are per cell with no cross-cell reductions, so results do not depend on
the number of threads.
"""

from __future__ import annotations

import math
import os

import numba
import numpy as np
from numba import njit, prange

if "NUMBA_THREADING_LAYER" not in os.environ:
    numba.config.THREADING_LAYER = "workqueue"


@njit(cache=True, inline="always", error_model="numpy")
def _a_from_y(yaa, yab, ybb):
    s = math.sqrt(yaa * ybb - yab * yab)
    delta = math.sqrt(yaa + ybb + 2.0 * s)
    w = 1.0 / (delta * s)
    return (ybb + s) * w, -yab * w, (yaa + s) * w


@njit(cache=True, inline="always", error_model="numpy")
def _cell_flux(U, i, j, ucm, ratio, gamma, ga, gb):
    ux = U[0, i, j]
    uy = U[1, i, j]
    Jv = U[2, i, j]
    fxa = U[3, i, j]
    fxb = U[4, i, j]
    fya = U[5, i, j]
    fyb = U[6, i, j]
    p = ratio * Jv ** (-gamma)
    if ucm:
        p += 1.0 / Jv
    if U.shape[0] == 10:
        aaa, aab, abb = _a_from_y(U[7, i, j], U[8, i, j], U[9, i, j])
        sxa = fxa * aaa + fxb * aab
        sxb = fxa * aab + fxb * abb
        sya = fya * aaa + fyb * aab
        syb = fya * aab + fyb * abb
    else:
        sxa = fxa
        sxb = fxb
        sya = fya
        syb = fyb
    ga[0, i, j] = fyb * p - sxa
    ga[1, i, j] = -fxb * p - sya
    ga[2, i, j] = fxb * uy - fyb * ux
    ga[3, i, j] = -ux
    ga[4, i, j] = 0.0
    ga[5, i, j] = -uy
    ga[6, i, j] = 0.0
    gb[0, i, j] = -fya * p - sxb
    gb[1, i, j] = fxa * p - syb
    gb[2, i, j] = fya * ux - fxa * uy
    gb[3, i, j] = 0.0
    gb[4, i, j] = -ux
    gb[5, i, j] = 0.0
    gb[6, i, j] = -uy
    for k in range(7, ga.shape[0]):
        ga[k, i, j] = 0.0
        gb[k, i, j] = 0.0


@njit(cache=True, inline="always", error_model="numpy")
def _cell_speeds(U, i, j, ucm, ratio, gamma):
    Jv = U[2, i, j]
    fxa = U[3, i, j]
    fxb = U[4, i, j]
    fya = U[5, i, j]
    fyb = U[6, i, j]
    k = gamma * ratio * Jv ** (-gamma - 1.0)
    if ucm:
        k += 1.0 / (Jv * Jv)
    if U.shape[0] == 10:
        aaa, aab, abb = _a_from_y(U[7, i, j], U[8, i, j], U[9, i, j])
    else:
        aaa = 1.0
        abb = 1.0
    return math.sqrt(aaa + k * (fyb * fyb + fxb * fxb)), math.sqrt(abb + k * (fya * fya + fxa * fxa))


@njit(cache=True, parallel=True, error_model="numpy")
def fluxes(U, ucm, ratio, gamma):
    nvar, nx, ny = U.shape
    ga = np.empty_like(U)
    gb = np.empty_like(U)
    for i in prange(nx):
        for j in range(ny):
            _cell_flux(U, i, j, ucm, ratio, gamma, ga, gb)
    return ga, gb


@njit(cache=True, parallel=True, error_model="numpy")
def speeds(U, ucm, ratio, gamma):
    nvar, nx, ny = U.shape
    sa = np.empty((nx, ny))
    sb = np.empty((nx, ny))
    for i in prange(nx):
        for j in range(ny):
            sa[i, j], sb[i, j] = _cell_speeds(U, i, j, ucm, ratio, gamma)
    return sa, sb


@njit(cache=True, parallel=True, error_model="numpy")
def flux_divergence(U, ucm, ratio, gamma, ha, hb, dissipative):
    nvar, nx, ny = U.shape
    ga, gb = fluxes(U, ucm, ratio, gamma)
    if dissipative:
        sa, sb = speeds(U, ucm, ratio, gamma)
    else:
        sa = np.zeros((nx, ny))
        sb = np.zeros((nx, ny))
    # face k+1/2 flux along each axis, stored at cell k
    fa = np.empty_like(U)
    fb = np.empty_like(U)
    for i in prange(nx):
        ip = (i + 1) % nx
        for k in range(nvar):
            for j in range(ny):
                jp = (j + 1) % ny
                s_a = max(sa[i, j], sa[ip, j])
                s_b = max(sb[i, j], sb[i, jp])
                fa[k, i, j] = 0.5 * (ga[k, i, j] + ga[k, ip, j]) - 0.5 * s_a * (U[k, ip, j] - U[k, i, j])
                fb[k, i, j] = 0.5 * (gb[k, i, j] + gb[k, i, jp]) - 0.5 * s_b * (U[k, i, jp] - U[k, i, j])
    out = np.empty_like(U)
    for i in prange(nx):
        im = (i - 1) % nx
        for k in range(nvar):
            for j in range(ny):
                jm = (j - 1) % ny
                out[k, i, j] = -(fa[k, i, j] - fa[k, im, j]) / ha - (fb[k, i, j] - fb[k, i, jm]) / hb
    return out


@njit(cache=True, parallel=True, error_model="numpy")
def relax(U, dt, lam):
    nvar, nx, ny = U.shape
    out = U.copy()
    w = math.exp(-dt / lam)
    for i in prange(nx):
        for j in range(ny):
            fxa = U[3, i, j]
            fxb = U[4, i, j]
            fya = U[5, i, j]
            fyb = U[6, i, j]
            maa = fxa * fxa + fya * fya
            mab = fxa * fxb + fya * fyb
            mbb = fxb * fxb + fyb * fyb
            det = maa * mbb - mab * mab
            baa = mbb / det
            bab = -mab / det
            bbb = maa / det
            aaa, aab, abb = _a_from_y(U[7, i, j], U[8, i, j], U[9, i, j])
            aaa = baa + (aaa - baa) * w
            aab = bab + (aab - bab) * w
            abb = bbb + (abb - bbb) * w
            d = aaa * abb - aab * aab
            iaa = abb / d
            iab = -aab / d
            ibb = aaa / d
            out[7, i, j] = iaa * iaa + iab * iab
            out[8, i, j] = iab * (iaa + ibb)
            out[9, i, j] = iab * iab + ibb * ibb
    return out
