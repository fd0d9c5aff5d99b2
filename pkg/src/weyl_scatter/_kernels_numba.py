"""Numba-compiled evaluation kernels for the special-function layer.

Scalar transcriptions of the algorithms in ``_kernels_numpy`` (same series,
same switch radii, same truncation rules), compiled into ufuncs with
``numba.vectorize``. Importing this module requires numba; the backend
selector catches the ImportError and falls back to the numpy table.
"""

from __future__ import annotations

import cmath
import math

import numba
import numpy as np

from ._anchors import (
    ANCHOR_CJ,
    ANCHOR_CY,
    ANCHOR_START,
    ANCHOR_STEP,
    EULER_GAMMA,
    GAP_HI,
    GAP_LO,
)
from ._kernels_numpy import (
    I_SERIES_TERMS,
    I_SWITCH,
    J_SERIES_TERMS,
    JY_ASYM_TERMS,
    K_ASYM_TERMS,
    K_SERIES_TERMS,
    K_SWITCH,
)

_VEC_KWARGS = {"nopython": True, "cache": True}
_TWO_OVER_PI = 2.0 / math.pi
_ANCH_CJ = np.ascontiguousarray(ANCHOR_CJ)
_ANCH_CY = np.ascontiguousarray(ANCHOR_CY)
_N_ANCH = _ANCH_CJ.shape[0]
_DEG = _ANCH_CJ.shape[1] - 1


@numba.njit(cache=True)
def _j0_series_s(x):
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    comp = 0.0
    for m in range(1, J_SERIES_TERMS + 1):
        term *= -q / (m * m)
        y = term - comp
        tmp = total + y
        comp = (tmp - total) - y
        total = tmp
    return total


@numba.njit(cache=True)
def _j1_series_s(x):
    q = 0.25 * x * x
    term = 1.0
    total = 1.0
    comp = 0.0
    for m in range(1, J_SERIES_TERMS + 1):
        term *= -q / (m * (m + 1))
        y = term - comp
        tmp = total + y
        comp = (tmp - total) - y
        total = tmp
    return 0.5 * x * total


@numba.njit(cache=True)
def _y0_series_s(x):
    q = 0.25 * x * x
    lg = math.log(0.5 * x) + EULER_GAMMA
    c = 1.0
    total = lg
    comp = 0.0
    h = 0.0
    for m in range(1, J_SERIES_TERMS + 1):
        c *= -q / (m * m)
        h += 1.0 / m
        t = c * (lg - h)
        y = t - comp
        tmp = total + y
        comp = (tmp - total) - y
        total = tmp
    return _TWO_OVER_PI * total


@numba.njit(cache=True)
def _y1_series_s(x):
    q = 0.25 * x * x
    lg = math.log(0.5 * x)
    c = 1.0
    total = 0.0
    comp = 0.0
    h = 0.0
    for m in range(0, J_SERIES_TERMS + 1):
        if m > 0:
            c *= -q / (m * (m + 1))
            h += 1.0 / m
        hm1 = h + 1.0 / (m + 1)
        t = c * (lg - 0.5 * (h + hm1) + EULER_GAMMA)
        y = t - comp
        tmp = total + y
        comp = (tmp - total) - y
        total = tmp
    return _TWO_OVER_PI * (0.5 * x * total - 1.0 / x)


@numba.njit(cache=True)
def _jy_large_s(x, nu):
    mu = 4.0 * nu * nu
    t = 1.0 + 0.0j
    total = t
    prev_mag = 1.0
    for m in range(1, JY_ASYM_TERMS + 1):
        t_new = t * (1j * (mu - (2 * m - 1) ** 2) / (8.0 * m * x))
        mag = abs(t_new)
        if mag >= prev_mag:
            break
        t = t_new
        total += t_new
        prev_mag = mag
    omega = x - (2 * nu + 1) * math.pi / 4.0
    amp = math.sqrt(_TWO_OVER_PI / x)
    cw = math.cos(omega)
    sw = math.sin(omega)
    jv = amp * (total.real * cw - total.imag * sw)
    yv = amp * (total.real * sw + total.imag * cw)
    return jv, yv


@numba.njit(cache=True)
def _anchor_eval_s(x, table):
    idx = int(round((x - ANCHOR_START) / ANCHOR_STEP))
    if idx < 0:
        idx = 0
    elif idx >= _N_ANCH:
        idx = _N_ANCH - 1
    h = x - (ANCHOR_START + ANCHOR_STEP * idx)
    val = 0.0
    der = 0.0
    for m in range(_DEG, -1, -1):
        der = der * h + val
        val = val * h + table[idx, m]
    return val, der


@numba.vectorize(["float64(float64)"], **_VEC_KWARGS)
def j0(x):
    if x <= GAP_LO:
        return _j0_series_s(x)
    if x <= GAP_HI:
        val, _ = _anchor_eval_s(x, _ANCH_CJ)
        return val
    jv, _ = _jy_large_s(x, 0.0)
    return jv


@numba.vectorize(["float64(float64)"], **_VEC_KWARGS)
def y0(x):
    if x <= GAP_LO:
        return _y0_series_s(x)
    if x <= GAP_HI:
        val, _ = _anchor_eval_s(x, _ANCH_CY)
        return val
    _, yv = _jy_large_s(x, 0.0)
    return yv


@numba.vectorize(["float64(float64)"], **_VEC_KWARGS)
def j1(x):
    if x <= GAP_LO:
        return _j1_series_s(x)
    if x <= GAP_HI:
        _, der = _anchor_eval_s(x, _ANCH_CJ)
        return -der
    jv, _ = _jy_large_s(x, 1.0)
    return jv


@numba.vectorize(["float64(float64)"], **_VEC_KWARGS)
def y1(x):
    if x <= GAP_LO:
        return _y1_series_s(x)
    if x <= GAP_HI:
        _, der = _anchor_eval_s(x, _ANCH_CY)
        return -der
    _, yv = _jy_large_s(x, 1.0)
    return yv


@numba.njit(cache=True)
def _k0_series_s(w):
    q = 0.25 * w * w
    lg = cmath.log(0.5 * w)
    c = 1.0 + 0.0j
    total = -EULER_GAMMA - lg
    comp = 0.0 + 0.0j
    h = 0.0
    for m in range(1, K_SERIES_TERMS + 1):
        c *= q / (m * m)
        h += 1.0 / m
        t = c * (h - EULER_GAMMA - lg)
        y = t - comp
        tmp = total + y
        comp = (tmp - total) - y
        total = tmp
    return total


@numba.njit(cache=True)
def _k1_series_s(w):
    q = 0.25 * w * w
    lg = cmath.log(0.5 * w)
    c = 1.0 + 0.0j
    total = 0.0 + 0.0j
    comp = 0.0 + 0.0j
    h = 0.0
    for m in range(0, K_SERIES_TERMS + 1):
        if m > 0:
            c *= q / (m * (m + 1))
            h += 1.0 / m
        hm1 = h + 1.0 / (m + 1)
        t = c * (lg - 0.5 * (h + hm1) + EULER_GAMMA)
        y = t - comp
        tmp = total + y
        comp = (tmp - total) - y
        total = tmp
    return 1.0 / w + 0.5 * w * total


@numba.njit(cache=True)
def _k_asym_sum_s(w, mu):
    t = 1.0 + 0.0j
    total = t
    prev_mag = 1.0
    for m in range(1, K_ASYM_TERMS + 1):
        t_new = t * ((mu - (2 * m - 1) ** 2) / (8.0 * m * w))
        mag = abs(t_new)
        if mag >= prev_mag:
            break
        t = t_new
        total += t_new
        prev_mag = mag
    return total


@numba.vectorize(["complex128(complex128)"], **_VEC_KWARGS)
def k0(w):
    if abs(w) <= K_SWITCH:
        return _k0_series_s(w)
    return cmath.sqrt(0.5 * math.pi / w) * cmath.exp(-w) * _k_asym_sum_s(w, 0.0)


@numba.vectorize(["complex128(complex128)"], **_VEC_KWARGS)
def k1(w):
    if abs(w) <= K_SWITCH:
        return _k1_series_s(w)
    return cmath.sqrt(0.5 * math.pi / w) * cmath.exp(-w) * _k_asym_sum_s(w, 4.0)


@numba.njit(cache=True)
def _i_series_s(w, nu):
    q = 0.25 * w * w
    term = 1.0 + 0.0j
    total = term
    for m in range(1, I_SERIES_TERMS + 1):
        term *= q / (m * (m + nu))
        total += term
    if nu == 1:
        return 0.5 * w * total
    return total


@numba.njit(cache=True)
def _i_asym_sum_s(w, mu, sign):
    t = 1.0 + 0.0j
    total = t
    prev_mag = 1.0
    for m in range(1, K_ASYM_TERMS + 1):
        t_new = t * (sign * (mu - (2 * m - 1) ** 2) / (8.0 * m * w))
        mag = abs(t_new)
        if mag >= prev_mag:
            break
        t = t_new
        total += t_new
        prev_mag = mag
    return total


@numba.njit(cache=True)
def _i_large_s(w, nu):
    mu = 4.0 * nu * nu
    dom = cmath.exp(w) * _i_asym_sum_s(w, mu, -1.0)
    if w.imag > 0:
        rho = 1j
    elif w.imag < 0:
        rho = -1j
    else:
        rho = 0j
    if nu == 1:
        rho = -rho
    rec = rho * cmath.exp(-w) * _i_asym_sum_s(w, mu, 1.0)
    return (dom + rec) / cmath.sqrt(2.0 * math.pi * w)


@numba.vectorize(["complex128(complex128)"], **_VEC_KWARGS)
def i0(w):
    if abs(w) <= I_SWITCH:
        return _i_series_s(w, 0)
    return _i_large_s(w, 0)


@numba.vectorize(["complex128(complex128)"], **_VEC_KWARGS)
def i1(w):
    if abs(w) <= I_SWITCH:
        return _i_series_s(w, 1)
    return _i_large_s(w, 1)
