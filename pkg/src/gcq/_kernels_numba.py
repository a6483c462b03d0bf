"""Numba-compiled implementations of the hot numeric kernels.

Same contracts as ``gcq._kernels_numpy``. The inner loops dominate the
runtime of tensor construction and of the unitary-manifold searches, so
they are written as explicit loops with small-matrix LU helpers instead
of batched LAPACK calls.
"""

import itertools
import math

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def _det_lu(mat):
    # destructive in-place LU determinant with partial pivoting
    n = mat.shape[0]
    det = 1.0 + 0.0j
    for c in range(n):
        p = c
        big = abs(mat[c, c])
        for r in range(c + 1, n):
            v = abs(mat[r, c])
            if v > big:
                big = v
                p = r
        if big == 0.0:
            return 0.0 + 0.0j
        if p != c:
            for cc in range(n):
                tmp = mat[c, cc]
                mat[c, cc] = mat[p, cc]
                mat[p, cc] = tmp
            det = -det
        piv = mat[c, c]
        det *= piv
        for r in range(c + 1, n):
            f = mat[r, c] / piv
            for cc in range(c + 1, n):
                mat[r, cc] -= f * mat[c, cc]
    return det


@njit(cache=True)
def _det_inv(mat, inv):
    # Gauss-Jordan with partial pivoting; fills inv, returns det (0 if singular)
    n = mat.shape[0]
    for i in range(n):
        for j in range(n):
            inv[i, j] = 1.0 + 0.0j if i == j else 0.0 + 0.0j
    det = 1.0 + 0.0j
    for c in range(n):
        p = c
        big = abs(mat[c, c])
        for r in range(c + 1, n):
            v = abs(mat[r, c])
            if v > big:
                big = v
                p = r
        if big == 0.0:
            return 0.0 + 0.0j
        if p != c:
            for cc in range(n):
                tmp = mat[c, cc]
                mat[c, cc] = mat[p, cc]
                mat[p, cc] = tmp
                tmp = inv[c, cc]
                inv[c, cc] = inv[p, cc]
                inv[p, cc] = tmp
            det = -det
        piv = mat[c, c]
        det *= piv
        for cc in range(n):
            mat[c, cc] /= piv
            inv[c, cc] /= piv
        for r in range(n):
            if r == c:
                continue
            f = mat[r, c]
            if f != 0.0:
                for cc in range(n):
                    mat[r, cc] -= f * mat[c, cc]
                    inv[r, cc] -= f * inv[c, cc]
    return det


@njit(cache=True)
def _build_tau_flat(coeffs, perms, fac):
    m, d, _ = coeffs.shape
    nperm = perms.shape[0]
    size = m**d
    out = np.empty(size, dtype=np.complex128)
    idx = np.empty(d, dtype=np.int64)
    srt = np.empty(d, dtype=np.int64)
    scratch = np.empty((d, d), dtype=np.complex128)
    for off in range(size):
        t = off
        for i in range(d - 1, -1, -1):
            idx[i] = t % m
            t //= m
        nondecreasing = True
        for i in range(d - 1):
            if idx[i] > idx[i + 1]:
                nondecreasing = False
                break
        if not nondecreasing:
            # symmetry: copy from the sorted tuple, already visited
            for i in range(d):
                srt[i] = idx[i]
            srt.sort()
            soff = 0
            for i in range(d):
                soff = soff * m + srt[i]
            out[off] = out[soff]
            continue
        acc = 0.0 + 0.0j
        for p in range(nperm):
            for i in range(d):
                k = idx[perms[p, i]]
                for j in range(d):
                    scratch[i, j] = coeffs[k, i, j]
            acc += _det_lu(scratch)
        out[off] = fac * acc
    return out


def build_tau(coeffs):
    """Dense completely-symmetric determinant tensor; see numpy twin."""
    coeffs = np.ascontiguousarray(coeffs, dtype=np.complex128)
    m, d, _ = coeffs.shape
    perms = np.array(list(itertools.permutations(range(d))), dtype=np.int64)
    fac = d ** (d / 2.0) / math.factorial(d)
    flat = _build_tau_flat(coeffs, perms, fac)
    return flat.reshape((m,) * d)


@njit(cache=True)
def _diag_pregrad(tau_flat, m, d, rows_v):
    m2 = rows_v.shape[0]
    t = np.empty(m2, dtype=np.complex128)
    s = np.empty((m2, m), dtype=np.complex128)
    buf = np.empty(m ** (d - 1), dtype=np.complex128)
    for l in range(m2):
        u = rows_v[l]
        sz = m ** (d - 1)
        for j in range(sz):
            acc = 0.0 + 0.0j
            base = j * m
            for k in range(m):
                acc += tau_flat[base + k] * u[k]
            buf[j] = acc
        for _ in range(d - 2):
            sz //= m
            for j in range(sz):
                acc = 0.0 + 0.0j
                base = j * m
                for k in range(m):
                    acc += buf[base + k] * u[k]
                buf[j] = acc
        acc = 0.0 + 0.0j
        for k in range(m):
            s[l, k] = buf[k]
            acc += buf[k] * u[k]
        t[l] = acc
    return t, s


def diag_and_pregrad(tau, rows_v):
    """Fully and (d-1)-fold contracted row values; see numpy twin."""
    tau = np.ascontiguousarray(tau, dtype=np.complex128)
    rows_v = np.ascontiguousarray(rows_v, dtype=np.complex128)
    return _diag_pregrad(tau.reshape(-1), tau.shape[0], tau.ndim, rows_v)


@njit(cache=True)
def _avg_g_terms(amps, wrows, g, egrad):
    m2, n = wrows.shape
    d = amps.shape[1]
    B = np.empty((d, d), dtype=np.complex128)
    work = np.empty((d, d), dtype=np.complex128)
    inv = np.empty((d, d), dtype=np.complex128)
    ex = 2.0 / d
    for l in range(m2):
        scale = 0.0
        for i in range(d):
            for j in range(d):
                acc = 0.0 + 0.0j
                for k in range(n):
                    acc += wrows[l, k] * amps[k, i, j]
                B[i, j] = acc
                a = abs(acc)
                if a > scale:
                    scale = a
        for i in range(d):
            for j in range(d):
                work[i, j] = B[i, j]
        det = _det_inv(work, inv)
        absdet = abs(det)
        g[l] = d * absdet**ex
        if scale < 1e-30:
            scale = 1e-30
        if absdet > 1e-30 * scale**d:
            w = absdet**ex
            for k in range(n):
                acc = 0.0 + 0.0j
                for i in range(d):
                    for j in range(d):
                        acc += inv[j, i] * amps[k, i, j]
                egrad[l, k] = w * acc
        else:
            for k in range(n):
                egrad[l, k] = 0.0 + 0.0j


def avg_g_terms(amps, wrows):
    """Per-member G values and gradient pieces; see numpy twin."""
    amps = np.ascontiguousarray(amps, dtype=np.complex128)
    wrows = np.ascontiguousarray(wrows, dtype=np.complex128)
    g = np.empty(wrows.shape[0], dtype=np.float64)
    egrad = np.empty(wrows.shape, dtype=np.complex128)
    _avg_g_terms(amps, wrows, g, egrad)
    return g, egrad
