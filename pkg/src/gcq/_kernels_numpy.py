"""Pure-numpy implementations of the hot numeric kernels.

Mirrors ``gcq._kernels_numba``; the active module is chosen in
``gcq._backend`` (override with GCQ_BACKEND=numpy|numba). Functions here
accept and return plain complex128 ndarrays and do no input validation;
the public modules are responsible for that.
"""

import itertools
import math

import numpy as np

NAME = "numpy"


def _perm_table(d):
    return np.array(list(itertools.permutations(range(d))), dtype=np.intp)


def build_tau(coeffs):
    """Dense completely-symmetric determinant tensor of an ensemble.

    coeffs: (m, d, d) coefficient matrices, one per ensemble member.
    Entry (k_1..k_d) is d^(d/2)/d! times the sum, over permutations s of
    the rows, of det(M) with M[i, :] = coeffs[k_{s(i)}, i, :]. Only sorted
    index tuples are evaluated; the rest are filled by symmetry.
    """
    m, d, _ = coeffs.shape
    fac = d ** (d / 2.0) / math.factorial(d)
    perms = _perm_table(d)
    combos = np.array(
        list(itertools.combinations_with_replacement(range(m), d)), dtype=np.intp
    )
    sel = combos[:, perms]  # (S, P, d): member feeding row i
    rows = np.arange(d, dtype=np.intp)
    blend = coeffs[sel, rows[None, None, :], :]  # (S, P, d, d)
    vals = fac * np.linalg.det(blend).sum(axis=1)

    shape = (m,) * d
    size = m**d
    lookup = np.zeros(size, dtype=np.intp)
    lookup[np.ravel_multi_index(tuple(combos.T), shape)] = np.arange(len(combos))
    full = np.stack(np.unravel_index(np.arange(size), shape), axis=1)
    full.sort(axis=1)
    out = vals[lookup[np.ravel_multi_index(tuple(full.T), shape)]]
    return np.ascontiguousarray(out.reshape(shape))


def diag_and_pregrad(tau, rows_v):
    """Fully and (d-1)-fold contracted row values of a symmetric tensor.

    tau: (m,)*d tensor; rows_v: (m2, m) complex row vectors.
    Returns (t, s) with t[l] the full contraction of tau with rows_v[l]
    repeated d times and s[l] the length-m vector left after d-1
    contractions (so t[l] = s[l] @ rows_v[l]).
    """
    d = tau.ndim
    letters = "abcdefghij"[:d]
    if d == 1:
        s = np.broadcast_to(tau, (rows_v.shape[0], tau.shape[0]))
    else:
        sub = (
            letters
            + ","
            + ",".join("z" + c for c in letters[: d - 1])
            + "->z"
            + letters[-1]
        )
        s = np.einsum(sub, tau, *([rows_v] * (d - 1)), optimize=True)
    t = np.einsum("zk,zk->z", s, rows_v)
    return t, np.ascontiguousarray(s)


def avg_g_terms(amps, wrows):
    """Per-member G values and gradient pieces for a blended ensemble.

    amps: (n, d, d) member amplitude matrices; wrows: (m2, n) mixing rows
    (already conjugated, so B[l] = sum_k wrows[l,k] amps[k]).
    Returns (g, egrad): g[l] = d*|det B[l]|^(2/d) and egrad[l,k] the
    derivative of sum(g) with respect to conj of the underlying unitary
    entry, i.e. |det B_l|^(2/d) * sum_ij (B_l^-1)^T_ij amps[k,i,j].
    """
    n, d, _ = amps.shape
    B = np.tensordot(wrows, amps, axes=(1, 0))
    dets = np.linalg.det(B)
    absdet = np.abs(dets)
    g = d * absdet ** (2.0 / d)
    egrad = np.zeros(wrows.shape, dtype=np.complex128)
    scale = np.abs(B).max() if B.size else 0.0
    ok = absdet > (1e-30 * max(scale, 1e-30) ** d)
    if np.any(ok):
        binv = np.linalg.inv(B[ok])
        egrad[ok] = absdet[ok, None] ** (2.0 / d) * np.einsum(
            "lji,kij->lk", binv, amps, optimize=True
        )
    return g, egrad
