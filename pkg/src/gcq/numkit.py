"""Dense complex linear algebra primitives.

Determinants, Hermitian eigendecompositions, Haar-random unitaries and the
Takagi factorization of complex symmetric matrices, with explicit numeric
contracts. Everything is a pure function of its inputs; randomness enters
only through explicit integer seeds, so results are reproducible and safe
to compute concurrently.
"""

import warnings

import numpy as np
import scipy.linalg as sla

from .errors import DimensionError, ValidationError

HERM_TOL = 1e-10
SYM_TOL = 1e-10


def _as_complex_matrix(mat, name="matrix"):
    arr = np.asarray(mat, dtype=np.complex128)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-dimensional, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite entries")
    return arr


def determinant(mat):
    """Determinant of a square complex matrix via pivoted LU.

    The value is the signed product of the U-factor diagonal, so triangular
    inputs (no elimination, no pivoting) come out exact.

    Parameters
    ----------
    mat : (n, n) array_like
        Square matrix, n >= 1.

    Returns
    -------
    complex
    """
    arr = _as_complex_matrix(mat)
    n, m = arr.shape
    if n != m or n < 1:
        raise DimensionError(f"determinant needs a square matrix, got {arr.shape}")
    if n == 1:
        return complex(arr[0, 0])
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # singular inputs simply give 0
        lu, piv = sla.lu_factor(arr, check_finite=False)
    det = complex(np.prod(np.diag(lu)))
    swaps = int(np.count_nonzero(piv != np.arange(n)))
    return -det if swaps % 2 else det


def hermitian_eig(mat):
    """Spectral decomposition H = V diag(w) V^dag of a Hermitian matrix.

    The input is symmetrized internally; deviations from hermiticity above
    1e-10 (max-entry norm) are rejected. Eigenvalues come back sorted in
    descending order with the eigenvector columns matching.

    Returns
    -------
    (w, V) : ((n,) float array, (n, n) complex array)
    """
    arr = _as_complex_matrix(mat)
    n, m = arr.shape
    if n != m:
        raise DimensionError(f"hermitian_eig needs a square matrix, got {arr.shape}")
    dev = np.abs(arr - arr.conj().T).max() if n else 0.0
    if dev > HERM_TOL:
        raise ValidationError(f"matrix is not Hermitian within {HERM_TOL} (dev {dev:.2e})")
    herm = (arr + arr.conj().T) / 2.0
    w, v = np.linalg.eigh(herm)
    return w[::-1].copy(), np.ascontiguousarray(v[:, ::-1])


def haar_unitary(m, seed):
    """Haar-distributed random m x m unitary, deterministic in the seed.

    A complex Ginibre matrix is orthonormalized by QR and the diagonal of R
    is phase-fixed, which makes the distribution exactly Haar rather than
    merely unitary. Identical seeds give bit-identical matrices.
    """
    if m < 1:
        raise DimensionError(f"dimension must be >= 1, got {m}")
    rng = np.random.default_rng(_check_seed(seed))
    z = (rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def _check_seed(seed):
    seed = int(seed)
    if seed < 0:
        raise ValidationError(f"seed must be non-negative, got {seed}")
    return seed % (1 << 64)


def takagi(sym):
    """Takagi factorization S = U diag(lam) U^T of a complex symmetric matrix.

    lam are the singular values of S in descending order (all >= 0) and U is
    unitary. Implementation: SVD of S, then the standard square-root phase
    correction on the non-null block; exact zero singular values are split
    off first so rank-deficient inputs stay stable.

    Returns
    -------
    (U, lam) : ((n, n) complex array, (n,) float array)
    """
    arr = _as_complex_matrix(sym)
    n, m = arr.shape
    if n != m:
        raise DimensionError(f"takagi needs a square matrix, got {arr.shape}")
    dev = np.abs(arr - arr.T).max() if n else 0.0
    if dev > SYM_TOL * max(1.0, np.abs(arr).max()):
        raise ValidationError(f"matrix is not symmetric within tolerance (dev {dev:.2e})")
    arr = (arr + arr.T) / 2.0
    u, s, vh = np.linalg.svd(arr)
    if n == 0 or s[0] == 0.0:
        return np.eye(n, dtype=np.complex128), np.zeros(n)
    rank = int(np.count_nonzero(s > s[0] * 1e-13))
    ur = u[:, :rank]
    # unitary E = ur^dag conj(V_r) satisfies E Sigma = Sigma E^T; its
    # principal square root carries the phases onto a single factor
    ek = ur.conj().T @ vh[:rank, :].T
    fk = sla.sqrtm(ek)
    big_u = np.concatenate([ur @ fk, u[:, rank:]], axis=1)
    lam = np.concatenate([s[:rank], np.zeros(n - rank)])
    return np.ascontiguousarray(big_u), lam


def complete_isometry(cols):
    """Extend an n x k isometry to a full n x n unitary (first k columns kept)."""
    cols = _as_complex_matrix(cols, "isometry")
    n, k = cols.shape
    if k > n:
        raise DimensionError(f"isometry has more columns than rows: {cols.shape}")
    dev = np.abs(cols.conj().T @ cols - np.eye(k)).max() if k else 0.0
    if dev > 1e-9:
        raise ValidationError(f"columns are not orthonormal (dev {dev:.2e})")
    if k == n:
        return cols.copy()
    proj = np.eye(n, dtype=np.complex128) - cols @ cols.conj().T
    w, v = np.linalg.eigh((proj + proj.conj().T) / 2.0)
    comp = v[:, ::-1][:, : n - k]
    out = np.concatenate([cols, comp], axis=1)
    # one orthonormalization pass to clean the complement
    q, r = np.linalg.qr(out)
    diag = np.diag(r)
    q = q * (diag / np.abs(diag))
    q[:, :k] = cols
    return q
