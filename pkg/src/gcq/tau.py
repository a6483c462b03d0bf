"""Completely symmetric determinant tensors of ensembles.

For an ensemble {chi_k} of d x d states, entry (k_1..k_d) of the tensor is
d^(d/2)/d! times the permutation sum of determinants of row-blended
coefficient matrices (coefficients are the conjugated amplitudes). The
tensor transforms covariantly when the ensemble is transformed through an
isometry, its diagonal entries satisfy |t_kk..k|^(2/d) = G(chi_k), and for
d = 2 it reduces (up to a global sign) to the spin-flip overlap matrix.

`diagonalize` hunts for a unitary congruence that concentrates the tensor
on its diagonal. For d = 2 this is exact via the Takagi factorization; for
d > 2 it is a seeded manifold search whose final off-diagonal Frobenius
norm is reported as the certificate, never a proof of non-diagonalizability.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numkit
from ._backend import kernels
from .errors import CapacityError, DimensionError, ValidationError
from .states import Ensemble, transform_ensemble
from .unitary_opt import OptimizerConfig, flat_starts, search_unitary

CAPACITY = 10**7
MEMBER_TOL = 1e-8  # residual <= MEMBER_TOL * ||tau|| certifies a diagonal form


def _check_capacity(m, d):
    if m**d > CAPACITY:
        raise CapacityError(f"dense tensor of size {m}^{d} exceeds the {CAPACITY} guard")


@dataclass(frozen=True, eq=False)
class TauTensor:
    """Dense symmetric tensor with member count m and rank d = local dim."""

    entries: np.ndarray
    source: Ensemble = field(default=None, compare=False)

    def __post_init__(self):
        arr = np.array(self.entries, dtype=np.complex128, copy=True)
        if arr.ndim < 2:
            raise DimensionError("tensor rank (local dimension) must be >= 2")
        m = arr.shape[0]
        if arr.shape != (m,) * arr.ndim:
            raise DimensionError(f"tensor must be hypercubic, got shape {arr.shape}")
        _check_capacity(m, arr.ndim)
        scale = max(np.abs(arr).max(), 1.0)
        for axis in range(arr.ndim - 1):
            swapped = np.swapaxes(arr, axis, axis + 1)
            if np.abs(arr - swapped).max() > 1e-10 * scale:
                raise ValidationError("tensor is not symmetric under index permutations")
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def d(self):
        return self.entries.ndim

    @property
    def m(self):
        return self.entries.shape[0]

    @property
    def norm(self):
        return float(np.linalg.norm(self.entries.reshape(-1)))

    def diagonal(self):
        idx = np.arange(self.m)
        return self.entries[tuple([idx] * self.d)]


@dataclass(frozen=True, eq=False)
class DiagonalForm:
    """Best diagonal form found for a tensor: t' = contract(t, unitary).

    lam holds the non-negative descending diagonal magnitudes, residual the
    Frobenius norm of the off-diagonal part of t', and member is set when
    residual <= 1e-8 * ||t||. The generating ensemble travels along so
    derived decompositions can be materialized.
    """

    unitary: np.ndarray
    lam: np.ndarray
    residual: float
    d: int
    tau_norm: float
    member: bool
    source: Ensemble = field(default=None, compare=False)

    @property
    def m(self):
        return self.unitary.shape[0]

    def achieved_avg_g(self):
        """Ensemble-average G of the decomposition behind this form,
        sum lam^(2/d); equals the assisted maximum when member is True."""
        return float(np.sum(self.lam ** (2.0 / self.d)))


def build_tau(ens):
    """Symmetric determinant tensor of an ensemble (dense, m^d entries)."""
    m, d = ens.m, ens.d
    if d < 2:
        raise DimensionError("local dimension must be >= 2")
    _check_capacity(m, d)
    coeffs = np.conj(ens.amps())
    return TauTensor(kernels.build_tau(coeffs), source=ens)


def contract_tau(t, iso):
    """Transform the tensor by an isometry: t'_(l..) = prod U_(l k) t_(k..).

    iso must have orthonormal columns (m' x m, m' >= m); the source
    ensemble, when attached, is transformed consistently.
    """
    iso = np.asarray(iso, dtype=np.complex128)
    if iso.ndim != 2 or iso.shape[1] != t.m or iso.shape[0] < iso.shape[1]:
        raise DimensionError(f"isometry shape {iso.shape} does not fit tensor m={t.m}")
    dev = np.abs(iso.conj().T @ iso - np.eye(t.m)).max()
    if dev > 1e-10:
        raise ValidationError(f"columns are not orthonormal within 1e-10 (dev {dev:.2e})")
    _check_capacity(iso.shape[0], t.d)
    arr = t.entries
    for _ in range(t.d):
        arr = np.tensordot(arr, iso, axes=([0], [1]))
    src = transform_ensemble(t.source, iso) if t.source is not None else None
    return TauTensor(arr, source=src)


def _offdiag_residual(arr):
    off = np.array(arr, copy=True)
    idx = np.arange(arr.shape[0])
    off[tuple([idx] * arr.ndim)] = 0.0
    return float(np.linalg.norm(off.reshape(-1)))


def _full_contract(arr, u):
    out = arr
    for _ in range(arr.ndim):
        out = np.tensordot(out, u, axes=([0], [1]))
    return out


def _phase_align_and_sort(arr, u):
    """Row phases and ordering making the diagonal real, >= 0, descending."""
    d = arr.ndim
    tvals, _ = kernels.diag_and_pregrad(arr, u)
    phases = np.where(np.abs(tvals) > 0, np.exp(-1j * np.angle(tvals) / d), 1.0)
    u = phases[:, None] * u
    tvals = np.abs(tvals)
    order = np.argsort(-tvals, kind="stable")
    return tvals[order], np.ascontiguousarray(u[order])


def _hosvd_start(arr):
    unfold = arr.reshape(arr.shape[0], -1)
    u, _, _ = np.linalg.svd(unfold, full_matrices=True)
    return u.conj().T


def diagonalize(t, cfg=None):
    """Search for a unitary congruence concentrating t on its diagonal.

    d = 2 uses the exact Takagi route (residual at rounding level). For
    d > 2 the off-diagonal Frobenius mass is minimized by the shared
    manifold search, starting from the identity, the higher-order SVD
    basis, flat-modulus unitaries and seeded Haar restarts. Membership in
    the diagonalizable class is asserted iff the final residual is at most
    1e-8 * ||t||; non-membership of the search is a result, not an error.
    """
    cfg = cfg or OptimizerConfig()
    arr = t.entries
    m, d = t.m, t.d
    tnorm = t.norm
    if tnorm == 0.0:
        return DiagonalForm(np.eye(m, dtype=np.complex128), np.zeros(m), 0.0, d,
                            0.0, True, source=t.source)
    if d == 2:
        q, lam = numkit.takagi(arr)
        u = q.conj().T
    else:
        total = tnorm**2
        target = total - (cfg.tol * tnorm) ** 2

        def diag_mass(u):
            tvals, svals = kernels.diag_and_pregrad(arr, u)
            value = float(np.sum(np.abs(tvals) ** 2))
            egrad = d * tvals[:, None] * np.conj(svals)
            return value, egrad

        starts = [np.eye(m, dtype=np.complex128), _hosvd_start(arr)]
        starts.extend(flat_starts(m))
        res = search_unitary(
            diag_mass, m, seed=cfg.seed, restarts=cfg.restarts,
            max_iters=cfg.max_iters, stall_limit=cfg.stall_limit,
            target=target, starts=starts,
        )
        u = res.unitary
    lam, u = _phase_align_and_sort(arr, u)
    transformed = _full_contract(arr, u)
    residual = _offdiag_residual(transformed)
    member = residual <= MEMBER_TOL * tnorm
    return DiagonalForm(u, lam, residual, d, tnorm, member, source=t.source)


def flat_unitary(d):
    """d^2 x d^2 unitary whose entries all have modulus 1/d and whose d-th
    powers all equal d^-d (tensor square of the discrete Fourier matrix)."""
    if d < 2:
        raise DimensionError("dimension must be >= 2")
    grid = np.arange(d)
    f = np.exp(2j * np.pi * np.outer(grid, grid) / d)
    return np.kron(f, f) / d


def zero_sum_phases(lam):
    """Phases th with sum lam_k exp(i th_k) = 0.

    Requires the polygon condition max(lam) <= sum of the rest. The values
    are split greedily into three groups closed by a triangle, so the
    cancellation is exact up to rounding.
    """
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1 or lam.size < 2:
        raise DimensionError("need at least two values")
    if np.any(lam < 0):
        raise ValidationError("values must be non-negative")
    order = np.argsort(-lam, kind="stable")
    if lam[order[0]] > lam[order[1:]].sum() + 1e-12 * max(lam.sum(), 1.0):
        raise ValidationError("largest value exceeds the sum of the rest; no cancellation")
    group = np.zeros(lam.size, dtype=int)
    s1 = s2 = 0.0
    for idx in order[1:]:
        if s1 <= s2:
            group[idx] = 1
            s1 += lam[idx]
        else:
            group[idx] = 2
            s2 += lam[idx]
    sides = np.array([lam[order[0]], s1, s2])
    angles = np.zeros(3)
    if sides[0] > 0 and sides[1] > 0:
        cosv = np.clip((sides[0] ** 2 + sides[1] ** 2 - sides[2] ** 2)
                       / (2.0 * sides[0] * sides[1]), -1.0, 1.0)
        angles[1] = np.pi - np.arccos(cosv)
    closing = sides[0] * np.exp(1j * angles[0]) + sides[1] * np.exp(1j * angles[1])
    if abs(closing) > 0:
        angles[2] = np.angle(-closing)
    return angles[group]


def cancellation_decomposition(df, thetas):
    """Decomposition with d^2 members of equal G set by the given phases.

    Every member's G-concurrence equals |sum_k lam_k exp(i theta_k)|^(2/d)
    divided by d^2 (lam zero-padded to d^2 values). Requires a certified
    diagonal form with its generating ensemble attached.
    """
    if not df.member:
        raise ValidationError("cancellation needs a certified diagonal form")
    if df.source is None:
        raise ValidationError("diagonal form carries no generating ensemble")
    d = df.d
    big = d * d
    thetas = np.asarray(thetas, dtype=float)
    if thetas.shape != (big,):
        raise DimensionError(f"need exactly {big} phases, got {thetas.shape}")
    if df.m > big:
        raise ValidationError(f"cancellation supports at most d^2 = {big} members")
    iso = cancellation_isometry(df, thetas)
    return transform_ensemble(df.source, iso)


def cancellation_isometry(df, thetas):
    """The d^2 x m isometry realizing the phase-cancellation decomposition."""
    d = df.d
    big = d * d
    thetas = np.asarray(thetas, dtype=float)
    phase = np.exp(1j * thetas / d)  # principal d-th root per diagonal entry
    embed = np.zeros((big, df.m), dtype=np.complex128)
    embed[: df.m, : df.m] = np.eye(df.m)
    return (flat_unitary(d) * phase[None, :]) @ embed @ df.unitary


def padded_lam(df):
    """Diagonal values zero-padded to d^2 entries (the cancellation size)."""
    big = df.d * df.d
    lam = np.zeros(big)
    take = min(df.m, big)
    lam[:take] = df.lam[:take]
    return lam
