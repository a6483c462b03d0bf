"""State representations and ensemble machinery.

Pure bipartite states are stored as their d x d amplitude matrix
(state = sum_ij amp[i,j] |i>|j>), tripartite states as a rank-3 amplitude
array, and density matrices over the product basis |i>|j> ordered i-major
(row index = i*dim_b + j). Ensembles follow the sub-normalized convention:
each member's squared norm is its probability, so probabilities are never
stored separately.

All objects are immutable after construction (arrays are copied and marked
read-only), so they can be shared freely between threads.
"""

from dataclasses import dataclass, field

import numpy as np

from . import numkit
from .errors import DimensionError, ValidationError

NORM_TOL = 1e-10
ENSEMBLE_TOL = 1e-9
RANK_CUTOFF = 1e-12


def _freeze(arr):
    out = np.array(arr, dtype=np.complex128, copy=True)
    if not np.all(np.isfinite(out)):
        raise ValidationError("amplitude data contains non-finite entries")
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class PureBipartite:
    """Pure (possibly sub-normalized) state of two d-dimensional systems."""

    amp: np.ndarray

    def __post_init__(self):
        arr = _freeze(self.amp)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise DimensionError(f"amplitude matrix must be square, got {arr.shape}")
        if arr.conj().ravel() @ arr.ravel() > 1.0 + NORM_TOL:
            raise ValidationError("squared norm exceeds 1 beyond tolerance")
        object.__setattr__(self, "amp", arr)

    @property
    def d(self):
        return self.amp.shape[0]

    @property
    def norm2(self):
        return float(np.real(self.amp.conj().ravel() @ self.amp.ravel()))

    def is_normalized(self, tol=NORM_TOL):
        return abs(self.norm2 - 1.0) <= tol

    def vector(self):
        """Flattened state vector in the i-major product basis."""
        return self.amp.reshape(-1)

    def projector(self):
        v = self.vector()
        return DensityMatrix(np.outer(v, v.conj()), self.d, self.d)


@dataclass(frozen=True, eq=False)
class PureTripartite:
    """Normalized pure state of systems with dimensions (d_a, d_b, n_s)."""

    amp: np.ndarray

    def __post_init__(self):
        arr = _freeze(self.amp)
        if arr.ndim != 3 or min(arr.shape) < 1:
            raise DimensionError(f"amplitude array must be rank 3, got {arr.shape}")
        nrm = np.real(arr.conj().ravel() @ arr.ravel())
        if abs(nrm - 1.0) > NORM_TOL:
            raise ValidationError(f"state is not normalized (norm^2 = {nrm})")
        object.__setattr__(self, "amp", arr)

    @property
    def dims(self):
        return self.amp.shape


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed state over the i-major product basis of a dim_a x dim_b system."""

    mat: np.ndarray
    dim_a: int
    dim_b: int

    def __post_init__(self):
        arr = _freeze(self.mat)
        n = self.dim_a * self.dim_b
        if arr.shape != (n, n):
            raise DimensionError(
                f"matrix shape {arr.shape} does not match dims ({self.dim_a},{self.dim_b})"
            )
        if np.abs(arr - arr.conj().T).max() > NORM_TOL:
            raise ValidationError("density matrix is not Hermitian within tolerance")
        tr = np.trace(arr).real
        if abs(tr - 1.0) > NORM_TOL:
            raise ValidationError(f"trace must be 1, got {tr}")
        if np.linalg.eigvalsh((arr + arr.conj().T) / 2.0).min() < -NORM_TOL:
            raise ValidationError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "mat", arr)

    @property
    def dim(self):
        return self.dim_a * self.dim_b


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Sub-normalized pure-state decomposition of a bipartite density matrix."""

    members: tuple
    source: DensityMatrix = field(default=None, compare=False)

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValidationError("ensemble needs at least one member")
        d = members[0].d
        if any(m.d != d for m in members):
            raise DimensionError("all ensemble members must share the local dimension")
        total = sum(m.norm2 for m in members)
        if abs(total - 1.0) > ENSEMBLE_TOL:
            raise ValidationError(f"member weights must sum to 1, got {total}")
        object.__setattr__(self, "members", members)
        if self.source is not None:
            recon = self.reconstruct()
            if np.abs(recon - self.source.mat).max() > ENSEMBLE_TOL:
                raise ValidationError("members do not reconstruct the source state")

    @property
    def m(self):
        return len(self.members)

    @property
    def d(self):
        return self.members[0].d

    def amps(self):
        """(m, d, d) array of member amplitude matrices."""
        return np.stack([mem.amp for mem in self.members])

    def reconstruct(self):
        vecs = np.stack([mem.vector() for mem in self.members])
        return vecs.T @ vecs.conj()

    def density_matrix(self):
        if self.source is not None:
            return self.source
        return DensityMatrix(self.reconstruct(), self.d, self.d)


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive operators on an n-dimensional space summing to the identity."""

    elements: tuple

    def __post_init__(self):
        elements = tuple(_freeze(e) for e in self.elements)
        if not elements:
            raise ValidationError("POVM needs at least one element")
        n = elements[0].shape[0]
        if any(e.shape != (n, n) for e in elements):
            raise DimensionError("POVM elements must be square and equally sized")
        total = np.sum(elements, axis=0)
        if np.abs(total - np.eye(n)).max() > NORM_TOL:
            raise ValidationError("POVM elements do not sum to the identity")
        for e in elements:
            if np.linalg.eigvalsh((e + e.conj().T) / 2.0).min() < -NORM_TOL:
                raise ValidationError("POVM element is not positive semidefinite")
        object.__setattr__(self, "elements", elements)

    @property
    def n(self):
        return self.elements[0].shape[0]

    @property
    def m(self):
        return len(self.elements)


def schmidt(psi):
    """Schmidt decomposition of a normalized pure bipartite state.

    Returns
    -------
    (coeffs, left, right)
        coeffs: descending non-negative Schmidt coefficients with
        sum(coeffs**2) = 1; left/right: orthonormal local bases as column
        matrices such that amp = left @ diag(coeffs) @ right.T ... i.e.
        state = sum_k coeffs[k] |left_k>|right_k>.
    """
    if not psi.is_normalized():
        raise ValidationError("schmidt requires a normalized state")
    u, s, vh = np.linalg.svd(psi.amp)
    return s, u, np.ascontiguousarray(vh.T)


def partial_trace(psi, keep):
    """Reduced density matrix of a pure tripartite state.

    keep is a pair of subsystem indices out of (0, 1, 2); the remaining
    subsystem is traced out. The result is ordered with keep[0] as the
    outer (i-major) factor.
    """
    keep = tuple(keep)
    if sorted(keep) not in ([0, 1], [0, 2], [1, 2]) or len(set(keep)) != 2:
        raise DimensionError(f"keep must select two distinct subsystems, got {keep}")
    drop = ({0, 1, 2} - set(keep)).pop()
    amp = psi.amp
    rho = np.tensordot(amp, amp.conj(), axes=([drop], [drop]))
    # axes now (keep_lo, keep_hi, keep_lo', keep_hi') in original order
    lo, hi = sorted(keep)
    if keep != (lo, hi):
        rho = rho.transpose(1, 0, 3, 2)
    da, db = psi.dims[keep[0]], psi.dims[keep[1]]
    return DensityMatrix(rho.reshape(da * db, da * db), da, db)


def eigen_ensemble(rho):
    """Spectral decomposition of rho as a sub-normalized ensemble.

    Members are eigenvectors scaled by the square root of their eigenvalue;
    eigenvalues below 1e-12 * trace are dropped, so the member count equals
    the numerical rank.
    """
    if rho.dim_a != rho.dim_b:
        raise DimensionError("eigen_ensemble needs equal local dimensions")
    w, v = numkit.hermitian_eig(rho.mat)
    cutoff = RANK_CUTOFF * np.trace(rho.mat).real
    members = []
    for k in range(w.size):
        if w[k] > cutoff:
            members.append(PureBipartite(np.sqrt(w[k]) * v[:, k].reshape(rho.dim_a, rho.dim_b)))
    return Ensemble(tuple(members), source=rho)


def transform_ensemble(ens, iso):
    """New decomposition of the same state through an isometry.

    iso is an m' x m matrix with orthonormal columns (m' >= m); the output
    members are chi_l = sum_k conj(iso[l, k]) phi_k, which leaves the
    reconstructed density matrix unchanged.
    """
    iso = np.asarray(iso, dtype=np.complex128)
    if iso.ndim != 2 or iso.shape[0] < iso.shape[1]:
        raise DimensionError(f"isometry must be m' x m with m' >= m, got {iso.shape}")
    if iso.shape[1] != ens.m:
        raise DimensionError(
            f"isometry mixes {iso.shape[1]} members but the ensemble has {ens.m}"
        )
    dev = np.abs(iso.conj().T @ iso - np.eye(ens.m)).max()
    if dev > NORM_TOL:
        raise ValidationError(f"columns are not orthonormal within 1e-10 (dev {dev:.2e})")
    blended = np.tensordot(iso.conj(), ens.amps(), axes=(1, 0))
    members = tuple(PureBipartite(b) for b in blended)
    return Ensemble(members, source=ens.source)


def povm_from_unitary(unitary, n):
    """Rank-one POVM on an n-dimensional support built from unitary rows.

    Element l is |v_l><v_l| with v_l the first n entries of row l; the
    elements are complete on the support because the columns of a unitary
    are orthonormal.
    """
    u = np.asarray(unitary, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise DimensionError(f"expected a square unitary, got {u.shape}")
    m = u.shape[0]
    if n > m:
        raise DimensionError(f"support dimension {n} exceeds POVM outcome count {m}")
    dev = np.abs(u.conj().T @ u - np.eye(m)).max()
    if dev > NORM_TOL:
        raise ValidationError(f"matrix is not unitary within 1e-10 (dev {dev:.2e})")
    elements = tuple(np.outer(u[l, :n], u[l, :n].conj()) for l in range(m))
    return Povm(elements)


def apply_povm(psi, povm):
    """Measure the third subsystem of a pure tripartite state.

    Returns a list of (probability, post-measurement PureBipartite on the
    first two subsystems); zero-probability outcomes are reported with a
    zero amplitude matrix. Requires equal first two dimensions.
    """
    da, db, ns = psi.dims
    if povm.n != ns:
        raise DimensionError(f"POVM acts on dim {povm.n} but the third subsystem has {ns}")
    if da != db:
        raise DimensionError("post-measurement states need equal local dimensions")
    mmat = psi.amp.reshape(da * db, ns)
    out = []
    for el in povm.elements:
        w, v = np.linalg.eigh((el + el.conj().T) / 2.0)
        big = float(w[-1])
        if np.count_nonzero(w > 1e-10) > 1:
            raise ValidationError("apply_povm supports rank-one POVM elements only")
        # rank-one element e = u u^dag: conditional AB vector is M conj(u)
        cond = mmat @ (np.sqrt(max(big, 0.0)) * v[:, -1].conj())
        prob = float(np.real(cond.conj() @ cond))
        if prob > 1e-14:
            state = PureBipartite((cond / np.sqrt(prob)).reshape(da, db))
        else:
            prob = max(prob, 0.0)
            state = PureBipartite(np.zeros((da, db)))
        out.append((prob, state))
    return out


# ---------------------------------------------------------------------------
# random instances (deterministic in the seed)


def random_pure_bipartite(d, seed):
    """Haar-random normalized pure state on d x d."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return PureBipartite(z / np.linalg.norm(z))


def random_pure_tripartite(dims, seed):
    """Haar-random normalized pure state with the given (d_a, d_b, n_s)."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(dims) + 1j * rng.standard_normal(dims)
    return PureTripartite(z / np.linalg.norm(z))


def random_density_matrix(dim_a, dim_b, rank, seed):
    """Random mixed state of the given rank (Ginibre-induced measure)."""
    n = dim_a * dim_b
    if not 1 <= rank <= n:
        raise DimensionError(f"rank must be in [1, {n}], got {rank}")
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    return DensityMatrix(rho / np.trace(rho).real, dim_a, dim_b)


def random_staircase_state(d, seed):
    """Random tripartite state whose reduced ensemble tensor is diagonal.

    The two Schmidt vectors on AB have shifted-diagonal amplitude matrices
    (supports |i>|i> and |i>|i+1 mod d>), which makes every mixed entry of
    the ensemble's determinant tensor vanish identically. Returns
    (state, lam) with lam the two nonzero diagonal tensor magnitudes in
    descending order.
    """
    if d < 2:
        raise DimensionError("local dimension must be >= 2")
    rng = np.random.default_rng(seed)
    q = rng.dirichlet(np.ones(2))
    while abs(q[0] - q[1]) < 1e-3:  # keep the spectrum non-degenerate
        q = rng.dirichlet(np.ones(2))
    amp = np.zeros((d, d, 2), dtype=np.complex128)
    lam = []
    for which, shift in enumerate((0, 1)):
        c = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        c *= np.sqrt(q[which]) / np.linalg.norm(c)
        for i in range(d):
            amp[i, (i + shift) % d, which] = c[i]
        lam.append(d ** (d / 2.0) * np.prod(np.abs(c)))
    lam = np.sort(np.asarray(lam))[::-1]
    return PureTripartite(amp), lam
