"""The G-concurrence of pure states and closely related closed forms.

For a normalized pure d x d state with amplitude matrix A the measure is
d * |det A|^(2/d), i.e. d times the geometric mean of the Schmidt numbers.
Sub-normalized vectors are handled by homogeneity (G scales with the
squared norm), which is what makes ensemble averages a plain sum over
sub-normalized members.
"""

import numpy as np

from ._backend import kernels
from .errors import DimensionError, ValidationError
from .states import DensityMatrix, PureBipartite

_SY2 = np.array([[0, 0, 0, -1], [0, 0, 1, 0], [0, 1, 0, 0], [-1, 0, 0, 0]], dtype=np.complex128)
# sigma_y (x) sigma_y in the i-major two-qubit basis


def g_pure(psi):
    """G-concurrence of a pure (possibly sub-normalized) d x d state.

    Equals d * |det(amp)|^(2/d); 1 for maximally entangled states, 0 for
    states of non-maximal Schmidt rank. For a sub-normalized vector c*psi
    the value is |c|^2 times the value of psi.
    """
    d = psi.d
    val = d * abs(np.linalg.det(psi.amp)) ** (2.0 / d)
    return max(val, 0.0)


def ensemble_avg_g(ens):
    """Sum of member G values; the ensemble average by sub-normalization."""
    g, _ = kernels.avg_g_terms(ens.amps(), np.eye(ens.m, dtype=np.complex128))
    return float(np.sum(g))


def apply_local_filter(psi, filter_a, filter_b):
    """Act with contractive local operators A (x) B on a pure state.

    Returns (filtered, gfactor): the unnormalized filtered state and the
    factor |det A|^(2/d) |det B|^(2/d) by which the G-concurrence scales,
    so g_pure(filtered) = gfactor * g_pure(psi).
    """
    fa = np.asarray(filter_a, dtype=np.complex128)
    fb = np.asarray(filter_b, dtype=np.complex128)
    d = psi.d
    if fa.shape != (d, d) or fb.shape != (d, d):
        raise DimensionError(f"filters must be {d} x {d} matrices")
    for name, f in (("A", fa), ("B", fb)):
        if np.linalg.norm(f, 2) > 1.0 + 1e-9:
            raise ValidationError(f"filter {name} is not contractive (operator norm > 1)")
    out = PureBipartite(fa @ psi.amp @ fb.T)
    gfactor = (abs(np.linalg.det(fa)) * abs(np.linalg.det(fb))) ** (2.0 / d)
    return out, gfactor


def wootters_concurrence(rho):
    """Closed-form concurrence of a two-qubit density matrix.

    max(0, s1 - s2 - s3 - s4) where the s_i are the descending square roots
    of the eigenvalues of rho * (sy x sy) rho^* (sy x sy). The s_i are
    computed as the singular values of sqrt(rho) (sy x sy) conj(sqrt(rho)),
    a similarity-symmetrized form that keeps the spectrum real and stable.
    """
    if not isinstance(rho, DensityMatrix) or (rho.dim_a, rho.dim_b) != (2, 2):
        raise DimensionError("wootters_concurrence is defined for two-qubit states")
    w, v = np.linalg.eigh((rho.mat + rho.mat.conj().T) / 2.0)
    root = (v * np.sqrt(np.maximum(w, 0.0))) @ v.conj().T
    s = np.linalg.svd(root @ _SY2 @ root.conj(), compute_uv=False)
    return float(max(0.0, s[0] - s[1:].sum()))


def filtered_tripartite(psi_amp, filter_a):
    """Apply a Kraus operator on the first subsystem of a tripartite amplitude.

    Returns the unnormalized amplitude array; utility for local-filter
    monotonicity checks (the caller renormalizes and tracks probability).
    """
    fa = np.asarray(filter_a, dtype=np.complex128)
    if fa.shape != (psi_amp.shape[0],) * 2:
        raise DimensionError("filter does not match the first subsystem dimension")
    return np.tensordot(fa, psi_amp, axes=(1, 0))


def two_outcome_filter(filter_a):
    """Complete a contractive operator to the two-outcome instrument (F, G).

    G = sqrt(I - F^dag F), so F^dag F + G^dag G = I exactly up to rounding.
    """
    fa = np.asarray(filter_a, dtype=np.complex128)
    rest = np.eye(fa.shape[0]) - fa.conj().T @ fa
    w, v = np.linalg.eigh((rest + rest.conj().T) / 2.0)
    comp = (v * np.sqrt(np.maximum(w, 0.0))) @ v.conj().T
    return fa, comp


def random_contraction(d, seed, strength=0.9):
    """Random contractive d x d filter, deterministic in the seed."""
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return strength * z / np.linalg.norm(z, 2)


__all__ = [
    "g_pure",
    "ensemble_avg_g",
    "apply_local_filter",
    "wootters_concurrence",
    "filtered_tripartite",
    "two_outcome_filter",
    "random_contraction",
]
