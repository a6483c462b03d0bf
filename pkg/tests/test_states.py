import numpy as np
import pytest

from gcq import numkit, states
from gcq.errors import DimensionError, ValidationError
from gcq.states import (
    DensityMatrix,
    Ensemble,
    PureBipartite,
    PureTripartite,
    apply_povm,
    eigen_ensemble,
    partial_trace,
    povm_from_unitary,
    random_density_matrix,
    random_pure_tripartite,
    schmidt,
    transform_ensemble,
)


def bell_state():
    return PureBipartite(np.eye(2) / np.sqrt(2))


def ghz(n=2):
    amp = np.zeros((n, n, n), dtype=complex)
    for k in range(n):
        amp[k, k, k] = 1.0 / np.sqrt(n)
    return PureTripartite(amp)


def example2_density(p):
    chi = (np.eye(3) / np.sqrt(3)).reshape(-1)
    e01 = np.zeros(9)
    e01[1] = 1.0
    rho = p * np.outer(chi, chi) + (1 - p) * np.outer(e01, e01)
    return DensityMatrix(rho.astype(complex), 3, 3)


def test_pure_bipartite_invariants():
    with pytest.raises(DimensionError):
        PureBipartite(np.ones((2, 3)))
    with pytest.raises(ValidationError):
        PureBipartite(2.0 * np.eye(2))
    with pytest.raises(ValidationError):
        PureBipartite(np.array([[np.inf, 0], [0, 0]]))
    sub = PureBipartite(0.5 * np.eye(2) / np.sqrt(2))  # sub-normalized is fine
    assert sub.norm2 == pytest.approx(0.25)


def test_schmidt_product_and_bell():
    c, _, _ = schmidt(PureBipartite(np.array([[1.0, 0.0], [0.0, 0.0]])))
    assert np.allclose(c, [1.0, 0.0], atol=1e-12)
    c, _, _ = schmidt(bell_state())
    assert np.allclose(c, [1 / np.sqrt(2)] * 2, atol=1e-12)


def test_schmidt_reconstruction_random():
    psi = states.random_pure_bipartite(4, seed=2)
    c, left, right = schmidt(psi)
    assert abs((c**2).sum() - 1.0) <= 1e-9
    recon = left @ np.diag(c) @ right.T
    assert np.abs(recon - psi.amp).max() <= 1e-9
    assert np.abs(left.conj().T @ left - np.eye(4)).max() <= 1e-10


def test_schmidt_requires_normalization():
    with pytest.raises(ValidationError):
        schmidt(PureBipartite(0.5 * np.eye(2)))


def test_partial_trace_ghz():
    rho = partial_trace(ghz(), (0, 1))
    want = np.zeros((4, 4))
    want[0, 0] = want[3, 3] = 0.5
    assert np.abs(rho.mat - want).max() <= 1e-12


def test_partial_trace_product_factor():
    psi = states.random_pure_bipartite(2, seed=9)
    amp = np.zeros((2, 2, 3), dtype=complex)
    amp[:, :, 0] = psi.amp  # third system in |0>
    rho = partial_trace(PureTripartite(amp), (0, 1))
    want = np.outer(psi.vector(), psi.vector().conj())
    assert np.abs(rho.mat - want).max() <= 1e-12


def test_partial_trace_trace_one_and_keep_orders():
    psi = random_pure_tripartite((2, 3, 4), seed=4)
    for keep in ((0, 1), (0, 2), (1, 2), (2, 0)):
        rho = partial_trace(psi, keep)
        assert abs(np.trace(rho.mat).real - 1.0) <= 1e-12
        assert (rho.dim_a, rho.dim_b) == (psi.dims[keep[0]], psi.dims[keep[1]])


def test_eigen_ensemble_pure_state():
    ens = eigen_ensemble(bell_state().projector())
    assert ens.m == 1
    assert ens.members[0].norm2 == pytest.approx(1.0)


def test_eigen_ensemble_example2_members():
    ens = eigen_ensemble(example2_density(0.5))
    assert ens.m == 2
    assert sorted(m.norm2 for m in ens.members) == pytest.approx([0.5, 0.5])
    # members live in span{chi, |01>} and are mutually orthogonal
    chi = (np.eye(3) / np.sqrt(3)).reshape(-1)
    e01 = np.zeros(9)
    e01[1] = 1.0
    basis = np.stack([chi, e01])
    for mem in ens.members:
        v = mem.vector()
        proj = basis.conj() @ v
        assert abs(v.conj() @ v - proj.conj() @ proj) <= 1e-12
    v0, v1 = ens.members[0].vector(), ens.members[1].vector()
    assert abs(v0.conj() @ v1) <= 1e-9


def test_eigen_ensemble_weights_and_orthogonality():
    rho = random_density_matrix(3, 3, 5, seed=21)
    ens = eigen_ensemble(rho)
    assert ens.m == 5
    assert abs(sum(m.norm2 for m in ens.members) - 1.0) <= 1e-10
    vecs = np.stack([m.vector() for m in ens.members])
    gram = vecs.conj() @ vecs.T
    off = gram - np.diag(np.diag(gram))
    assert np.abs(off).max() <= 1e-9
    assert np.abs(ens.reconstruct() - rho.mat).max() <= 1e-10


def test_transform_ensemble_identity_and_balanced():
    ens = eigen_ensemble(bell_state().projector())
    same = transform_ensemble(ens, np.eye(1))
    assert np.abs(same.members[0].amp - ens.members[0].amp).max() <= 1e-12

    iso = np.full((2, 1), 1 / np.sqrt(2))
    doubled = transform_ensemble(ens, iso)
    assert doubled.m == 2
    for mem in doubled.members:
        assert np.abs(mem.amp - ens.members[0].amp / np.sqrt(2)).max() <= 1e-12


def test_transform_ensemble_preserves_state():
    rho = random_density_matrix(2, 2, 3, seed=33)
    ens = eigen_ensemble(rho)
    for mprime in (3, 5):
        u = numkit.haar_unitary(mprime, 7)[:, : ens.m]
        out = transform_ensemble(ens, u)
        assert out.m == mprime
        assert np.abs(out.reconstruct() - rho.mat).max() <= 1e-10


def test_transform_ensemble_rejects_nonisometry():
    ens = eigen_ensemble(random_density_matrix(2, 2, 2, seed=1))
    bad = np.ones((2, 2))
    with pytest.raises(ValidationError):
        transform_ensemble(ens, bad)


def test_povm_from_unitary_identity_and_balanced():
    povm = povm_from_unitary(np.eye(3, dtype=complex), 3)
    for k, el in enumerate(povm.elements):
        want = np.zeros((3, 3))
        want[k, k] = 1.0
        assert np.abs(el - want).max() <= 1e-12

    h = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2)
    povm = povm_from_unitary(h.astype(complex), 2)
    plus = np.array([1.0, 1.0]) / np.sqrt(2)
    minus = np.array([1.0, -1.0]) / np.sqrt(2)
    assert np.abs(povm.elements[0] - np.outer(plus, plus)).max() <= 1e-12
    assert np.abs(povm.elements[1] - np.outer(minus, minus)).max() <= 1e-12


def test_povm_completeness_from_haar():
    for seed in range(5):
        u = numkit.haar_unitary(5, seed)
        povm = povm_from_unitary(u, 3)
        total = np.sum(povm.elements, axis=0)
        assert np.abs(total - np.eye(3)).max() <= 1e-10
    with pytest.raises(DimensionError):
        povm_from_unitary(np.eye(2, dtype=complex), 3)


def test_apply_povm_ghz_balanced():
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2)
    povm = povm_from_unitary(h, 2)
    outcomes = apply_povm(ghz(), povm)
    probs = [p for p, _ in outcomes]
    assert probs == pytest.approx([0.5, 0.5], abs=1e-12)
    plus = np.eye(2) / np.sqrt(2)
    minus = np.diag([1.0, -1.0]) / np.sqrt(2)
    for (p, state), want in zip(outcomes, (plus, minus)):
        phase = state.amp[0, 0] / want[0, 0]
        assert np.abs(state.amp - phase * want).max() <= 1e-12


def test_apply_povm_projective_recovers_schmidt_members():
    psi = random_pure_tripartite((2, 2, 2), seed=8)
    povm = povm_from_unitary(np.eye(2, dtype=complex), 2)
    outcomes = apply_povm(psi, povm)
    assert sum(p for p, _ in outcomes) == pytest.approx(1.0, abs=1e-10)
    for k, (p, state) in enumerate(outcomes):
        want = psi.amp[:, :, k]
        assert p == pytest.approx(float(np.sum(np.abs(want) ** 2)), abs=1e-12)
        phase = state.vector() @ want.reshape(-1).conj() / p
        assert np.abs(state.amp * np.sqrt(p) - want / (phase / abs(phase))).max() <= 1e-9


def test_apply_povm_mixture_matches_partial_trace():
    for seed in range(50):
        psi = random_pure_tripartite((2, 2, 3), seed=1000 + seed)
        u = numkit.haar_unitary(4, seed)
        povm = povm_from_unitary(u, 3)
        outcomes = apply_povm(psi, povm)
        assert abs(sum(p for p, _ in outcomes) - 1.0) <= 1e-10
        mix = sum(
            p * np.outer(s.vector(), s.vector().conj()) for p, s in outcomes
        )
        rho = partial_trace(psi, (0, 1)).mat
        assert np.abs(mix - rho).max() <= 1e-9


def test_ensemble_realization_from_random_unitary():
    # desk-scale ensemble realization: any unitary reshuffle of the
    # eigen-ensemble reproduces the density matrix
    for d in (2, 3):
        rho = random_density_matrix(d, d, d, seed=40 + d)
        ens = eigen_ensemble(rho)
        u = numkit.haar_unitary(ens.m, 90 + d)
        out = transform_ensemble(ens, u)
        assert np.abs(out.reconstruct() - rho.mat).max() <= 1e-10


def test_density_matrix_invariants():
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([0.7, 0.7, -0.2, -0.2]).astype(complex), 2, 2)
    with pytest.raises(ValidationError):
        DensityMatrix(np.diag([0.9, 0.3, 0.0, 0.0]).astype(complex), 2, 2)
    with pytest.raises(DimensionError):
        DensityMatrix(np.eye(4) / 4.0, 2, 3)


def test_ensemble_weight_invariant():
    good = PureBipartite(np.eye(2) / np.sqrt(2))
    with pytest.raises(ValidationError):
        Ensemble((good, good))  # weights sum to 2


def test_random_staircase_state_lambda_matches_members():
    for d in (2, 3, 4):
        psi, lam = states.random_staircase_state(d, seed=5 + d)
        rho = partial_trace(psi, (0, 1))
        ens = eigen_ensemble(rho)
        assert ens.m == 2
        dets = sorted(
            (d ** (d / 2.0)) * abs(np.linalg.det(m.amp)) for m in ens.members
        )[::-1]
        assert np.abs(np.asarray(dets) - lam).max() <= 1e-10
