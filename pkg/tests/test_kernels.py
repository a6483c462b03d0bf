"""Agreement between the numba kernels and the pure-numpy fallback."""

import numpy as np
import pytest

from gcq._backend import load_backend

knp, name_np = load_backend("numpy")
assert name_np == "numpy"
try:
    knb, name_nb = load_backend("numba")
    HAVE_NUMBA = name_nb == "numba"
except ImportError:
    HAVE_NUMBA = False

needs_numba = pytest.mark.skipif(not HAVE_NUMBA, reason="numba unavailable")


def random_coeffs(m, d, seed):
    rng = np.random.default_rng(seed)
    return rng.standard_normal((m, d, d)) + 1j * rng.standard_normal((m, d, d))


@needs_numba
def test_build_tau_agreement():
    for d, m, seed in ((2, 4, 0), (3, 5, 1), (4, 3, 2), (2, 1, 3)):
        coeffs = random_coeffs(m, d, seed)
        a = knp.build_tau(coeffs)
        b = knb.build_tau(coeffs)
        assert a.shape == b.shape == (m,) * d
        assert np.abs(a - b).max() <= 1e-12 * max(1.0, np.abs(a).max())


@needs_numba
def test_diag_and_pregrad_agreement():
    rng = np.random.default_rng(9)
    for d, m, m2 in ((2, 3, 5), (3, 4, 4), (4, 2, 2)):
        coeffs = random_coeffs(m, d, 10 + d)
        t = knp.build_tau(coeffs)
        rows = rng.standard_normal((m2, m)) + 1j * rng.standard_normal((m2, m))
        t1, s1 = knp.diag_and_pregrad(t, rows)
        t2, s2 = knb.diag_and_pregrad(t, rows)
        assert np.abs(t1 - t2).max() <= 1e-12 * max(1.0, np.abs(t1).max())
        assert np.abs(s1 - s2).max() <= 1e-12 * max(1.0, np.abs(s1).max())


@needs_numba
def test_avg_g_terms_agreement():
    rng = np.random.default_rng(21)
    for d, n, m2 in ((2, 3, 4), (3, 2, 5), (4, 4, 4)):
        amps = random_coeffs(n, d, 20 + d) * 0.4
        w = rng.standard_normal((m2, n)) + 1j * rng.standard_normal((m2, n))
        g1, e1 = knp.avg_g_terms(amps, w)
        g2, e2 = knb.avg_g_terms(amps, w)
        assert np.abs(g1 - g2).max() <= 1e-11 * max(1.0, np.abs(g1).max())
        assert np.abs(e1 - e2).max() <= 1e-10 * max(1.0, np.abs(e1).max())


@needs_numba
def test_avg_g_terms_singular_member():
    # a singular blend must yield zero G and a zero gradient row, not a crash
    amps = np.zeros((1, 3, 3), dtype=complex)
    amps[0, 0, 0] = 1.0
    w = np.ones((2, 1), dtype=complex)
    for kern in (knp, knb):
        g, e = kern.avg_g_terms(amps, w)
        assert np.all(g == 0.0)
        assert np.all(e == 0.0)
