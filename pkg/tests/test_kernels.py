import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from sphereum import _kernels as K

needs_numba = pytest.mark.skipif(K.numba is None, reason="numba not installed")


@needs_numba
@given(arrays(np.float64, st.integers(1, 30), elements=st.floats(-2, 2)),
       arrays(np.float64, st.integers(1, 50), elements=st.floats(-1, 1)))
@settings(max_examples=50, deadline=None)
def test_legendre_backends_agree(coeffs, x):
    a = K.legendre_series_numpy(coeffs, x)
    b = K.legendre_series_numba(coeffs, x)
    for u, w in zip(a, b):
        np.testing.assert_allclose(u, w, rtol=1e-12, atol=1e-12 * (1 + np.abs(u).max()))


@needs_numba
@given(st.floats(0.2, 8), st.integers(1, 4), st.floats(0, 2 * np.pi), st.floats(0.5, 2.5))
@settings(max_examples=40, deadline=None)
def test_f_profile_backends_agree(gamma, k, u, v):
    phi = np.linspace(-np.pi, np.pi, 13)[:, None]
    theta = np.linspace(0.05, 3.0, 7)[None, :]
    a = K.f_profile_numpy(phi, theta, u, v, gamma, k)
    b = K.f_profile_numba(phi, theta, u, v, gamma, k)
    for x, y in zip(a, b):
        assert x.shape == y.shape == (13, 7)
        np.testing.assert_allclose(x, y, rtol=1e-12, atol=1e-300)


@needs_numba
@given(arrays(np.float64, (4, 4), elements=st.floats(-5, 5)))
@settings(max_examples=40, deadline=None)
def test_minor_sums_backends_agree(m):
    np.testing.assert_allclose(K.principal_minor_sums_numpy(m), K.principal_minor_sums_numba(m),
                               rtol=1e-10, atol=1e-10)


def test_legendre_derivative_matches_numpy_polynomial():
    c = np.array([0.3, -1.0, 0.5, 2.0])
    x = np.linspace(-1, 1, 11)
    val, der = K.legendre_series(c, x)
    ref = np.polynomial.legendre.Legendre(c)
    np.testing.assert_allclose(val, ref(x), atol=1e-13)
    np.testing.assert_allclose(der, ref.deriv()(x), atol=1e-12)


def test_backend_flag():
    assert K.BACKEND in ("numba", "numpy")


def test_numpy_backend_selected_by_env():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-c", "from sphereum import _kernels; print(_kernels.BACKEND)"],
                         env={"SPHEREUM_NUMBA": "0", "PATH": ""}, capture_output=True, text=True,
                         check=True)
    assert out.stdout.strip() == "numpy"
