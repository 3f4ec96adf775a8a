"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The backend is chosen once at import time. Set ``SPHEREUM_NUMBA=0`` to force
the numpy implementations (useful for debugging and for the benchmark that
compares the two).  Both paths take and return float64 arrays of identical
shape, so callers never need to know which one is active.
"""
import os
from itertools import combinations

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

USE_NUMBA = numba is not None and os.environ.get("SPHEREUM_NUMBA", "1") != "0"


# ---------------------------------------------------------------------------
# numpy implementations
# ---------------------------------------------------------------------------

def legendre_series_numpy(coeffs, x):
    """Evaluate ``sum_l coeffs[l] * P_l(x)`` and its x-derivative.

    Uses the upward three-term recurrence for P_l and
    ``P'_{l+1} = P'_{l-1} + (2l+1) P_l`` for the derivative, which stays
    finite at x = +-1.
    """
    x = np.asarray(x, dtype=np.float64)
    p_prev = np.ones_like(x)
    dp_prev = np.zeros_like(x)
    total = coeffs[0] * p_prev
    dtotal = np.zeros_like(x)
    if len(coeffs) == 1:
        return total, dtotal
    p = x.copy()
    dp = np.ones_like(x)
    total = total + coeffs[1] * p
    dtotal = dtotal + coeffs[1] * dp
    for l in range(1, len(coeffs) - 1):
        p_next = ((2 * l + 1) * x * p - l * p_prev) / (l + 1)
        dp_next = dp_prev + (2 * l + 1) * p
        p_prev, p = p, p_next
        dp_prev, dp = dp, dp_next
        total = total + coeffs[l + 1] * p
        dtotal = dtotal + coeffs[l + 1] * dp
    return total, dtotal


def f_profile_numpy(phi, theta, u, v, gamma, k):
    """Peaked profile ``B**gamma`` with ``B = 2 + cos(k phi - u) + cos(3(theta - v)/2)``.

    Returns the profile and its partials in phi and theta.
    """
    phi = np.asarray(phi, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    arg_phi = k * phi - u
    arg_theta = 1.5 * (theta - v)
    base = 2.0 + np.cos(arg_phi) + np.cos(arg_theta)
    powm1 = base ** (gamma - 1.0)
    value = powm1 * base
    d_phi = -gamma * k * powm1 * np.sin(arg_phi)
    d_theta = -1.5 * gamma * powm1 * np.sin(arg_theta)
    return value, d_phi, d_theta


def principal_minor_sums_numpy(m):
    """Sums of all r x r principal minors of ``m`` for r = 1..n."""
    m = np.asarray(m, dtype=np.float64)
    n = m.shape[0]
    out = np.zeros(n)
    for r in range(1, n + 1):
        acc = 0.0
        for idx in combinations(range(n), r):
            acc += np.linalg.det(m[np.ix_(idx, idx)])
        out[r - 1] = acc
    return out


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if numba is not None:

    @numba.njit(cache=True)
    def _legendre_series_flat(coeffs, x):
        n = x.shape[0]
        nl = coeffs.shape[0]
        total = np.empty(n)
        dtotal = np.empty(n)
        for i in range(n):
            xi = x[i]
            p_prev = 1.0
            dp_prev = 0.0
            s = coeffs[0]
            ds = 0.0
            if nl > 1:
                p = xi
                dp = 1.0
                s += coeffs[1] * p
                ds += coeffs[1]
                for l in range(1, nl - 1):
                    p_next = ((2 * l + 1) * xi * p - l * p_prev) / (l + 1)
                    dp_next = dp_prev + (2 * l + 1) * p
                    p_prev = p
                    p = p_next
                    dp_prev = dp
                    dp = dp_next
                    s += coeffs[l + 1] * p
                    ds += coeffs[l + 1] * dp
            total[i] = s
            dtotal[i] = ds
        return total, dtotal

    @numba.njit(cache=True)
    def _f_profile_flat(phi, theta, u, v, gamma, k):
        n = phi.shape[0]
        value = np.empty(n)
        d_phi = np.empty(n)
        d_theta = np.empty(n)
        for i in range(n):
            a = k * phi[i] - u
            b = 1.5 * (theta[i] - v)
            base = 2.0 + np.cos(a) + np.cos(b)
            powm1 = base ** (gamma - 1.0)
            value[i] = powm1 * base
            d_phi[i] = -gamma * k * powm1 * np.sin(a)
            d_theta[i] = -1.5 * gamma * powm1 * np.sin(b)
        return value, d_phi, d_theta

    @numba.njit(cache=True)
    def _principal_minor_sums(m):
        n = m.shape[0]
        out = np.zeros(n)
        for mask in range(1, 1 << n):
            idx = np.empty(n, dtype=np.int64)
            r = 0
            for j in range(n):
                if mask & (1 << j):
                    idx[r] = j
                    r += 1
            sub = np.empty((r, r))
            for a in range(r):
                for b in range(r):
                    sub[a, b] = m[idx[a], idx[b]]
            out[r - 1] += np.linalg.det(sub)
        return out

    def legendre_series_numba(coeffs, x):
        x = np.asarray(x, dtype=np.float64)
        shape = x.shape
        s, ds = _legendre_series_flat(np.ascontiguousarray(coeffs, dtype=np.float64),
                                      np.ascontiguousarray(x).ravel())
        return s.reshape(shape), ds.reshape(shape)

    def f_profile_numba(phi, theta, u, v, gamma, k):
        phi, theta = np.broadcast_arrays(np.asarray(phi, dtype=np.float64),
                                         np.asarray(theta, dtype=np.float64))
        shape = phi.shape
        out = _f_profile_flat(np.ascontiguousarray(phi).ravel(),
                              np.ascontiguousarray(theta).ravel(),
                              float(u), float(v), float(gamma), float(k))
        return tuple(a.reshape(shape) for a in out)

    def principal_minor_sums_numba(m):
        return _principal_minor_sums(np.ascontiguousarray(m, dtype=np.float64))


if USE_NUMBA:
    legendre_series = legendre_series_numba
    f_profile = f_profile_numba
    principal_minor_sums = principal_minor_sums_numba
else:
    legendre_series = legendre_series_numpy
    f_profile = f_profile_numpy
    principal_minor_sums = principal_minor_sums_numpy

BACKEND = "numba" if USE_NUMBA else "numpy"
