"""Trigonometric and logarithmic spread measures for states on the circle."""
from dataclasses import dataclass, replace

import numpy as np

from .quadrature import GridSpec, integrate_circle

KR_DIVERGENCE_THRESHOLD = 1e-12
SPECTRAL_TAIL = 1e-10
SQRT_2PI = np.sqrt(2 * np.pi)


class SpectralDataError(ValueError):
    pass


def _circle_state(amplitude, fourier, label):
    from .states import CircleState
    return CircleState(amplitude, fourier=fourier, label=label, normalized=True)


def psi_m(m):
    """Angular-momentum eigenstate exp(i m phi)/sqrt(2 pi)."""
    return _circle_state(lambda p: np.exp(1j * m * np.asarray(p)) / SQRT_2PI,
                         {m: 1.0 + 0j}, f"psi_m={m}")


def psi_uniform():
    return replace(psi_m(0), label="uniform")


def psi_cos():
    c = 1 / np.sqrt(2)
    return _circle_state(lambda p: np.cos(p) / np.sqrt(np.pi), {1: c + 0j, -1: c + 0j}, "psi_cos")


def psi_sin():
    c = 1 / np.sqrt(2)
    return _circle_state(lambda p: np.sin(p) / np.sqrt(np.pi), {1: -1j * c, -1: 1j * c}, "psi_sin")


def psi_sin2():
    c = 1 / np.sqrt(2)
    return _circle_state(lambda p: np.sin(2 * p) / np.sqrt(np.pi), {2: -1j * c, -2: 1j * c},
                         "psi_sin2")


def make_circle_reference_states(m=1):
    """psi_m, psi_cos, psi_sin, psi_sin2 and the uniform state."""
    return [psi_m(m), psi_cos(), psi_sin(), psi_sin2(), psi_uniform()]


def circle_mean(state, g, spec=None):
    """<g> = int g(phi) |psi(phi)|^2 dphi over [-pi, pi]."""
    res = integrate_circle(lambda p: g(p) * state.density(p), 0.0, spec or GridSpec.default())
    return complex(res.value)


def trig_variances(state, spec=None):
    """Variances of cos(phi) and sin(phi) and their covariance."""
    spec = spec or GridSpec.default()
    c = circle_mean(state, np.cos, spec).real
    s = circle_mean(state, np.sin, spec).real
    c2 = circle_mean(state, lambda p: np.cos(p) ** 2, spec).real
    s2 = circle_mean(state, lambda p: np.sin(p) ** 2, spec).real
    cs = circle_mean(state, lambda p: np.cos(p) * np.sin(p), spec).real
    return c2 - c * c, s2 - s * s, cs - c * s


def centroid_measure(state, spec=None):
    """1 - |<exp(i phi)>|^2: radial distance of the centroid from the unit circle."""
    u = circle_mean(state, lambda p: np.exp(1j * p), spec)
    return 1.0 - abs(u) ** 2


def fourier_coefficients(state, m_max, spec=None):
    """c_m = int psi(phi) exp(-i m phi) dphi / sqrt(2 pi) for |m| <= m_max.

    Raises SpectralDataError when the modes beyond m_max carry more than
    1e-10 of the norm.
    """
    spec = spec or GridSpec.default()
    coeffs = {}
    for m in range(-m_max, m_max + 1):
        res = integrate_circle(lambda p, m=m: state(p) * np.exp(-1j * m * p), 0.0, spec)
        coeffs[m] = complex(res.value) / SQRT_2PI
    tail = 1.0 - sum(abs(c) ** 2 for c in coeffs.values())
    if tail > SPECTRAL_TAIL:
        raise SpectralDataError(f"spectral tail too large: {tail:.3e} beyond |m| = {m_max}")
    return coeffs


def with_spectrum(state, m_max=32, spec=None):
    """Attach numerically computed Fourier coefficients to ``state``."""
    return replace(state, fourier=fourier_coefficients(state, m_max, spec))


def _spectral_means(state):
    if state.fourier is None:
        raise SpectralDataError("spectral data required: state carries no Fourier coefficients")
    ms = np.array(sorted(state.fourier), dtype=float)
    w = np.array([abs(state.fourier[int(m)]) ** 2 for m in ms])
    return ms, w


def p_phi_moments(state):
    """(<p_phi>, var p_phi) from the Fourier coefficients."""
    ms, w = _spectral_means(state)
    mean = float(np.sum(ms * w))
    return mean, float(np.sum(ms ** 2 * w) - mean ** 2)


def kr_measures(state, spec=None):
    """Logarithmic position and momentum spreads.

    Returns ``(kr_phi, kr_p)`` with kr_phi = -ln|<exp(2 i phi)>|^2 / 4 (``inf``
    when the mean vanishes) and kr_p = ln(<exp(-2p)><exp(2p)>)/4 evaluated from
    the Fourier coefficients.
    """
    u2 = abs(circle_mean(state, lambda p: np.exp(2j * p), spec))
    kr_phi = np.inf if u2 < KR_DIVERGENCE_THRESHOLD else -0.25 * np.log(u2 ** 2)
    ms, w = _spectral_means(state)
    with np.errstate(over="raise"):
        try:
            plus = float(np.sum(w * np.exp(2 * ms)))
            minus = float(np.sum(w * np.exp(-2 * ms)))
        except FloatingPointError:
            raise SpectralDataError("spectral data required: exp(+-2 p) moments overflow") from None
    if not (np.isfinite(plus) and np.isfinite(minus)):
        raise SpectralDataError("spectral data required: exp(+-2 p) moments overflow")
    return kr_phi, 0.25 * np.log(plus * minus)


@dataclass
class CircleMeasureSet:
    var_cos: float
    var_sin: float
    cov_cos_sin: float
    mean_cos: float
    mean_sin: float
    centroid_measure: float
    kr_phi: float
    kr_p: float
    var_p_phi: float


def circle_measures(state, spec=None):
    spec = spec or GridSpec.default()
    var_c, var_s, cov = trig_variances(state, spec)
    c = circle_mean(state, np.cos, spec).real
    s = circle_mean(state, np.sin, spec).real
    kr_phi, kr_p = kr_measures(state, spec)
    return CircleMeasureSet(var_c, var_s, cov, c, s, 1.0 - c * c - s * s,
                            kr_phi, kr_p, p_phi_moments(state)[1])


def ursin_check(state, spec=None, slack=1e-10):
    """Both trigonometric uncertainty inequalities.

    (var p_phi)(var sin) >= <cos>^2/4 and (var p_phi)(var cos) >= <sin>^2/4.
    Returns a list of (lhs, rhs, passed).
    """
    ms = circle_measures(state, spec)
    out = []
    for var, mean in ((ms.var_sin, ms.mean_cos), (ms.var_cos, ms.mean_sin)):
        lhs, rhs = ms.var_p_phi * var, mean ** 2 / 4
        out.append((lhs, rhs, lhs >= rhs - slack * (1 + abs(lhs) + abs(rhs))))
    return out
