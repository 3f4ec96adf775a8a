"""Wavefunctions on the sphere and on the circle.

Normalisation convention: a sphere state satisfies
``int |psi|^2 sin(theta) dtheta dphi = 1`` and a circle state
``int_0^{2 pi} |psi|^2 dphi = 1``.
"""
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from . import _kernels
from .quadrature import GridSpec, integrate_circle, integrate_sphere, require_finite


class StateError(ValueError):
    pass


# ---------------------------------------------------------------------------
# special functions
# ---------------------------------------------------------------------------

def legendre_P(l, x):
    """Legendre polynomial P_l(x) by the upward three-term recurrence.

    >>> float(legendre_P(1, 0.5))
    0.5
    """
    if l < 0 or int(l) != l:
        raise ValueError("degree must be a non-negative integer")
    x_arr = np.asarray(x, dtype=np.float64)
    if np.any(np.abs(x_arr) > 1.0):
        raise ValueError("legendre_P is defined here for |x| <= 1")
    coeffs = np.zeros(int(l) + 1)
    coeffs[-1] = 1.0
    value, _ = _kernels.legendre_series(coeffs, x_arr)
    return value if value.ndim else float(value)


def great_circle_cos(phi, theta, u, v):
    """Cosine of the angle between the radii through (phi, theta) and (u, v)."""
    c = np.cos(v) * np.cos(theta) + np.sin(v) * np.sin(theta) * np.cos(phi - u)
    return np.clip(c, -1.0, 1.0)


# ---------------------------------------------------------------------------
# numeric differentiation fallback
# ---------------------------------------------------------------------------

_FD_STEP = np.finfo(float).eps ** (1.0 / 3.0)


def numeric_partial(func, axis, phi, theta):
    """Central difference of ``func(phi, theta)`` along ``axis`` ("phi" or "theta"),
    Richardson-extrapolated once (error O(h^4))."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    x = phi if axis == "phi" else theta
    h = _FD_STEP * np.maximum(1.0, np.abs(x))

    def diff(step):
        if axis == "phi":
            return (func(phi + step, theta) - func(phi - step, theta)) / (2 * step)
        return (func(phi, theta + step) - func(phi, theta - step)) / (2 * step)

    coarse = diff(h)
    fine = diff(h / 2)
    return (4 * fine - coarse) / 3


# ---------------------------------------------------------------------------
# state containers
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StateParams:
    u: float = np.pi
    v: float = np.pi / 2
    gamma: float = 1.0
    k: int = 1
    tau: float = 1.0
    alpha_phase: Optional[Callable] = None
    l_max: Optional[int] = None

    def __post_init__(self):
        if not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if not self.tau > 0:
            raise ValueError("tau must be positive")
        if self.k < 1 or int(self.k) != self.k:
            raise ValueError("k must be a positive integer")
        if not 0.0 <= self.v <= np.pi:
            raise ValueError("v must lie in [0, pi]")
        if self.l_max is not None and self.l_max < 1:
            raise ValueError("l_max must be a positive integer")


@dataclass(frozen=True)
class SphereState:
    """Amplitude ``norm_constant * amplitude(phi, theta)`` on the unit sphere.

    ``d_phi`` and ``d_theta`` are partials of the *unnormalised* amplitude; when
    absent, :meth:`partial` falls back to finite differences.
    """

    amplitude: Callable
    d_phi: Optional[Callable] = None
    d_theta: Optional[Callable] = None
    phi_period_order: Optional[int] = None
    norm_constant: float = 1.0
    label: str = "state"
    normalized: bool = False
    params: dict = field(default_factory=dict, compare=False)

    def __call__(self, phi, theta):
        return self.norm_constant * self.amplitude(phi, theta)

    def density(self, phi, theta):
        return np.abs(self(phi, theta)) ** 2

    def partial(self, axis, phi, theta):
        d = self.d_phi if axis == "phi" else self.d_theta
        if d is None:
            return self.norm_constant * numeric_partial(self.amplitude, axis, phi, theta)
        return self.norm_constant * d(phi, theta)

    @property
    def has_analytic_derivatives(self):
        return self.d_phi is not None and self.d_theta is not None


@dataclass(frozen=True)
class CircleState:
    """2*pi-periodic amplitude on the circle.

    ``fourier`` maps m -> c_m for the basis exp(i m phi)/sqrt(2 pi); the
    coefficients refer to the normalised state.
    """

    amplitude: Callable
    fourier: Optional[dict] = None
    norm_constant: float = 1.0
    label: str = "circle"
    normalized: bool = False

    def __call__(self, phi):
        return self.norm_constant * self.amplitude(phi)

    def density(self, phi):
        return np.abs(self(phi)) ** 2


def normalize(state, spec=None):
    """Return a copy of ``state`` whose norm integral is one."""
    spec = spec or GridSpec.default()
    if isinstance(state, CircleState):
        res = integrate_circle(lambda p: np.abs(state.amplitude(p)) ** 2, 0.0, spec)
    else:
        res = integrate_sphere(lambda p, t: np.abs(state.amplitude(p, t)) ** 2, 0.0, spec)
    norm2 = float(np.real(require_finite(res, f"norm of {state.label}")))
    if not norm2 > 0:
        raise StateError(f"cannot normalise {state.label}: zero norm")
    new = replace(state, norm_constant=1.0 / np.sqrt(norm2), normalized=True)
    if isinstance(state, CircleState) and state.fourier is not None:
        scale = 1.0 / (np.sqrt(norm2) * state.norm_constant)
        new = replace(new, fourier={m: c * scale for m, c in state.fourier.items()})
    return new


# ---------------------------------------------------------------------------
# sphere families
# ---------------------------------------------------------------------------

def make_f_state(params, spec=None):
    """k-peak state N [2 + cos(k phi - u) + cos(3(theta - v)/2)]^gamma."""
    u, v, gamma, k = float(params.u), float(params.v), float(params.gamma), int(params.k)

    def amp(phi, theta):
        return _kernels.f_profile(phi, theta, u, v, gamma, k)[0]

    def d_phi(phi, theta):
        return _kernels.f_profile(phi, theta, u, v, gamma, k)[1]

    def d_theta(phi, theta):
        return _kernels.f_profile(phi, theta, u, v, gamma, k)[2]

    state = SphereState(amp, d_phi, d_theta, phi_period_order=k,
                        label=f"f(u={u:g},v={v:g},gamma={gamma:g},k={k})",
                        params=dict(family="f", u=u, v=v, gamma=gamma, k=k))
    return normalize(state, spec)


CS_TAIL = 1e-12


def cs_coefficients(tau, l_max=None):
    """Heat-kernel weights exp(-tau l(l+1)/2) sqrt(2l+1), l = 0..l_max.

    The default ``l_max`` is the smallest L whose weight drops below 1e-12.
    """
    def weight(l):
        return np.exp(-tau * l * (l + 1) / 2) * np.sqrt(2 * l + 1)

    if l_max is None:
        l_max = 1
        while weight(l_max) >= CS_TAIL:
            l_max += 1
    elif weight(l_max) >= CS_TAIL:
        raise StateError(f"truncation insufficient: weight at l_max={l_max} is "
                         f"{weight(l_max):.3e} >= {CS_TAIL:g}")
    return weight(np.arange(l_max + 1))


def make_cs_state(params, spec=None):
    """Coherent state on the sphere: zonal Legendre series about (u, v)."""
    u, v, tau = float(params.u), float(params.v), float(params.tau)
    coeffs = cs_coefficients(tau, params.l_max)
    sv, cv = np.sin(v), np.cos(v)

    def amp(phi, theta):
        return _kernels.legendre_series(coeffs, great_circle_cos(phi, theta, u, v))[0]

    def d_phi(phi, theta):
        x = great_circle_cos(phi, theta, u, v)
        dx = -sv * np.sin(theta) * np.sin(phi - u)
        return _kernels.legendre_series(coeffs, x)[1] * dx

    def d_theta(phi, theta):
        x = great_circle_cos(phi, theta, u, v)
        dx = -cv * np.sin(theta) + sv * np.cos(theta) * np.cos(phi - u)
        return _kernels.legendre_series(coeffs, x)[1] * dx

    state = SphereState(amp, d_phi, d_theta, phi_period_order=1,
                        label=f"cs(u={u:g},v={v:g},tau={tau:g})",
                        params=dict(family="cs", u=u, v=v, tau=tau, l_max=len(coeffs) - 1))
    return normalize(state, spec)


def make_uniform_state():
    c = 1.0 / np.sqrt(4 * np.pi)
    zero = lambda p, t: np.zeros(np.broadcast(p, t).shape)
    return SphereState(lambda p, t: np.full(np.broadcast(p, t).shape, c),
                       zero, zero, phi_period_order=None, label="uniform",
                       normalized=True, params=dict(family="uniform"))


def make_delocalized_state(alpha=None):
    """exp(i alpha(phi, theta)) / (pi sqrt(2 sin theta)); alpha = 0 by default.

    Its density with respect to dtheta dphi is the constant 1/(2 pi^2).
    """
    if alpha is None:
        def amp(p, t):
            return np.broadcast_to(1.0 / (np.pi * np.sqrt(2 * np.sin(t))), np.broadcast(p, t).shape)

        def d_theta(p, t):
            return -0.5 * np.cos(t) / np.sin(t) * amp(p, t)

        return SphereState(amp, lambda p, t: np.zeros(np.broadcast(p, t).shape), d_theta,
                           label="psi_0", normalized=True, params=dict(family="psi0"))

    def amp(p, t):
        return np.exp(1j * alpha(p, t)) / (np.pi * np.sqrt(2 * np.sin(t)))

    return SphereState(amp, label="psi_alpha", normalized=True,
                       params=dict(family="psi_alpha"))


def make_reference_states(alpha=None):
    """[psi_uni, psi_alpha]: the uniform and the most delocalised state."""
    return [make_uniform_state(), make_delocalized_state(alpha)]


def make_azimuthal_eigenstate(m):
    """exp(i m phi)/sqrt(4 pi): eigenstate of -i d/dphi with eigenvalue m."""
    c = 1.0 / np.sqrt(4 * np.pi)

    def amp(p, t):
        return np.broadcast_to(c * np.exp(1j * m * p), np.broadcast(p, t).shape)

    return SphereState(amp, lambda p, t: 1j * m * amp(p, t),
                       lambda p, t: np.zeros(np.broadcast(p, t).shape, dtype=complex),
                       label=f"eigen_m={m}", normalized=True,
                       params=dict(family="eigen", m=m))


def rotate(state, delta):
    """psi'(phi, theta) = psi(phi - delta, theta)."""
    shift = lambda f: None if f is None else (lambda p, t: f(p - delta, t))
    return replace(state, amplitude=shift(state.amplitude), d_phi=shift(state.d_phi),
                   d_theta=shift(state.d_theta), label=f"{state.label}@rot{delta:g}")


def make_state(desc, spec=None):
    """Build a state from a descriptor mapping (the CLI state-file format).

    Sphere families: ``f``, ``cs``, ``uniform``, ``psi0``, ``eigen`` (with ``m``).
    Circle families: ``circle_m`` (with ``m``), ``circle_cos``, ``circle_sin``,
    ``circle_sin2``, ``circle_uniform``.
    """
    from . import circle

    family = desc.get("family")
    if family in ("f", "cs"):
        keys = {"u", "v", "gamma", "k", "tau", "l_max"}
        params = StateParams(**{k: desc[k] for k in keys if desc.get(k) is not None})
        return (make_f_state if family == "f" else make_cs_state)(params, spec)
    if family == "uniform":
        return make_uniform_state()
    if family == "psi0":
        return make_delocalized_state()
    if family == "eigen":
        return make_azimuthal_eigenstate(int(desc.get("m", 0)))
    if family is not None and family.startswith("circle_"):
        name = family[len("circle_"):]
        if name == "m":
            return circle.psi_m(int(desc.get("m", 0)))
        builders = dict(cos=circle.psi_cos, sin=circle.psi_sin, sin2=circle.psi_sin2,
                        uniform=circle.psi_uniform)
        if name in builders:
            return builders[name]()
    raise StateError(f"unknown state family {family!r}")
