"""Position-spread measures on the sphere.

The azimuthal mean and variance depend on where the 2*pi integration window
is placed.  The window is therefore centred on the packet centre, defined as a
fixed point of the windowed mean whose antipodal marginal density does not
exceed the average 1/(2 pi); such points are exactly the local minima of the
window-dependent variance.
"""
import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .quadrature import (GridSpec, QuadratureError, Status, _legendre_rule,
                         integrate_sphere, require_finite, theta_rule)

log = logging.getLogger(__name__)

TOL_CENTER = 1e-8
ANTIPODE_SLACK = 1e-6
SCAN_POINTS = 720
GOLDEN = (math.sqrt(5) - 1) / 2
TWO_PI = 2 * np.pi

_CHUNK_POINTS = 1 << 20


class CenterSearchError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# moments
# ---------------------------------------------------------------------------

def sphere_mean(state, g, window_center=0.0, spec=None):
    """<g> = int g(phi, theta) |psi|^2 dS over the window centred at ``window_center``."""
    res = integrate_sphere(lambda p, t: g(p, t) * state.density(p, t), window_center,
                           spec or GridSpec.default())
    return float(np.real(require_finite(res, f"<g> in {state.label}")))


def moment_phi(state, k, phi0, spec=None):
    """Window-dependent moment int sin(theta) dtheta int_{phi0-pi}^{phi0+pi} phi^k |psi|^2 dphi."""
    return sphere_mean(state, lambda p, t: p ** k, phi0, spec)


def marginal_density(state, phi, spec=None):
    """int_0^pi sin(theta) |psi(phi, theta)|^2 dtheta at each ``phi``."""
    spec = spec or GridSpec.default()
    phi = np.asarray(phi, dtype=float)
    prev = None
    for i in range(spec.max_refinements + 1):
        theta, wt = theta_rule(spec.level(i)[0])
        val = state.density(phi[..., None], theta) @ wt
        if prev is not None and np.all(np.abs(val - prev) <= spec.rel_tol * (np.abs(val) + 1e-3)):
            break
        prev = val
    return val if val.ndim else float(val)


def _moments_level(state, centers, n_theta, n_phi):
    theta, wt = theta_rule(n_theta)
    x, w = _legendre_rule(n_phi)
    wp = np.pi * w
    out = np.empty((3, centers.size))
    per = max(1, _CHUNK_POINTS // (n_phi * n_theta))
    for s in range(0, centers.size, per):
        c = centers[s:s + per]
        phi = c[:, None] + np.pi * x[None, :]
        marg = state.density(phi[..., None], theta) @ wt
        out[0, s:s + per] = marg @ wp
        out[1, s:s + per] = (marg * phi) @ wp
        out[2, s:s + per] = (marg * phi * phi) @ wp
    return out


def windowed_phi_moments(state, phi0, spec=None):
    """(M0, M1, M2) of phi over the windows centred at each ``phi0``.

    All windows are refined together; the status is Converged only when every
    window met the tolerance.
    """
    spec = spec or GridSpec.default()
    centers = np.atleast_1d(np.asarray(phi0, dtype=float)).ravel()
    prev = None
    status = Status.MAX_REFINEMENTS
    for i in range(spec.max_refinements + 1):
        m = _moments_level(state, centers, *spec.level(i))
        if prev is not None and np.all(np.abs(m - prev) <= spec.rel_tol * (np.abs(m) + 1e-3)):
            status = Status.CONVERGED
            break
        prev = m
    if not np.all(np.isfinite(m)):
        raise QuadratureError(f"non-finite phi moments for {state.label}")
    shape = np.shape(phi0)
    return tuple(a.reshape(shape) if shape else float(a[0]) for a in m), status


def variance_phi_at(state, phi0, spec=None):
    """Window-dependent variance M2(phi0) - M1(phi0)^2; ``phi0`` may be an array."""
    (_, m1, m2), _ = windowed_phi_moments(state, phi0, spec)
    return m2 - m1 * m1


# ---------------------------------------------------------------------------
# packet centres
# ---------------------------------------------------------------------------

class _SpectralMarginal:
    """Closed-form windowed moments from the Fourier series of the phi-marginal.

    Used for the coarse scan and the golden-section refinement; final values are
    always re-evaluated with the direct tensor quadrature.
    """

    def __init__(self, state, spec, n=256, n_max=8192):
        theta, wt = theta_rule(spec.n_theta)
        while True:
            phi = TWO_PI * np.arange(n) / n
            rho = state.density(phi[:, None], theta) @ wt
            c = np.fft.fft(rho) / n
            tail = np.abs(c[n // 4: 3 * n // 4 + 1]).max()
            if tail <= 1e-15 * abs(c[0]) or n >= n_max:
                break
            n *= 2
        self.m = np.fft.fftfreq(n, 1.0 / n)
        self.c = c

    def moments(self, a):
        a = np.asarray(a, dtype=float)[..., None]
        m, c = self.m, self.c
        nz = m != 0
        mm = np.where(nz, m, 1.0)
        sign = np.where(m.astype(np.int64) % 2 == 0, 1.0, -1.0)
        e = c * np.exp(1j * m * a)
        k1 = np.where(nz, -2j * np.pi * sign / mm, 0.0)
        k2 = np.where(nz, 4 * np.pi * sign / mm ** 2, 0.0)
        m0 = TWO_PI * c[0].real + 0 * a[..., 0]
        m1 = (e * k1).sum(-1).real + TWO_PI * a[..., 0] * c[0].real
        m2 = ((e * (2 * a * k1 + k2)).sum(-1).real
              + (TWO_PI * a[..., 0] ** 2 + TWO_PI * np.pi ** 2 / 3) * c[0].real)
        return m0, m1, m2

    def variance(self, a):
        _, m1, m2 = self.moments(a)
        return m2 - m1 * m1

    def residual(self, a):
        return float(self.moments(a)[1] - a)


def golden_section(f, lo, hi, tol=TOL_CENTER, max_iter=200):
    """Minimise a unimodal ``f`` on [lo, hi]; returns (x, f(x), (lo, hi))."""
    x1 = hi - GOLDEN * (hi - lo)
    x2 = lo + GOLDEN * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - GOLDEN * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + GOLDEN * (hi - lo)
            f2 = f(x2)
    x = x1 if f1 <= f2 else x2
    return x, min(f1, f2), (lo, hi)


@dataclass
class PacketCenterResult:
    centers: list
    objective_at_center: list
    fixed_point_residual: list
    antipode_density: list
    multiplicity: int
    degenerate: bool = False
    polar_angle: float = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def phi_centers(self):
        return [c[0] for c in self.centers]


def _circular_close(a, b, tol):
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d) <= tol


def find_packet_centers(state, spec=None):
    """Locate every packet centre (phi_c, theta_c) of ``state``.

    A 720-point scan of the window-dependent variance brackets each local
    minimum; golden-section search refines it and, when needed, the fixed-point
    equation M1(phi_c) = phi_c is solved inside the bracket to reach
    ``TOL_CENTER``.  Each candidate is then checked with direct quadrature.
    A constant objective (e.g. the uniform state) gives the single centre 0 with
    ``degenerate=True``.
    """
    spec = spec or GridSpec.default()
    theta_c = sphere_mean(state, lambda p, t: t, 0.0, spec)
    spectral = _SpectralMarginal(state, spec)
    grid = TWO_PI * np.arange(SCAN_POINTS) / SCAN_POINTS
    scan = spectral.variance(grid)
    h = TWO_PI / SCAN_POINTS
    diagnostics = dict(scan_min=float(scan.min()), scan_max=float(scan.max()))

    if np.ptp(scan) <= 1e-10 * max(1.0, float(np.max(np.abs(scan)))):
        candidates = [0.0]
        degenerate = True
    else:
        degenerate = False
        left, right = np.roll(scan, 1), np.roll(scan, -1)
        idx = np.flatnonzero((scan <= left) & (scan < right))
        candidates = []
        for i in idx:
            lo, hi = grid[i] - h, grid[i] + h
            x, _, _ = golden_section(spectral.variance, lo, hi)
            if abs(spectral.residual(x)) > 0.1 * TOL_CENTER:
                rlo, rhi = spectral.residual(lo), spectral.residual(hi)
                if rlo * rhi < 0:
                    x = brentq(spectral.residual, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
            candidates.append(float(x % TWO_PI))

    centers, objective, residual, antipode = [], [], [], []
    rejected = []
    for x in candidates:
        if any(_circular_close(x, c[0], 1e-6) for c in centers):
            continue
        res = moment_phi(state, 1, x, spec) - x
        rho_a = marginal_density(state, x + np.pi, spec)
        if abs(res) <= TOL_CENTER and rho_a <= 1 / TWO_PI + ANTIPODE_SLACK:
            centers.append((x, theta_c))
            objective.append(float(variance_phi_at(state, x, spec)))
            residual.append(float(res))
            antipode.append(float(rho_a))
        else:
            rejected.append(dict(phi=x, residual=float(res), antipode_density=float(rho_a)))
    diagnostics["rejected"] = rejected
    if not centers:
        raise CenterSearchError(f"no admissible center for {state.label}: {diagnostics}")

    order = np.argsort([c[0] for c in centers])
    pick = lambda seq: [seq[i] for i in order]
    result = PacketCenterResult(pick(centers), pick(objective), pick(residual), pick(antipode),
                                len(centers), degenerate, diagnostics=diagnostics)
    if len(centers) == 1 and not degenerate:
        c = sphere_mean(state, lambda p, t: np.cos(p), 0.0, spec)
        s = sphere_mean(state, lambda p, t: np.sin(p), 0.0, spec)
        if math.hypot(c, s) > 1e-12:
            result.polar_angle = math.atan2(s, c) % TWO_PI
    return result


def centered_phi_variance(state, spec=None, centers=None):
    """Variance of phi over the window centred on the packet centre.

    Multi-centred packets give the same value at every centre; if they do not
    (within 1e-6 relative) the smallest is returned and a warning logged.
    """
    centers = centers or find_packet_centers(state, spec)
    vals = np.asarray(centers.objective_at_center)
    if np.ptp(vals) > 1e-6 * max(1.0, abs(vals).max()):
        log.warning("centres of %s have unequal objectives %s", state.label, vals)
    return float(vals.min())


# ---------------------------------------------------------------------------
# theta measures and combinations
# ---------------------------------------------------------------------------

def theta_variance(state, spec=None):
    """(<theta>, var theta) against |psi|^2 dS."""
    spec = spec or GridSpec.default()
    m1 = sphere_mean(state, lambda p, t: t, 0.0, spec)
    m2 = sphere_mean(state, lambda p, t: t * t, 0.0, spec)
    return m1, m2 - m1 * m1


@dataclass
class MeasureSet:
    c_var_phi: float
    var_theta: float
    m_plus: float
    m_dot: float
    var_p_phi: float
    var_p_theta: float
    n_theta_index: int = 1
    mean_theta: float = None
    centers: PacketCenterResult = None


def combined_measures(state, spec=None, n=1):
    """The four spread measures of one state plus their sum and product."""
    from .operators import p_phi, p_theta_n, operator_variance

    spec = spec or GridSpec.default()
    centers = find_packet_centers(state, spec)
    c_var = centered_phi_variance(state, spec, centers)
    mean_t, var_t = theta_variance(state, spec)
    phi_c = centers.centers[0][0]
    vp_phi = operator_variance(p_phi(), state, phi_c, spec)
    vp_theta = operator_variance(p_theta_n(n), state, phi_c, spec)
    return MeasureSet(c_var, var_t, c_var + var_t, c_var * var_t, vp_phi, vp_theta,
                      n, mean_t, centers)


def stereo_second_moments(state, r=1.0, spec=None):
    """<q1^2>, <q2^2> for q = 2 r cot(theta/2) (cos phi, sin phi), with divergence detection."""
    spec = spec or GridSpec.default()

    def q2(trig):
        return lambda p, t: (2 * r / np.tan(t / 2) * trig(p)) ** 2 * state.density(p, t)

    return integrate_sphere(q2(np.cos), 0.0, spec), integrate_sphere(q2(np.sin), 0.0, spec)
