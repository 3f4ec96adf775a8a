"""Gauss-Legendre integration over the unit sphere and over 2*pi azimuthal windows.

Every integral is evaluated on a tensor grid: Gauss-Legendre in theta mapped
to [0, pi] (the sin(theta) surface weight is applied here, not by callers) and
Gauss-Legendre in phi mapped to the window [phi0 - pi, phi0 + pi].  Node counts
are doubled until two successive levels agree, the refinement budget runs out,
or the sequence is recognised as growing without bound.
"""
import enum
import os
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

# Points evaluated per call of the integrand; bounds peak memory on fine levels.
_CHUNK_POINTS = 1 << 19

# Increment-ratio threshold for the non-decaying-increment divergence test.
_DIVERGENT_RATIO = 0.9


class QuadratureError(ValueError):
    pass


class NonIntegrableSample(QuadratureError):
    pass


class DivergentIntegral(QuadratureError):
    pass


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_REFINEMENTS = "MaxRefinements"
    DIVERGENT = "Divergent"


def _env_default_counts():
    raw = os.environ.get("SPHEREUM_DEFAULT_GRID", "").strip()
    if not raw:
        return 128, 128
    parts = [int(p) for p in raw.replace("x", ",").split(",") if p.strip()]
    if len(parts) == 1:
        return parts[0], parts[0]
    return parts[0], parts[1]


@dataclass(frozen=True)
class GridSpec:
    """Node counts and refinement policy for the tensor quadrature.

    ``SPHEREUM_DEFAULT_GRID`` ("N" or "NTHETA,NPHI") overrides the default node
    counts of ``GridSpec.default()``.
    """

    n_theta: int = 128
    n_phi: int = 128
    max_refinements: int = 4
    rel_tol: float = 1e-9

    def __post_init__(self):
        if self.n_theta < 8 or self.n_phi < 8:
            raise ValueError("GridSpec needs n_theta >= 8 and n_phi >= 8")
        if self.max_refinements < 0:
            raise ValueError("max_refinements must be non-negative")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")

    @classmethod
    def default(cls, **overrides):
        n_theta, n_phi = _env_default_counts()
        kw = dict(n_theta=n_theta, n_phi=n_phi)
        kw.update(overrides)
        return cls(**kw)

    def level(self, i):
        """Node counts (n_theta, n_phi) at refinement level ``i``."""
        return self.n_theta << i, self.n_phi << i

    def fixed(self):
        """Same node counts, no refinement."""
        return GridSpec(self.n_theta, self.n_phi, 0, self.rel_tol)


@dataclass
class ConvergenceResult:
    value: complex
    abs_error_estimate: float
    status: Status
    levels: list = field(default_factory=list)

    @property
    def converged(self):
        return self.status is Status.CONVERGED

    @property
    def divergent(self):
        return self.status is Status.DIVERGENT

    @property
    def real(self):
        return float(np.real(self.value))

    def finite_or_inf(self):
        """Real part of the value, or +inf when the integral diverges."""
        return np.inf if self.divergent else self.real


@lru_cache(maxsize=64)
def _legendre_rule(n):
    x, w = roots_legendre(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def theta_rule(n):
    """Nodes on (0, pi) and weights that already include sin(theta)."""
    x, w = _legendre_rule(n)
    theta = 0.5 * np.pi * (x + 1.0)
    return theta, 0.5 * np.pi * w * np.sin(theta)


def window_rule(center, n):
    """Nodes and weights for the azimuthal window [center - pi, center + pi]."""
    x, w = _legendre_rule(n)
    return center + np.pi * x, np.pi * w


def _tensor_sums(f, center, n_theta, n_phi):
    theta, wt = theta_rule(n_theta)
    phi, wp = window_rule(center, n_phi)
    rows = max(1, _CHUNK_POINTS // n_theta)
    row_vals = []
    row_abs = []
    for start in range(0, n_phi, rows):
        ph = phi[start:start + rows, None]
        vals = np.broadcast_to(np.asarray(f(ph, theta[None, :])), (ph.shape[0], n_theta))
        row_vals.append(vals @ wt)
        row_abs.append(np.abs(vals) @ wt)
    return np.concatenate(row_vals) @ wp, np.concatenate(row_abs) @ wp


def _circle_sums(g, center, n_phi):
    phi, wp = window_rule(center, n_phi)
    vals = np.broadcast_to(np.asarray(g(phi)), phi.shape)
    return vals @ wp, np.abs(vals) @ wp


def _looks_divergent(levels):
    if len(levels) < 4:
        return False
    v = np.abs(np.asarray(levels[-4:]))
    d = np.diff(np.real(levels[-4:]))
    if not (np.all(d > 0) or np.all(d < 0)):
        return False
    if not np.all(np.diff(v) > 0):
        return False
    geometric = np.all(v[1:] >= 2.0 * v[:-1])
    ad = np.abs(d)
    non_decaying = np.all(ad[1:] >= _DIVERGENT_RATIO * ad[:-1])
    return bool(geometric or non_decaying)


def _refine(level_sum, spec):
    levels = []
    scales = []
    status = Status.MAX_REFINEMENTS
    for i in range(spec.max_refinements + 1):
        value, scale = level_sum(i)
        if not (np.isfinite(value) and np.isfinite(scale)):
            continue
        levels.append(complex(value))
        scales.append(float(scale))
        if len(levels) >= 2:
            diff = abs(levels[-1] - levels[-2])
            floor = 1e-3 * scales[-1]
            if diff <= spec.rel_tol * (abs(levels[-1]) + floor):
                status = Status.CONVERGED
                break
        if _looks_divergent(levels):
            status = Status.DIVERGENT
            break
    if not levels:
        raise NonIntegrableSample("non-integrable sample: integrand is not finite "
                                  "at the quadrature nodes of every refinement level")
    if status is Status.DIVERGENT:
        err = np.inf
    elif len(levels) >= 2:
        err = abs(levels[-1] - levels[-2])
    else:
        err = np.inf
    return ConvergenceResult(levels[-1], float(err), status, levels)


def integrate_sphere(f, window_center=0.0, spec=None):
    """Integrate ``f(phi, theta)`` against sin(theta) dtheta dphi.

    Parameters
    ----------
    f : callable
        Vectorised integrand; called with broadcastable arrays of shape
        (m, 1) for phi and (1, n) for theta.  Only interior Gauss nodes are
        used, so amplitudes singular at the poles are never sampled there.
    window_center : float
        Centre phi0 of the azimuthal window [phi0 - pi, phi0 + pi].
    spec : GridSpec, optional

    Returns
    -------
    ConvergenceResult
    """
    spec = spec or GridSpec.default()
    center = float(window_center)

    def level_sum(i):
        nt, nphi = spec.level(i)
        with np.errstate(all="ignore"):
            return _tensor_sums(f, center, nt, nphi)

    return _refine(level_sum, spec)


def integrate_circle(g, window_center=0.0, spec=None):
    """Integrate ``g(phi)`` over [phi0 - pi, phi0 + pi] with the refinement contract
    of :func:`integrate_sphere` (using ``spec.n_phi``)."""
    spec = spec or GridSpec.default()
    center = float(window_center)

    def level_sum(i):
        with np.errstate(all="ignore"):
            return _circle_sums(g, center, spec.level(i)[1])

    return _refine(level_sum, spec)


def require_finite(result, what="integral"):
    """Return the value of ``result`` or raise when it diverged."""
    if result.divergent:
        raise DivergentIntegral(f"{what} diverges (levels: {result.levels})")
    return result.value
