"""First-order differential operators on sphere states and their moments.

Every variance and covariance is taken in Gram form,
<(X - <X>) psi | (Y - <Y>) psi>, so only single applications of an operator
to psi are ever needed.
"""
import re
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .quadrature import (DivergentIntegral, GridSpec, integrate_sphere, require_finite,
                         theta_rule, window_rule)

HERMITICITY_TOL = 1e-8


class HermiticityError(ArithmeticError):
    pass


class OperatorError(ValueError):
    pass


@dataclass(frozen=True)
class DiffOperator:
    """-i a(theta) d/dtheta - i b d/dphi + c(phi, theta)."""

    a_theta: Optional[Callable] = None
    b_phi: float = 0.0
    c_mult: Optional[Callable] = None
    label: str = "op"
    hermitian: bool = True

    def act(self, state):
        a, b, c = self.a_theta, self.b_phi, self.c_mult

        def applied(phi, theta):
            out = 0j
            if a is not None:
                out = out - 1j * a(theta) * state.partial("theta", phi, theta)
            if b:
                out = out - 1j * b * state.partial("phi", phi, theta)
            if c is not None:
                out = out + c(phi, theta) * state(phi, theta)
            return out

        return applied


@dataclass(frozen=True)
class Coordinate:
    """Multiplication by phi (in window coordinates) or by theta."""

    name: str

    @property
    def label(self):
        return self.name

    hermitian = True

    def act(self, state):
        if self.name == "phi":
            return lambda phi, theta: phi * state(phi, theta)
        return lambda phi, theta: theta * state(phi, theta)


PHI = Coordinate("phi")
THETA = Coordinate("theta")


def p_phi():
    return DiffOperator(b_phi=1.0, label="p_phi")


def p_theta_n(n):
    """-i sin^n d/dtheta - i (n+1)/2 cos sin^(n-1); n = 0 gives -i d/dtheta - (i/2) cot."""
    if n < 0:
        raise OperatorError("n must be non-negative")
    return DiffOperator(a_theta=lambda t: np.sin(t) ** n,
                        c_mult=lambda p, t: -0.5j * (n + 1) * np.cos(t) * np.sin(t) ** (n - 1),
                        label=f"p_theta_n{n}")


def p_theta_naive():
    """-i d/dtheta, not symmetric with respect to sin(theta) dtheta dphi."""
    return DiffOperator(a_theta=lambda t: np.ones_like(t), label="p_theta_naive",
                        hermitian=False)


def parse_operator(label):
    """Operand from its CLI label: phi, theta, p_phi, p_theta_n<k>, p_theta_naive."""
    label = label.strip()
    if label == "phi":
        return PHI
    if label == "theta":
        return THETA
    if label == "p_phi":
        return p_phi()
    if label == "p_theta_naive":
        return p_theta_naive()
    m = re.fullmatch(r"p_theta_n(\d+)", label)
    if m:
        return p_theta_n(int(m.group(1)))
    raise OperatorError(f"unknown operator label {label!r}")


@dataclass
class AppliedState:
    function: Callable
    values: np.ndarray
    phi: np.ndarray
    theta: np.ndarray
    norm: object
    finite_norm: bool
    label: str


def apply(op, state, spec=None, window_center=0.0):
    """Apply ``op`` to ``state``; values are sampled on the base quadrature grid
    and the norm of the result is integrated with divergence detection."""
    spec = spec or GridSpec.default()
    f = op.act(state)
    theta, _ = theta_rule(spec.n_theta)
    phi, _ = window_rule(window_center, spec.n_phi)
    with np.errstate(all="ignore"):
        values = np.broadcast_to(f(phi[:, None], theta[None, :]), (phi.size, theta.size))
    norm = integrate_sphere(lambda p, t: np.abs(f(p, t)) ** 2, window_center, spec)
    return AppliedState(f, np.array(values, dtype=complex), phi, theta, norm,
                        not norm.divergent, f"{op.label}({state.label})")


def expectation(op, state, window_center=0.0, spec=None):
    """<psi | X psi> as a complex number (raises HermiticityError for Hermitian
    operands whose mean comes out non-real)."""
    f = op.act(state)
    res = integrate_sphere(lambda p, t: np.conj(state(p, t)) * f(p, t), window_center,
                           spec or GridSpec.default())
    mean = complex(require_finite(res, f"<{op.label}> in {state.label}"))
    if op.hermitian and abs(mean.imag) > HERMITICITY_TOL * (1 + abs(mean.real)):
        raise HermiticityError(f"hermiticity violated: Im<{op.label}> = {mean.imag:.3e}")
    return mean


def centered_inner(state, x1, x2, window_center=0.0, spec=None, means=None):
    """<(X1 - <X1>) psi | (X2 - <X2>) psi> with its ConvergenceResult."""
    spec = spec or GridSpec.default()
    if means is None:
        means = (expectation(x1, state, window_center, spec),
                 expectation(x2, state, window_center, spec))
    f1, f2 = x1.act(state), x2.act(state)
    mu1, mu2 = means

    def integrand(p, t):
        psi = state(p, t)
        return np.conj(f1(p, t) - mu1 * psi) * (f2(p, t) - mu2 * psi)

    return integrate_sphere(integrand, window_center, spec)


def operator_variance(op, state, window_center=0.0, spec=None):
    """Gram-form variance <(X - <X>) psi|(X - <X>) psi>; ``inf`` when it diverges."""
    try:
        res = centered_inner(state, op, op, window_center, spec)
    except DivergentIntegral:
        return np.inf
    return res.finite_or_inf()


def generalized_cov(state, x1, x2, window_center=0.0, spec=None):
    """(g_cov, g_comm) = (Re G12, 2 Im G12) with G12 the centred inner product.

    With the inner product antilinear in its first slot, <[X1, X2]> = i g_comm
    for operands whose products are well defined.
    """
    try:
        res = centered_inner(state, x1, x2, window_center, spec)
    except DivergentIntegral:
        return np.inf, np.inf
    if res.divergent:
        return np.inf, np.inf
    g = complex(res.value)
    return g.real, 2 * g.imag


def symmetry_defect(op, psi, chi, spec=None):
    """|<O psi|chi> - <psi|O chi>|; zero for operators symmetric on these states."""
    spec = spec or GridSpec.default()
    opsi, ochi = op.act(psi), op.act(chi)
    left = integrate_sphere(lambda p, t: np.conj(opsi(p, t)) * chi(p, t), 0.0, spec)
    right = integrate_sphere(lambda p, t: np.conj(psi(p, t)) * ochi(p, t), 0.0, spec)
    return abs(complex(left.value) - complex(right.value))
