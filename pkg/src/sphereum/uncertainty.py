"""Gram-Robertson matrices and the uncertainty relations built on them."""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .measures import find_packet_centers, sphere_mean
from .operators import PHI, expectation, p_theta_n, operator_variance
from .quadrature import (DivergentIntegral, GridSpec, Status, _looks_divergent, theta_rule,
                         window_rule)

VERDICT_SLACK = 1e-10
PSD_SLACK = 1e-10
_CHUNK_POINTS = 1 << 18


def _slack(lhs, rhs):
    return VERDICT_SLACK * (1 + abs(lhs) + abs(rhs))


@dataclass
class Verdict:
    name: str
    lhs: float
    rhs: float
    margin: float
    passed: bool


@dataclass
class GramReport:
    operators: list
    G: np.ndarray
    S: np.ndarray
    A: np.ndarray
    char_S: list
    char_A: list
    verdicts: list
    window_center: float
    status: Status = Status.CONVERGED
    min_eigenvalue: float = 0.0

    @property
    def all_passed(self):
        return all(v.passed for v in self.verdicts)


def characteristic_coefficients(M):
    """Sums of principal minors e_1..e_n of a square real matrix (n <= 8).

    e_1 is the trace and e_n the determinant.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("characteristic_coefficients needs a square matrix")
    if M.shape[0] > 8:
        raise ValueError("characteristic_coefficients supports n <= 8")
    return [float(x) for x in _kernels.principal_minor_sums(M)]


def _involves_phi(op):
    return op is PHI or getattr(op, "name", None) == "phi" or bool(getattr(op, "b_phi", 0))


def _gram_level(state, fns, means, center, n_theta, n_phi):
    theta, wt = theta_rule(n_theta)
    phi, wp = window_rule(center, n_phi)
    n = len(fns)
    G = np.zeros((n, n), dtype=complex)
    scale = np.zeros(n)
    rows = max(1, _CHUNK_POINTS // n_theta)
    for start in range(0, n_phi, rows):
        ph = phi[start:start + rows, None]
        w = (wp[start:start + rows, None] * wt[None, :]).ravel()
        psi = np.broadcast_to(state(ph, theta[None, :]), (ph.shape[0], n_theta))
        V = np.empty((n, w.size), dtype=complex)
        for i, (f, mu) in enumerate(zip(fns, means)):
            vals = np.broadcast_to(f(ph, theta[None, :]), psi.shape)
            V[i] = (vals - mu * psi).ravel()
        G += (np.conj(V) * w) @ V.T
        scale += (np.abs(V) ** 2) @ w
    return G, scale


def _refined_gram(state, ops, center, spec):
    means = [expectation(op, state, center, spec) for op in ops]
    fns = [op.act(state) for op in ops]
    levels = []
    status = Status.MAX_REFINEMENTS
    for i in range(spec.max_refinements + 1):
        with np.errstate(all="ignore"):
            G, scale = _gram_level(state, fns, means, center, *spec.level(i))
        if not (np.all(np.isfinite(G)) and np.all(np.isfinite(scale))):
            continue
        levels.append(G)
        if len(levels) >= 2:
            diff = np.abs(levels[-1] - levels[-2]).max()
            if diff <= spec.rel_tol * (np.abs(G).max() + 1e-3 * scale.max()):
                status = Status.CONVERGED
                break
        for j, op in enumerate(ops):
            if _looks_divergent([L[j, j] for L in levels]):
                raise DivergentIntegral(f"variance of {op.label} diverges on {state.label}")
    if not levels:
        raise DivergentIntegral(f"Gram matrix of {state.label} is not finite on any level")
    return levels[-1], status


def gram_matrix(state, ops, spec=None, window_center=None):
    """Gram-Robertson matrix G_ij = <(X_i - <X_i>) psi | (X_j - <X_j>) psi>.

    When any operand involves phi the azimuthal window is centred on the
    (first) packet centre of ``state`` unless ``window_center`` is given.

    Returns
    -------
    GramReport
        With S = Re G, A = Im G, their characteristic coefficients and the
        verdicts e_r(S) >= e_r(A) for r = 1..n plus a PSD check of G.
    """
    spec = spec or GridSpec.default()
    ops = list(ops)
    if not ops:
        raise ValueError("gram_matrix needs at least one operand")
    if window_center is None:
        window_center = 0.0
        if any(_involves_phi(op) for op in ops):
            window_center = find_packet_centers(state, spec).centers[0][0]
    G, status = _refined_gram(state, ops, float(window_center), spec)
    G = 0.5 * (G + G.conj().T)
    S, A = G.real.copy(), G.imag.copy()
    char_S = characteristic_coefficients(S)
    char_A = characteristic_coefficients(A)
    verdicts = []
    for r, (es, ea) in enumerate(zip(char_S, char_A), start=1):
        verdicts.append(Verdict(f"e{r}(S)>=e{r}(A)", es, ea, es - ea, es >= ea - _slack(es, ea)))
    min_eig = float(np.linalg.eigvalsh(G).min())
    trace = float(np.trace(S))
    verdicts.append(Verdict("G psd", min_eig, -PSD_SLACK * trace, min_eig + PSD_SLACK * trace,
                            min_eig >= -PSD_SLACK * trace))
    return GramReport([op.label for op in ops], G, S, A, char_S, char_A, verdicts,
                      float(window_center), status, min_eig)


@dataclass
class URResult:
    """lhs = var X1 var X2, rhs = |<[X1, X2]>|^2/4 + cov^2."""

    lhs: float
    rhs: float
    margin: float
    passed: bool
    g_cov: float
    g_comm: float
    report: Optional[GramReport] = None


def check_schrodinger_ur(state, X1, X2, spec=None, window_center=None):
    """Generalised Schroedinger-Robertson relation for the pair (X1, X2)."""
    rep = gram_matrix(state, [X1, X2], spec, window_center)
    g_cov, g_comm = rep.S[0, 1], 2 * rep.A[0, 1]
    lhs = rep.S[0, 0] * rep.S[1, 1]
    rhs = 0.25 * g_comm ** 2 + g_cov ** 2
    return URResult(float(lhs), float(rhs), float(lhs - rhs), bool(lhs >= rhs - _slack(lhs, rhs)),
                    float(g_cov), float(g_comm), rep)


def sin_power_means(state, n_max, spec=None):
    """<sin^n theta> for n = 1..n_max."""
    spec = spec or GridSpec.default()
    return [sphere_mean(state, lambda p, t, n=n: np.sin(t) ** n, 0.0, spec)
            for n in range(1, n_max + 1)]


@dataclass
class ComplementaryStudy:
    n_values: list
    psi0_variances: list
    minimal_n: list
    lower_bounds: dict = field(default_factory=dict)
    bound_winner: dict = field(default_factory=dict)

    @property
    def selected_n(self):
        """The n chosen by both criteria, or None when they disagree."""
        winners = set(self.bound_winner.values())
        if len(winners) == 1 and min(self.minimal_n) in winners:
            return min(self.minimal_n)
        return None


def best_complementary_study(states, n_max=6, spec=None, reference=None):
    """Rank the p_ntheta family by the two complementarity criteria.

    Criterion 1: smallest (Delta p_ntheta)^2 on the most delocalised state
    ``reference`` (taken from ``states`` by its ``psi0`` family tag when not
    given).  Criterion 2: largest lower bound |<sin^n theta>|^2/4 per state.
    """
    spec = spec or GridSpec.default()
    if n_max < 1:
        raise ValueError("n_max must be positive")
    if reference is None:
        picks = [s for s in states if s.params.get("family") == "psi0"]
        if not picks:
            raise ValueError("best_complementary_study needs the psi0 state")
        reference = picks[0]
    ns = list(range(1, n_max + 1))
    variances = [operator_variance(p_theta_n(n), reference, 0.0, spec) for n in ns]
    best = min(variances)
    minimal = [n for n, v in zip(ns, variances) if math.isclose(v, best, rel_tol=1e-6)]
    bounds, winners = {}, {}
    for s in states:
        b = [abs(m) ** 2 / 4 for m in sin_power_means(s, n_max, spec)]
        bounds[s.label] = b
        winners[s.label] = ns[int(np.argmax(b))]
    return ComplementaryStudy(ns, variances, minimal, bounds, winners)
