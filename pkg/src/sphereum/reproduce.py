"""Reference values and the comparison table behind ``sphereum reproduce``.

Each row pairs a computed quantity with its published value.  Rows come in
four kinds: ``rounded`` (published to 2-3 significant figures, compared at the
user tolerance), ``exact`` (closed forms, 1e-6 relative), ``angle`` (centre
locations, 1e-4 rad absolute) and ``divergent`` (pass iff the value is inf).
"""
import math
from dataclasses import asdict, dataclass
from typing import Optional

from . import circle
from .measures import centered_phi_variance, find_packet_centers, stereo_second_moments, theta_variance
from .operators import operator_variance, p_theta_n
from .quadrature import GridSpec
from .states import make_state

EXACT_TOL = 1e-6
ANGLE_TOL = 1e-4
PI = math.pi

SPHERE_STATES = {
    "f_g1_k2": dict(family="f", gamma=1, k=2),
    "f_g5_k2": dict(family="f", gamma=5, k=2),
    "f_g1_k1": dict(family="f", gamma=1, k=1),
    "f_g5_k1": dict(family="f", gamma=5, k=1),
    "cs_t1": dict(family="cs", tau=1.0),
    "cs_t0.2": dict(family="cs", tau=0.2),
    "psi0": dict(family="psi0"),
    "uniform": dict(family="uniform"),
}


@dataclass
class Row:
    name: str
    computed: float
    paper_value: Optional[float]
    kind: str
    tol: float
    abs_diff: float = math.nan
    rel_diff: float = math.nan
    passed: bool = False

    def __post_init__(self):
        c, p = self.computed, self.paper_value
        if self.kind == "divergent":
            self.passed = math.isinf(c)
            self.abs_diff = self.rel_diff = 0.0 if self.passed else math.inf
            return
        if p is None:
            self.passed = True
            return
        if self.kind == "angle":
            d = (c - p) % (2 * PI)
            self.abs_diff = min(d, 2 * PI - d)
        else:
            self.abs_diff = abs(c - p)
        self.rel_diff = self.abs_diff / abs(p) if p else self.abs_diff
        measure = self.abs_diff if self.kind == "angle" else self.rel_diff
        self.passed = bool(measure <= self.tol)

    def as_dict(self):
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


def _circle_rows(tol, spec):
    rows = []
    exact = lambda name, c, p: rows.append(Row(name, float(c), p, "exact", EXACT_TOL))
    for label, st, (vc, vs) in (("psi_m", circle.psi_m(1), (0.5, 0.5)),
                                 ("psi_cos", circle.psi_cos(), (0.75, 0.25)),
                                 ("psi_sin", circle.psi_sin(), (0.25, 0.75))):
        var_c, var_s, _ = circle.trig_variances(st, spec)
        exact(f"circle {label} var cos", var_c, vc)
        exact(f"circle {label} var sin", var_s, vs)
    for label, st in (("psi_m", circle.psi_m(1)), ("psi_sin", circle.psi_sin()),
                      ("psi_sin2", circle.psi_sin2())):
        exact(f"circle {label} centroid measure", circle.centroid_measure(st, spec), 1.0)
    kr_sin, _ = circle.kr_measures(circle.psi_sin(), spec)
    rows.append(Row("circle psi_sin KR position", kr_sin, 0.346, "rounded", tol))
    for label, st in (("psi_sin2", circle.psi_sin2()), ("uniform", circle.psi_uniform())):
        rows.append(Row(f"circle {label} KR position", circle.kr_measures(st, spec)[0],
                        math.inf, "divergent", 0.0))
    return rows


_ROUNDED = {
    "f_g1_k2": (2.94, 0.329),
    "f_g5_k2": (2.57, 0.146),
    "f_g1_k1": (1.91, 0.329),
    "f_g5_k1": (0.418, 0.146),
    "cs_t1": (1.57, 0.419),
    "cs_t0.2": (0.439, 0.185),
}
_P1_THETA = {"f_g1_k2": 0.57, "f_g5_k2": 1.54, "cs_t1": 0.419, "cs_t0.2": 1.38}


def build_rows(tol=0.02, spec=None):
    """Every reproducible value as a list of :class:`Row`."""
    spec = spec or GridSpec.default()
    rows = _circle_rows(tol, spec)
    states = {k: make_state(v, spec) for k, v in SPHERE_STATES.items()}
    centers = {k: find_packet_centers(s, spec) for k, s in states.items()}

    for key, (cphi, vtheta) in _ROUNDED.items():
        rows.append(Row(f"{key} c_var_phi", centered_phi_variance(states[key], spec, centers[key]),
                        cphi, "rounded", tol))
        rows.append(Row(f"{key} var_theta", theta_variance(states[key], spec)[1], vtheta,
                        "rounded", tol))

    for key, expected in (("f_g1_k2", [0.0, PI]), ("f_g5_k2", [0.0, PI]),
                          ("cs_t1", [PI]), ("cs_t0.2", [PI])):
        got = centers[key]
        rows.append(Row(f"{key} center count", float(got.multiplicity), float(len(expected)),
                        "exact", EXACT_TOL))
        for i, phi_c in enumerate(expected):
            if i < len(got.centers):
                phi, theta = got.centers[i]
                rows.append(Row(f"{key} center {i} phi", phi, phi_c, "angle", ANGLE_TOL))
                rows.append(Row(f"{key} center {i} theta", theta, PI / 2, "angle", ANGLE_TOL))

    exact = lambda name, c, p: rows.append(Row(name, float(c), p, "exact", EXACT_TOL))
    for key, vtheta in (("psi0", PI ** 2 / 12), ("uniform", PI ** 2 / 4 - 2)):
        exact(f"{key} c_var_phi", centered_phi_variance(states[key], spec, centers[key]), PI ** 2 / 3)
        exact(f"{key} var_theta", theta_variance(states[key], spec)[1], vtheta)
    for n, value in ((1, 0.125), (2, 0.125), (3, 9 / 64)):
        exact(f"psi0 var p_theta_n{n}", operator_variance(p_theta_n(n), states["psi0"], 0.0, spec), value)

    for key, value in _P1_THETA.items():
        phi_c = centers[key].centers[0][0]
        rows.append(Row(f"{key} var p_theta_n1",
                        operator_variance(p_theta_n(1), states[key], phi_c, spec), value,
                        "rounded", tol))

    for key in ("f_g1_k2", "cs_t1", "psi0"):
        q1, q2 = stereo_second_moments(states[key], 1.0, spec)
        rows.append(Row(f"{key} <q1^2>", q1.finite_or_inf(), math.inf, "divergent", 0.0))
        rows.append(Row(f"{key} <q2^2>", q2.finite_or_inf(), math.inf, "divergent", 0.0))
    for key in ("uniform", "f_g1_k2", "cs_t1"):
        rows.append(Row(f"{key} var p_theta_n0",
                        operator_variance(p_theta_n(0), states[key], 0.0, spec),
                        math.inf, "divergent", 0.0))
    return rows


def summary(rows):
    """(number passed, number of rows, names of failing rows)."""
    failed = [r.name for r in rows if not r.passed]
    return len(rows) - len(failed), len(rows), failed

