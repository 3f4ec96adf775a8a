"""Command-line front end.

    sphereum measure   --state s.json            spread measures and centres (JSON)
    sphereum ur        --state s.json --ops ...  Gram-Robertson report (JSON)
    sphereum grid      --state s.json --out g.csv  density samples for plotting
    sphereum reproduce --out DIR [--tol 0.02]    reference table (CSV + JSON)

Exit codes: 0 success, 1 reproduce row failures, 2 invalid input,
3 numeric failure, 4 write failure.
"""
import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, is_dataclass
from pathlib import Path

import numpy as np

from . import circle, reproduce
from .circle import SpectralDataError
from .measures import CenterSearchError, combined_measures
from .operators import HermiticityError, OperatorError, parse_operator
from .quadrature import GridSpec, QuadratureError
from .states import CircleState, StateError, make_state
from .uncertainty import check_schrodinger_ur, gram_matrix

EXIT_FAILED_ROWS = 1
EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_WRITE = 4

log = logging.getLogger("sphereum")


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# deterministic formatting
# ---------------------------------------------------------------------------

def fmt(x):
    """12 significant digits; inf/nan spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".12g")


def jsonable(obj):
    """Convert reports to JSON-ready data with every float rounded by :func:`fmt`."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": jsonable(obj.real), "im": jsonable(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        s = fmt(obj)
        return s if s in ("inf", "-inf", "nan") else float(s)
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def dumps(obj):
    return json.dumps(jsonable(obj), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# input handling
# ---------------------------------------------------------------------------

def load_state(path, spec):
    try:
        desc = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise CliError(EXIT_INPUT, f"cannot read state file {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_INPUT, f"malformed state file {path}: {exc}") from None
    if not isinstance(desc, dict):
        raise CliError(EXIT_INPUT, f"state file {path} must hold a JSON object")
    try:
        return desc, make_state(desc, spec)
    except (StateError, TypeError, ValueError) as exc:
        raise CliError(EXIT_INPUT, f"invalid state in {path}: {exc}") from None


def grid_spec(args):
    overrides = {}
    if args.grid_ntheta is not None:
        overrides["n_theta"] = args.grid_ntheta
    if args.grid_nphi is not None:
        overrides["n_phi"] = args.grid_nphi
    try:
        return GridSpec.default(**overrides)
    except ValueError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None


def write_text(path, text):
    try:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise CliError(EXIT_WRITE, f"cannot write {path}: {exc}") from None


def emit(text, out):
    if out:
        write_text(out, text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_measure(args):
    spec = grid_spec(args)
    desc, state = load_state(args.state, spec)
    if isinstance(state, CircleState):
        report = dict(state=desc, measures=circle.circle_measures(state, spec))
    else:
        ms = combined_measures(state, spec, n=args.n)
        centers = ms.centers
        ms.centers = None
        report = dict(state=desc, measures=ms, centers=centers)
    emit(dumps(report), args.out)
    return 0


def cmd_ur(args):
    spec = grid_spec(args)
    desc, state = load_state(args.state, spec)
    if isinstance(state, CircleState):
        raise CliError(EXIT_INPUT, "ur needs a sphere state")
    try:
        ops = [parse_operator(s) for s in args.ops.split(",") if s.strip()]
    except OperatorError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None
    if not ops:
        raise CliError(EXIT_INPUT, "no operators given")
    report = dict(state=desc, gram=gram_matrix(state, ops, spec))
    if len(ops) == 2:
        ur = check_schrodinger_ur(state, ops[0], ops[1], spec)
        ur.report = None
        report["schrodinger"] = ur
    emit(dumps(report), args.out)
    return 0


def density_grid(state, n_phi, n_theta):
    """Cell-centred samples; phi on [0, 2 pi), theta on (0, pi)."""
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    if isinstance(state, CircleState):
        return phi, None, state.density(phi)
    theta = np.pi * (np.arange(n_theta) + 0.5) / n_theta
    rho = np.broadcast_to(state.density(phi[:, None], theta[None, :]), (n_phi, n_theta))
    return phi, theta, rho


def cmd_grid(args):
    spec = grid_spec(args)
    _, state = load_state(args.state, spec)
    n_phi, n_theta = (args.resolution * 2)[:2]
    if n_phi < 2 or n_theta < 2:
        raise CliError(EXIT_INPUT, "resolution must be at least 2")
    phi, theta, rho = density_grid(state, n_phi, n_theta)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if theta is None:
        w.writerow(["phi", "density"])
        w.writerows([fmt(p), fmt(r)] for p, r in zip(phi, rho))
    else:
        w.writerow(["phi", "theta", "density", "weighted_density"])
        sin_t = np.sin(theta)
        for i, p in enumerate(phi):
            for j, t in enumerate(theta):
                w.writerow([fmt(p), fmt(t), fmt(rho[i, j]), fmt(sin_t[j] * rho[i, j])])
    emit(buf.getvalue(), args.out)
    return 0


def cmd_reproduce(args):
    spec = grid_spec(args)
    rows = reproduce.build_rows(args.tol, spec)
    cols = ["name", "computed", "paper_value", "abs_diff", "rel_diff", "tol", "kind", "pass"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in rows:
        d = r.as_dict()
        w.writerow([d["name"]] + [fmt(d[c]) if d[c] is not None else "" for c in cols[1:6]]
                   + [d["kind"], "true" if d["pass"] else "false"])
    out = Path(args.out)
    write_text(out / "reproduce.csv", buf.getvalue())
    write_text(out / "reproduce.json", dumps([r.as_dict() for r in rows]))
    n_pass, n, failed = reproduce.summary(rows)
    for r in rows:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}: computed {fmt(r.computed)}"
              f" reference {fmt(r.paper_value) if r.paper_value is not None else '-'}")
    print(f"{n_pass}/{n} rows within tolerance")
    return 0 if not failed else EXIT_FAILED_ROWS


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="sphereum",
                                description="Angular spread measures and uncertainty relations "
                                            "for wavefunctions on the circle and the sphere.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, state=True):
        if state:
            sp.add_argument("--state", required=True, help="state descriptor JSON file")
        sp.add_argument("--grid-ntheta", type=int, default=None, help="base theta node count")
        sp.add_argument("--grid-nphi", type=int, default=None, help="base phi node count")
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    sp = sub.add_parser("measure", help="spread measures of one state")
    common(sp)
    sp.add_argument("--n", type=int, default=1, help="index of the p_ntheta operator")
    sp.set_defaults(func=cmd_measure)

    sp = sub.add_parser("ur", help="Gram-Robertson report for a list of operators")
    common(sp)
    sp.add_argument("--ops", default="phi,theta,p_phi,p_theta_n1",
                    help="comma list from phi, theta, p_phi, p_theta_n<k>")
    sp.set_defaults(func=cmd_ur)

    sp = sub.add_parser("grid", help="density samples on a phi-theta grid (CSV)")
    common(sp)
    sp.add_argument("--resolution", type=int, nargs="+", default=[120, 60],
                    metavar="N", help="N_PHI [N_THETA] sample counts")
    sp.set_defaults(func=cmd_grid)

    sp = sub.add_parser("reproduce", help="compare computed values with the reference table")
    common(sp, state=False)
    sp.add_argument("--tol", type=float, default=0.02,
                    help="relative tolerance for rounded reference values")
    sp.set_defaults(func=cmd_reproduce, out="reproduce_out")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"sphereum: {exc}", file=sys.stderr)
        return exc.code
    except (QuadratureError, CenterSearchError, HermiticityError, SpectralDataError,
            ArithmeticError) as exc:
        print(f"sphereum: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
