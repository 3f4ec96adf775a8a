import csv
import json
import math

import pytest

from sphereum.cli import fmt, main


def _state(tmp_path, name, desc):
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(desc))
    return str(p)


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fmt_is_twelve_significant_digits():
    assert fmt(math.pi) == "3.14159265359"
    assert fmt(math.inf) == "inf" and fmt(float("nan")) == "nan"


def test_measure_two_peak_state(tmp_path, capsys):
    code, out, _ = _run(capsys, ["measure", "--state", _state(tmp_path, "f", dict(family="f", gamma=1, k=2))])
    assert code == 0
    rep = json.loads(out)
    assert rep["measures"]["c_var_phi"] == pytest.approx(2.94, rel=0.02)
    assert rep["centers"]["multiplicity"] == 2


def test_measure_uniform_is_degenerate(tmp_path, capsys):
    code, out, _ = _run(capsys, ["measure", "--state", _state(tmp_path, "u", dict(family="uniform"))])
    rep = json.loads(out)
    assert code == 0
    assert rep["measures"]["c_var_phi"] == pytest.approx(math.pi ** 2 / 3, rel=1e-11)
    assert rep["centers"]["degenerate"] is True


def test_measure_circle_state(tmp_path, capsys):
    code, out, _ = _run(capsys, ["measure", "--state", _state(tmp_path, "c", dict(family="circle_sin"))])
    assert code == 0
    assert json.loads(out)["measures"]["kr_phi"] == pytest.approx(0.5 * math.log(2), rel=1e-10)


def test_measure_is_deterministic(tmp_path, capsys):
    st = _state(tmp_path, "cs", dict(family="cs", tau=1.0))
    _, a, _ = _run(capsys, ["measure", "--state", st])
    _, b, _ = _run(capsys, ["measure", "--state", st])
    assert a == b


@pytest.mark.parametrize("content", ["{not json", "[1, 2]", '{"family": "nope"}', '{"family": "f", "gamma": -1}'])
def test_invalid_state_file_exit_2(tmp_path, capsys, content):
    p = tmp_path / "bad.json"
    p.write_text(content)
    code, _, err = _run(capsys, ["measure", "--state", str(p)])
    assert code == 2 and err


def test_missing_state_file_exit_2(tmp_path, capsys):
    assert _run(capsys, ["measure", "--state", str(tmp_path / "absent.json")])[0] == 2


def test_ur_all_verdicts(tmp_path, capsys):
    st = _state(tmp_path, "f", dict(family="f", gamma=1, k=2))
    code, out, _ = _run(capsys, ["ur", "--state", st, "--ops", "phi,theta,p_phi,p_theta_n1"])
    rep = json.loads(out)["gram"]
    assert code == 0
    assert all(v["passed"] for v in rep["verdicts"])
    assert len(rep["char_S"]) == 4


def test_ur_pair_reports_schrodinger(tmp_path, capsys):
    st = _state(tmp_path, "cs", dict(family="cs", tau=1.0))
    code, out, _ = _run(capsys, ["ur", "--state", st, "--ops", "theta,p_theta_n1"])
    rep = json.loads(out)
    assert code == 0 and rep["schrodinger"]["passed"] and rep["schrodinger"]["margin"] > 0


def test_ur_single_operand(tmp_path, capsys):
    st = _state(tmp_path, "cs", dict(family="cs", tau=1.0))
    code, out, _ = _run(capsys, ["ur", "--state", st, "--ops", "theta"])
    assert code == 0 and json.loads(out)["gram"]["G"] == [[{"im": 0.0, "re": pytest.approx(0.41866, rel=1e-4)}]]


def test_ur_unknown_label_exit_2(tmp_path, capsys):
    st = _state(tmp_path, "cs", dict(family="cs", tau=1.0))
    assert _run(capsys, ["ur", "--state", st, "--ops", "theta,p_r"])[0] == 2


def test_ur_divergent_operand_exit_3(tmp_path, capsys):
    st = _state(tmp_path, "u", dict(family="uniform"))
    assert _run(capsys, ["ur", "--state", st, "--ops", "theta,p_theta_n0"])[0] == 3


def _read_grid(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], [[float(x) for x in r] for r in rows[1:]]


def test_grid_two_peaks(tmp_path, capsys):
    out = tmp_path / "g.csv"
    st = _state(tmp_path, "f5", dict(family="f", gamma=5, k=2))
    assert _run(capsys, ["grid", "--state", st, "--resolution", "72", "31", "--out", str(out)])[0] == 0
    header, rows = _read_grid(out)
    assert header == ["phi", "theta", "density", "weighted_density"]
    assert len(rows) == 72 * 31
    top = sorted(rows, key=lambda r: -r[2])[:2]
    assert sorted(round(r[0], 6) for r in top) == [round(math.pi / 2, 6), round(3 * math.pi / 2, 6)]
    assert all(abs(r[1] - math.pi / 2) < 1e-9 for r in top)


def test_grid_cs_maximum(tmp_path, capsys):
    out = tmp_path / "g.csv"
    st = _state(tmp_path, "cs", dict(family="cs", tau=0.2))
    _run(capsys, ["grid", "--state", st, "--resolution", "36", "19", "--out", str(out)])
    _, rows = _read_grid(out)
    best = max(rows, key=lambda r: r[2])
    assert best[0] == pytest.approx(math.pi) and best[1] == pytest.approx(math.pi / 2)


def test_grid_uniform_and_circle(tmp_path, capsys):
    _, out, _ = _run(capsys, ["grid", "--state", _state(tmp_path, "u", dict(family="uniform")),
                              "--resolution", "5", "3"])
    dens = {line.split(",")[2] for line in out.splitlines()[1:]}
    assert len(dens) == 1
    _, out, _ = _run(capsys, ["grid", "--state", _state(tmp_path, "c", dict(family="circle_cos")),
                              "--resolution", "8"])
    assert out.splitlines()[0] == "phi,density" and len(out.splitlines()) == 9


@pytest.fixture(scope="module")
def reproduce_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("repro")
    code = main(["reproduce", "--out", str(out)])
    return code, out


def test_reproduce_outputs_are_consistent(reproduce_dir):
    code, out = reproduce_dir
    rows = json.loads((out / "reproduce.json").read_text())
    with open(out / "reproduce.csv", newline="") as fh:
        table = list(csv.DictReader(fh))
    assert [r["name"] for r in table] == [r["name"] for r in rows]
    assert list(table[0]) == ["name", "computed", "paper_value", "abs_diff", "rel_diff", "tol", "kind", "pass"]
    assert code == (0 if all(r["pass"] for r in rows) else 1)
    divergent = [r for r in rows if r["kind"] == "divergent"]
    assert divergent and all(r["computed"] == "inf" for r in divergent)


def test_reproduce_tight_tolerance_fails_rounded_rows(tmp_path, capsys):
    code, _, _ = _run(capsys, ["reproduce", "--tol", "1e-6", "--out", str(tmp_path)])
    rows = json.loads((tmp_path / "reproduce.json").read_text())
    assert code == 1
    assert all(not r["pass"] for r in rows if r["kind"] == "rounded")
    assert all(r["pass"] for r in rows if r["kind"] == "exact")


def test_reproduce_write_failure_exit_4(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert _run(capsys, ["reproduce", "--out", str(blocker / "sub")])[0] == 4
