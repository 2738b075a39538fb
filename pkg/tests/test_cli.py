import csv
import io
import json

import numpy as np
import pytest

from rieszfield.cli import RunConfig, run
from rieszfield.errors import DomainError


def _run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_radius_output():
    code, out, _ = _run("radius", "--d", "3", "--s", "1", "--gamma", "-10", "--height", "1")
    assert code == 0
    assert out.strip() == "R0 = 0.524028063613"


def test_classify_output():
    charges = json.dumps([{"gamma": -2, "height": 1}, {"gamma": 1, "height": 3}])
    code, out, _ = _run("classify", "--d", "2", "--s", "1", "--charges", charges)
    assert code == 0
    rep = json.loads(out)
    assert rep["verdict"] == "WeaklyAdmissible-Compact"
    assert rep["case"] == "iii"
    assert rep["radius"] == pytest.approx(4.978, rel=1e-3)


def test_validation_errors_exit_1():
    for argv in (
        ["radius", "--d", "3", "--s", "1", "--gamma", "-0.5", "--height", "1"],
        ["radius", "--d", "3", "--s", "5", "--gamma", "-2", "--height", "1"],
        ["radius", "--d", "3", "--s", "1", "--gamma", "-2"],
        ["classify", "--d", "2", "--s", "1", "--charges", "not json"],
        ["figure", "--id", "9"],
    ):
        code, _, err = _run(*argv)
        assert code == 1, argv
        assert "error" in json.loads(err)
    code, _, _ = _run("nosuchtask")
    assert code == 1


def test_numeric_failure_exit_2():
    code, _, err = _run("frostman", "--d", "2", "--s", "1", "--gamma", "-5", "--height", "1",
                        "--tol", "1e-300")
    assert code == 2
    payload = json.loads(err)
    assert payload["error"] == "NumericError"


def test_frostman_and_density(tmp_path):
    code, out, _ = _run("frostman", "--d", "2", "--s", "1", "--gamma", "-5", "--height", "1")
    assert code == 0 and json.loads(out)["passed"]
    path = tmp_path / "dens.csv"
    code, out, _ = _run("density", "--d", "2", "--s", "1", "--gamma", "-5", "--height", "1",
                        "--points", "11", "--out", str(path))
    assert code == 0
    assert json.loads(out)["mass"] == pytest.approx(1.0, abs=1e-6)
    rows = list(csv.reader(path.open()))
    assert rows[0] == ["r", "density"] and len(rows) == 12


def test_config_file_and_override(tmp_path):
    cfg = {"kernel": {"d": 3, "s": 1}, "charges": [{"gamma": -2.5, "height": 1}], "task": "radius"}
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    code, out, _ = _run("radius", "--config", str(path))
    assert code == 0 and float(out.split("=")[1]) == pytest.approx(1.090, rel=5e-3)
    code, out2, _ = _run("radius", "--config", str(path), "--height", "2", "--gamma", "-2.5")
    assert float(out2.split("=")[1]) == pytest.approx(2 * float(out.split("=")[1]), rel=1e-10)
    path.write_text(json.dumps({**cfg, "colour": "red"}))
    assert _run("radius", "--config", str(path))[0] == 1


def test_runconfig_round_trip_and_unknown_keys():
    cfg = RunConfig({"d": 2, "s": 1.0}, [{"gamma": -5.0, "height": 1.0}], "oracle",
                    {"n": 30, "seed": 4, "max_iters": 50})
    again = RunConfig.from_json(cfg.to_json())
    assert again == cfg
    with pytest.raises(DomainError):
        RunConfig({"d": 2, "s": 1.0, "q": 1}, [], "radius")
    with pytest.raises(DomainError):
        RunConfig({"d": 2, "s": 1.0}, [{"gamma": -2, "height": 1, "x": 0}], "radius")
    with pytest.raises(DomainError):
        RunConfig({"d": 2, "s": 1.0}, [], "radius", {"nope": 1})
    with pytest.raises(DomainError):
        RunConfig({"d": 2, "s": 1.0}, [], "bogus")


def test_oracle_round_trip_is_bit_identical(tmp_path):
    cfg = RunConfig({"d": 2, "s": 1.0}, [{"gamma": -5.0, "height": 1.0}], "oracle",
                    {"n": 30, "seed": 4, "max_iters": 50})
    path = tmp_path / "cfg.json"
    path.write_text(cfg.to_json())
    outs = [_run("oracle", "--config", str(path))[1] for _ in range(2)]
    assert outs[0] == outs[1]
    header = outs[0].splitlines()[0]
    assert header == "r_lo,r_hi,density"


def test_figure_1_header_and_shape():
    code, out, _ = _run("figure", "--id", "1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# figure 1")
    assert lines[1] == "gamma,R0"
    data = np.array([[float(v) for v in ln.split(",")] for ln in lines[2:]])
    assert data[0, 0] == -10 and data[-1, 0] == pytest.approx(-1.05)
    assert np.all(np.diff(data[:, 1]) > 0)


@pytest.mark.parametrize("fig", [2, 3, 4])
def test_fast_figures_have_comment_and_header(fig):
    code, out, _ = _run("figure", "--id", str(fig))
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith(f"# figure {fig}")
    assert "," in lines[1] and not lines[1][0].isdigit()


def test_figure_2_vanishes_at_edge():
    lines = _run("figure", "--id", "2")[1].splitlines()[2:]
    rows = np.array([[float(v) for v in ln.split(",")] for ln in lines])
    for h in (1.0, 2.0):
        dens = rows[rows[:, 0] == h, 2]
        assert dens[-1] == 0 and np.all(dens[:-1] > 0)
        assert np.all(np.diff(dens) <= 0)


def _figure_rows(fig):
    lines = _run("figure", "--id", str(fig))[1].splitlines()
    return lines[0], lines[1], [ln.split(",") for ln in lines[2:]]


def test_figure_5_pair_radius_shape():
    comment, header, rows = _figure_rows(5)
    assert "empirical" in comment
    assert header == "sweep,gamma,h2,R0,R_inclusion"
    by_gamma = [float(r[3]) for r in rows if r[0] == "gamma"]
    by_h2 = [float(r[3]) for r in rows if r[0] == "h2"]
    assert np.all(np.diff(by_gamma) < 0)
    assert np.all(np.diff(by_h2) < 0)
    # the candidate support sits inside the proven inclusion ball
    assert all(float(r[3]) < float(r[4]) for r in rows)


def test_figure_6_densities_decrease_to_zero():
    _, header, rows = _figure_rows(6)
    assert header == "gamma,r,density"
    data = np.array(rows, dtype=float)
    for g in (1.0, 3.0):
        dens = data[data[:, 0] == g, 2]
        assert dens[-1] == 0 and np.all(dens[:-1] > 0)
        assert np.all(np.diff(dens) < 0)
