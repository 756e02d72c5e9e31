import csv
import json

import numpy as np
import pytest
import yaml

from cpxpoly.cli import (CSV_COLUMNS, instance_from_dict, main, parse_instance, run_case,
                         serialize_instance)
from cpxpoly.errors import ParseError, UnknownCase, ValidationError

COUNTEREXAMPLE = {
    "n": 4,
    "norm": {"kind": "facets", "data": np.eye(4).tolist()},
    "subspace": {"span": [[0, 0, [0, -1], [0, 1]], [[0, 1], [0, -1], [1, -1], [1, 1]]]},
    "x": [1, 1, 1, 1],
}


def _write(tmp_path, doc, name="inst.yaml"):
    p = tmp_path / name
    p.write_text(yaml.safe_dump(doc))
    return str(p)


def test_parse_counterexample(tmp_path):
    inst = parse_instance(_write(tmp_path, COUNTEREXAMPLE))
    assert inst.norm_kind == "facets"
    assert inst.norm().facets.shape == (4, 4)
    assert inst.subspace().dim == 2


def test_json_is_accepted(tmp_path):
    p = tmp_path / "inst.json"
    p.write_text(json.dumps(COUNTEREXAMPLE))
    assert parse_instance(str(p)).n == 4


def test_non_spanning_vertices(tmp_path):
    doc = {"n": 2, "norm": {"kind": "vertices", "data": [[1, 1]]}, "x": [1, 0]}
    with pytest.raises(ValidationError, match="vertices do not span"):
        parse_instance(_write(tmp_path, doc))


def test_mismatched_dimensions_name_the_field(tmp_path):
    doc = dict(COUNTEREXAMPLE, x=[1, 1, 1])
    with pytest.raises(ValidationError, match="x"):
        parse_instance(_write(tmp_path, doc))
    doc = dict(COUNTEREXAMPLE, subspace={"span": [[1, 0]]})
    with pytest.raises(ValidationError, match="subspace.span"):
        parse_instance(_write(tmp_path, doc))


def test_parse_errors_have_locations(tmp_path):
    with pytest.raises(ParseError, match="norm.data\\[0\\]\\[1\\]"):
        instance_from_dict({"n": 2, "norm": {"kind": "facets", "data": [[1, "a"], [0, 1]]}})
    p = tmp_path / "bad.yaml"
    p.write_text("n: 2\nnorm: {kind: [\n")
    with pytest.raises(ParseError, match="line"):
        parse_instance(str(p))


def test_round_trip(tmp_path):
    doc = dict(COUNTEREXAMPLE, y0=[[0.5, 0.25], 0, 1, -1],
               projection={"g": [[1, 1, 1, 1]], "w": [[0.25, 0.25, 0.25, 0.25]]})
    doc["subspace"] = {"kernel": [[1, 1, 1, 1]]}
    inst = parse_instance(_write(tmp_path, doc))
    again = parse_instance(_write(tmp_path, yaml.safe_load(serialize_instance(inst)), "b.yaml"))
    assert inst.equals(again)


@pytest.mark.parametrize("name", ["linf4-counterexample", "l1-alpha2", "linf-hyperplane",
                                  "lp-1dim", "duality-witness"])
def test_named_cases_pass(name):
    rep, ok, _ = run_case(name)
    assert ok and rep["status"] == "pass"


def test_unknown_case():
    with pytest.raises(UnknownCase):
        run_case("unknown")
    assert main(["run-case", "unknown"]) == 2


def test_hyperplane_case_numbers():
    rep, ok, _ = run_case("linf-hyperplane")
    assert rep["numbers"]["lambda"] == pytest.approx(1 / 3)
    assert rep["numbers"]["projection_norm"] == pytest.approx(4 / 3)


def test_run_case_csv(tmp_path, capsys):
    out = tmp_path / "probe.csv"
    assert main(["run-case", "linf4-counterexample", "--csv", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == CSV_COLUMNS and len(rows) == 101
    report = yaml.safe_load(capsys.readouterr().out)
    assert report["status"] == "pass"
    assert set(report) == {"command", "status", "numbers", "witnesses", "provenance"}


def test_commands_on_counterexample(tmp_path, capsys):
    path = _write(tmp_path, COUNTEREXAMPLE)
    assert main(["norm-eval", path]) == 0
    assert yaml.safe_load(capsys.readouterr().out)["numbers"]["norm"] == pytest.approx(1)
    assert main(["best-approx", path]) == 0
    assert yaml.safe_load(capsys.readouterr().out)["numbers"]["distance"] == pytest.approx(1)
    assert main(["certify", path, "--tol", "1e-8", "--seed", "3", "--samples", "10"]) == 0
    rep = yaml.safe_load(capsys.readouterr().out)
    assert rep["status"] == "unique" and rep["provenance"]["seed"] == 3


def test_projection_commands(tmp_path, capsys):
    doc = {"n": 3, "norm": {"kind": "facets", "data": np.eye(3).tolist()},
           "subspace": {"kernel": [[1 / 3, 1 / 3, 1 / 3]]}}
    path = _write(tmp_path, doc)
    assert main(["min-proj", path]) == 0
    rep = yaml.safe_load(capsys.readouterr().out)
    assert rep["numbers"]["projection_norm"] == pytest.approx(4 / 3, abs=1e-6)
    assert main(["cm", path]) == 0
    assert yaml.safe_load(capsys.readouterr().out)["numbers"]["trace"] == pytest.approx(4 / 3, abs=1e-6)
    assert main(["realify-certify", path, "--samples", "100"]) == 0
    assert yaml.safe_load(capsys.readouterr().out)["status"] == "two-strong"


def test_alpha_probe_command(tmp_path, capsys):
    doc = {"n": 4, "norm": {"kind": "vertices", "data": np.eye(4).tolist()},
           "subspace": {"span": [[1, -1, [0, 1], [0, -1]]]}, "x": [1, 1, 1, 1],
           "y0": [1, -1, [0, 1], [0, -1]]}
    out = tmp_path / "p.csv"
    assert main(["alpha-probe", _write(tmp_path, doc), "--alpha", "1.5", "--csv", str(out)]) == 0
    assert yaml.safe_load(capsys.readouterr().out)["status"] == "vanishing"
    rows = list(csv.DictReader(out.open()))
    assert all(r["verdict-flag"] == "1" and float(r["alpha"]) == 1.5 for r in rows)


def test_witness_command(tmp_path, capsys):
    doc = {"n": 2, "norm": {"kind": "vertices", "data": [[1, 0], [0, 1], [0.9, [0, 0.9]]]}}
    assert main(["duality-witness", _write(tmp_path, doc), "--K", "4"]) == 0
    rep = yaml.safe_load(capsys.readouterr().out)
    assert len(rep["witnesses"]["functionals"]) == 4


def test_exit_codes(tmp_path, monkeypatch):
    for argv in (["nope"], ["certify"], ["alpha-probe", "f.yaml"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 1
    assert main(["certify", str(tmp_path / "missing.yaml")]) == 2
    monkeypatch.setenv("CPX_APPROX_THREADS", "zero")
    assert main(["run-case", "lp-1dim"]) == 2
    monkeypatch.setenv("CPX_APPROX_THREADS", "2")
    assert main(["run-case", "lp-1dim"]) == 0
