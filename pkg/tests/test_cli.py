import csv
import json
from importlib import resources

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forelli.boundary_lab import random_charspec
from forelli.cli import RunConfig, build_report, parse_config, parse_vertices, report_body, run

SCHEMA = json.loads(resources.files("forelli").joinpath("report_schema.json").read_text())

GLOB2 = ["--function", "globevnik:k=3", "--vertices", "0.3+0i,0; -0.2+0i,0"]


def _load(path):
    data = json.loads(path.read_text())
    jsonschema.validate(data, SCHEMA)
    return data


def test_globevnik_two_vertices(tmp_path):
    out = tmp_path / "r.json"
    assert run(["test", *GLOB2, "--lines", "200", "--out", str(out)]) == 0
    data = _load(out)
    assert data["verdict"] == "pass" and data["details"]["collinear_vertex_set"]


def test_globevnik_third_vertex(tmp_path):
    out = tmp_path / "r.json"
    code = run(["test", "--function", "globevnik:k=3",
                "--vertices", "0.3+0i,0; -0.2+0i,0; 0,0.3+0i", "--out", str(out)])
    assert code == 1
    data = _load(out)
    assert data["worst_offender"]["max_residual"] > 1e-3


def test_decompose_single_slice(tmp_path):
    out = tmp_path / "slices.json"
    assert run(["decompose", "--function", "poly:z1*z2", "--numax", "4", "--out", str(out)]) == 0
    assert _load(out)["details"]["active_slices"] == [1]


@pytest.mark.parametrize("argv", [
    ["test", "--function", "bogus", "--vertices", "0,0"],
    ["test", "--function", "modulus_sq", "--vertices", "0,0;0.1"],
    ["test", "--function", "modulus_sq", "--vertices", "0,0", "--out", "/nonexistent/dir/r.json"],
    ["test", "--function", "modulus_sq"],
    ["test", "--function", "modulus_sq", "--vertices", "1,0"],
    ["test", "--function", "modulus_sq", "--vertices", "0,0", "--nodes", "100"],
    ["frobnicate"],
    [],
    ["disc-test", "--function", "modulus_sq"],
])
def test_usage_errors(argv, capsys):
    assert run(argv) == 2
    err = capsys.readouterr().err.strip().splitlines()
    assert len(err) == 1 and err[0].startswith("forelli: error:")


def test_inconclusive_exit_code(tmp_path):
    # degree 15 folds onto negative indices at 16 nodes but not at 32
    out = tmp_path / "r.json"
    code = run(["test", "--function", "poly:z1^15+z2^15", "--vertices", "0,0", "--lines", "10",
                "--nodes", "16", "--mmax", "4", "--out", str(out)])
    assert code == 3
    assert _load(out)["verdict"] == "inconclusive"


def test_modulus_sq_fails(tmp_path):
    out = tmp_path / "r.json"
    assert run(["test", "--function", "modulus_sq", "--vertices", "0.5,0", "--lines", "20", "--out", str(out)]) == 1


def test_csv_export(tmp_path):
    out = tmp_path / "r.csv"
    assert run(["test", *GLOB2, "--lines", "3", "--format", "csv", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["line", "m", "residual"]
    assert len(rows) == 1 + 6 * 32


def test_disc_test_and_poisson_check(tmp_path):
    out = tmp_path / "d.json"
    assert run(["disc-test", "--disc", "z^2*zbar + 3zbar^2 - z", "--out", str(out)]) == 0
    assert _load(out)["details"]["fit"]["residual"] < 1e-10
    assert run(["disc-test", "--disc", "zbar^2", "--nu", "1", "--out", str(out)]) == 1
    assert run(["disc-test", "--function", "globevnik:k=3", "--nu", "4", "--centers", "0.2; -0.3i",
                "--out", str(out)]) == 0
    out = tmp_path / "p.json"
    assert run(["poisson-check", "--out", str(out)]) == 0
    assert all(c["ok"] for c in _load(out)["reports"])


def test_charspec_roundtrip(tmp_path):
    spec = random_charspec(np.random.default_rng(11), 6, 4)
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(spec.to_json()))
    out = tmp_path / "c.json"
    assert run(["charspec-roundtrip", "--spec", str(path), "--lines", "20", "--out", str(out)]) == 0
    d = _load(out)["details"]
    assert d["recovery_relative_error"] < 1e-6
    path.write_text("{not json")
    assert run(["charspec-roundtrip", "--spec", str(path)]) == 2


def test_determinism():
    cfg = parse_config(["test", *GLOB2, "--lines", "30", "--seed", "5", "--workers", "3"])
    a = json.dumps(report_body(build_report(cfg)))
    cfg.workers = 1
    b = build_report(cfg)
    b["config_echo"]["workers"] = 3
    assert a == json.dumps(report_body(b))


def test_seed_changes_directions():
    a = build_report(parse_config(["test", *GLOB2, "--lines", "5", "--seed", "1"]))
    b = build_report(parse_config(["test", *GLOB2, "--lines", "5", "--seed", "2"]))
    assert a["reports"] != b["reports"]


def test_vertex_grammar():
    assert parse_vertices("0.3+0i,0; -0.2+0i,0") == [(0.3, 0), (-0.2, 0)]
    assert parse_vertices("0,0.3+0i;") == [(0, 0.3)]


finite = st.floats(-0.5, 0.5, allow_nan=False)


@settings(max_examples=50)
@given(st.sampled_from(["test", "decompose", "disc-test", "poisson-check", "charspec-roundtrip"]),
       st.lists(st.tuples(finite, finite, finite, finite), max_size=3),
       st.integers(1, 500), st.sampled_from([None, 16, 512, 2048]), st.integers(1, 64),
       st.floats(1e-14, 1e-2), st.integers(0, 2 ** 31), st.sampled_from(["json", "csv"]),
       st.sampled_from([None, "modulus_sq", "globevnik:k=3", "poly:1+2z1*z2"]))
def test_config_round_trip(command, verts, lines, nodes, m_max, tol, seed, fmt, function):
    cfg = RunConfig(command, function, [(complex(a, b), complex(c, d)) for a, b, c, d in verts],
                    lines, nodes, m_max, tol, seed, None, fmt)
    assert parse_config(cfg.to_argv()) == cfg
