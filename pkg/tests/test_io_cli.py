import csv
import json
import math

import numpy as np
import pytest

from geodspec import VertexedMesh, generate_sphere_mesh
from geodspec.cli import main
from geodspec.io import dumps, load_mesh, mesh_from_dict, mesh_to_dict, save_mesh
from geodspec.errors import ParseError, ValidationError
from geodspec.metric import MetricComplex


def _write(path, obj):
    path.write_text(json.dumps(obj))
    return path


def _equilateral_doc():
    return {"format_version": "1", "dimension": 2, "num_vertices": 3,
            "top_simplices": [[0, 1, 2]],
            "edge_lengths": [{"i": 0, "j": 1, "length": 1.0}, {"i": 0, "j": 2, "length": 1.0},
                             {"i": 1, "j": 2, "length": 1.0}]}


def test_load_equilateral(tmp_path):
    mc = load_mesh(_write(tmp_path / "tri.json", _equilateral_doc()))
    assert isinstance(mc, MetricComplex)
    assert len(mc.edge_lengths) == 3


def test_roundtrip_lossless(tmp_path):
    mesh = generate_sphere_mesh(1.3, 2)
    save_mesh(mesh, tmp_path / "s.json")
    back = load_mesh(tmp_path / "s.json")
    assert isinstance(back, VertexedMesh)
    np.testing.assert_array_equal(back.metric_complex.edge_lengths,
                                  mesh.metric_complex.edge_lengths)
    np.testing.assert_array_equal(back.positions, mesh.positions)
    np.testing.assert_array_equal(back.complex.top_simplices, mesh.complex.top_simplices)
    assert back.manifold.tag() == mesh.manifold.tag()
    assert dumps(mesh_to_dict(back)) == (tmp_path / "s.json").read_text()


def test_extra_edge_rejected(tmp_path):
    doc = _equilateral_doc()
    doc["num_vertices"] = 6
    doc["top_simplices"] = [[0, 1, 2], [3, 4, 5]]
    doc["edge_lengths"] += [{"i": a, "j": b, "length": 1.0} for a, b in [(3, 4), (3, 5), (4, 5)]]
    doc["edge_lengths"].append({"i": 0, "j": 5, "length": 1.0})
    with pytest.raises(ValidationError):
        load_mesh(_write(tmp_path / "x.json", doc))


def test_negative_length_rejected(tmp_path):
    doc = _equilateral_doc()
    doc["edge_lengths"][0]["length"] = -1
    with pytest.raises(ValidationError) as info:
        load_mesh(_write(tmp_path / "x.json", doc))
    assert info.value.report["nonpositive_lengths"]


def test_missing_edge_rejected():
    doc = _equilateral_doc()
    doc["edge_lengths"].pop()
    with pytest.raises(ValidationError):
        mesh_from_dict(doc)


def test_bad_json_reports_position(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{\n "format_version": "1",\n "dimension": 2,,\n}')
    with pytest.raises(ParseError) as info:
        load_mesh(p)
    assert info.value.line == 3


def test_bad_version():
    doc = _equilateral_doc()
    doc["format_version"] = "2"
    with pytest.raises(ParseError):
        mesh_from_dict(doc)


# -- CLI -----------------------------------------------------------------------

def _run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_cli_gen_and_check(tmp_path, capsys):
    t = tmp_path / "t.json"
    assert _run(capsys, "gen", "--manifold", "torus", "--grid", "8x8", "-o", t)[0] == 0
    code, out, _ = _run(capsys, "check", t)
    assert code == 0
    rep = json.loads(out)
    assert rep["ok"] and rep["euler_characteristic"] == 0
    # horizontal and vertical edges share the length h; diagonals have h*sqrt(2)
    assert rep["distinct_edge_lengths"] == 2
    assert rep["stats"]["mesh"] == pytest.approx(2 * math.pi / 8 * math.sqrt(2))


def test_cli_check_invalid(tmp_path, capsys):
    doc = _equilateral_doc()
    doc["edge_lengths"][0]["length"] = 5.0
    code, out, _ = _run(capsys, "check", _write(tmp_path / "x.json", doc))
    assert code == 1
    assert json.loads(out)["ok"] is False


def test_cli_check_open_surface(tmp_path, capsys):
    code, out, _ = _run(capsys, "check", _write(tmp_path / "tri.json", _equilateral_doc()))
    assert code == 1
    assert json.loads(out)["closedness"]["bad_ridges"]


def test_cli_pipeline(tmp_path, capsys):
    t, s, r, c = (tmp_path / n for n in ("t.json", "s.json", "r.json", "r.csv"))
    _run(capsys, "gen", "--manifold", "torus", "--grid", "32x32", "-o", t)
    assert _run(capsys, "spectrum", t, "--num-eigs", 13, "--eigvecs", "-o", s)[0] == 0
    spec = json.loads(s.read_text())
    assert len(spec["eigenvalues"]) == 13
    assert _run(capsys, "compare", s, "--mesh", t, "-o", r, "--csv", c)[0] == 0
    rep = json.loads(r.read_text())
    assert [len(m["indices"]) for m in rep["cluster_match"]] == [1, 4, 4, 4]
    assert rep["max_relative_error"] < 0.02
    rows = list(csv.reader(c.read_text().splitlines()))
    assert rows[0] == ["index", "lambda_T", "lambda_M", "rel_err"]
    assert len(rows) == 14

    res = tmp_path / "res.json"
    assert _run(capsys, "residuals", s, "--mesh", t, "--clusters", "1..1", "-o", res)[0] == 0
    out = json.loads(res.read_text())
    assert len(out["per_function"]) == 4


def test_cli_outputs_are_byte_identical(tmp_path, capsys):
    t = tmp_path / "t.json"
    _run(capsys, "gen", "--manifold", "sphere", "--level", 2, "-o", t)
    first = t.read_bytes()
    _run(capsys, "gen", "--manifold", "sphere", "--level", 2, "-o", t)
    assert t.read_bytes() == first
    outs = []
    for name in ("a.json", "b.json"):
        _run(capsys, "spectrum", t, "--num-eigs", 9, "--solver", "dense", "-o", tmp_path / name)
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]


def test_cli_bounds(capsys):
    code, out, _ = _run(capsys, "bound", "cheng", "--n", 2, "--k", 0, "--lambda", 0,
                        "--diam", 1, "--inj", 1)
    assert code == 0
    rep = json.loads(out)
    assert rep["value"] == 0
    assert "C_n" in rep["note"]
    code, out, _ = _run(capsys, "bound", "thm1", "--n", 2, "--eps", 0.1, "--lambda", 0,
                        "--diam", 1, "--inj", 1, "--thinness", 1, "--order", 1)
    assert json.loads(out)["value"] == pytest.approx(3.775e-12, rel=1e-3)


def test_cli_errors_are_json(tmp_path, capsys):
    code, _, err = _run(capsys, "check", tmp_path / "missing.json")
    assert code == 2
    assert json.loads(err)["error"] == "FileNotFoundError"

    bad = tmp_path / "bad.json"
    bad.write_text("{\n oops")
    code, _, err = _run(capsys, "spectrum", bad, "--num-eigs", 3)
    assert code == 2
    e = json.loads(err)
    assert e["error"] == "ParseError" and e["line"] == 2

    code, _, err = _run(capsys, "bound", "thm1", "--n", 2, "--lambda", 0, "--diam", 1, "--inj", 1)
    assert code == 2 and "--eps" in json.loads(err)["message"]

    code, _, err = _run(capsys, "gen", "--manifold", "torus", "--grid", "2x8")
    assert code == 2 and json.loads(err)["error"] == "GridTooCoarse"


def test_cli_assemble(tmp_path, capsys):
    t = tmp_path / "t.json"
    _run(capsys, "gen", "--manifold", "torus", "--grid", "4x4", "-o", t)
    assert _run(capsys, "assemble", t, "--format", "mm", "-o", tmp_path / "q")[0] == 0
    assert (tmp_path / "q_mass.mtx").exists() and (tmp_path / "q_stiffness.mtx").exists()
