import json
from importlib import resources

import jsonschema
import pytest
from referencing import Registry, Resource

from freespec.cli import main, run


def _schemas():
    out = {}
    for f in resources.files("freespec").joinpath("schemas").iterdir():
        if f.name.endswith(".json"):
            out[f.name] = json.loads(f.read_text())
    return out


SCHEMAS = _schemas()
REGISTRY = Registry().with_resources((s["$id"], Resource.from_contents(s)) for s in SCHEMAS.values())


def validate(instance, name):
    jsonschema.Draft202012Validator(SCHEMAS[name], registry=REGISTRY).validate(instance)


def _report(out, stem):
    return json.loads((out / f"{stem}.json").read_text())


def _common(tmp_path):
    return ["--out", str(tmp_path), "--no-figures"]


def test_pencil_show_writes_valid_report(tmp_path):
    assert main(["pencil", "show", "cube:3", *_common(tmp_path)]) == 0
    rep = _report(tmp_path, "pencil-show")
    validate(rep, "report.json")
    assert rep["passed"] and rep["command"] == "pencil-show"


def test_pencil_export_and_reload(tmp_path):
    path = tmp_path / "jewel.json"
    assert main(["pencil", "export", "jewel:2,3", "--file", str(path), *_common(tmp_path)]) == 0
    data = json.loads(path.read_text())
    validate(data, "pencil.json")
    assert main(["pencil", "show", str(path), *_common(tmp_path)]) == 0


def test_witness_tuple_validates_and_membership(tmp_path):
    assert main(["inclusion", "witness", "--k", "3", *_common(tmp_path)]) == 0
    rep = _report(tmp_path, "inclusion-witness")
    validate(rep, "report.json")
    X = rep["results"]["X"]
    validate(X, "tuple.json")
    point = tmp_path / "x.json"
    point.write_text(json.dumps(X))
    assert main(["membership", "--pencil", "simplex_Ak:3", "--point", str(point), *_common(tmp_path)]) == 0
    assert main(["inclusion", "minball", "--pencil", "simplex_Ak:3", "--point", str(point),
                 *_common(tmp_path)]) == 0


def test_compat_witness_file_round_trip(tmp_path):
    povm = tmp_path / "povm.json"
    assert main(["compat", "witness", "--kind", "four_qubit", "--file", str(povm), *_common(tmp_path)]) == 0
    validate(json.loads(povm.read_text()), "povm.json")
    assert main(["compat", "degree", "--povm-file", str(povm), *_common(tmp_path)]) == 0
    rep = _report(tmp_path, "compat-degree")
    validate(rep, "report.json")


def test_bad_povm_exits_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"d": 2, "effects": [[[1, 0], [0, 0]], [[1, 0], [0, 0]]]}))
    assert main(["compat", "degree", "--povm-file", str(bad), *_common(tmp_path)]) == 2
    assert not (tmp_path / "compat-degree.json").exists()


@pytest.mark.parametrize("argv", [
    ["pencil", "show", "no_such_pencil"],
    ["pencil", "show", "cube:x"],
    ["compat", "degree", "--povm-file", "/nonexistent/povm.json"],
    ["compat", "degree"],
    ["inclusion", "test", "--pencil", "square"],
    ["inclusion", "test", "--pencil", "square", "--target", "cube:3"],
    ["hierarchy", "npa", "--problem", "qubits"],
    ["extreme", "sample", "--pencil", "square", "--jobs", "0"],
    ["no-such-command"],
])
def test_input_errors_exit_2(tmp_path, argv):
    assert main([*argv, *_common(tmp_path)]) == 2


def test_not_json_exits_2(tmp_path):
    f = tmp_path / "p.json"
    f.write_text("{not json")
    assert main(["pencil", "show", str(f), *_common(tmp_path)]) == 2


def test_failed_assertion_exits_1(tmp_path):
    # a tolerance below floating-point resolution cannot be met, so the check fails
    code, report = run(["inclusion", "feasible-point", "--k", "3", "--theta", "0.7", "--tol", "1e-300",
                        *_common(tmp_path)])
    assert code == 1 and not report.passed
    rep = _report(tmp_path, "inclusion-feasible-point")
    validate(rep, "report.json")
    assert rep["passed"] is False


def test_deterministic_reports_are_byte_identical(tmp_path):
    argv = ["inclusion", "scan", "--k", "3", "--grid", "5", "--out", str(tmp_path), "--deterministic"]
    names = ("inclusion-scan.json", "inclusion-scan-theta-k3.png")
    snapshots = []
    for _ in range(2):
        assert main(argv) == 0
        snapshots.append([(tmp_path / n).read_bytes() for n in names])
    assert snapshots[0] == snapshots[1]
    rep = json.loads((tmp_path / "inclusion-scan.json").read_text())
    assert rep["wall_time_s"] is None
    assert rep["figures"] == ["inclusion-scan-theta-k3.png"]


def test_digest_ignores_output_location(tmp_path):
    a = run(["pencil", "show", "square", "--out", str(tmp_path / "a"), "--no-figures"])[1]
    b = run(["pencil", "show", "square", "--out", str(tmp_path / "b"), "--no-figures"])[1]
    c = run(["pencil", "show", "cube:2", "--out", str(tmp_path / "c"), "--no-figures"])[1]
    assert a.inputs_digest == b.inputs_digest != c.inputs_digest


def test_hierarchy_command(tmp_path):
    assert main(["hierarchy", "npa", "--problem", "line-simplex", "--k", "2", "--level", "1",
                 *_common(tmp_path)]) == 0
    rep = _report(tmp_path, "hierarchy-npa")
    validate(rep, "report.json")
    assert rep["results"]["levels"][0]["status"] == "optimal"


def test_compat_bounds_and_min_degree(tmp_path):
    assert main(["compat", "bounds", "--d", "2", "--g", "3", *_common(tmp_path)]) == 0
    assert main(["compat", "min-degree", "--d", "2", "--g", "2", "--ks", "2", "2", "--restarts", "2",
                 *_common(tmp_path)]) == 0
    rep = _report(tmp_path, "compat-min-degree")
    assert "seesaw_evidence" in rep["results"] and "proved_bounds" in rep["results"]


def test_extreme_classify(tmp_path):
    point = tmp_path / "x.json"
    point.write_text(json.dumps({"field": "real", "items": [[[1, 0], [0, -1]], [[0, 1], [1, 0]]]}))
    assert main(["extreme", "classify", "--pencil", "square", "--point", str(point), *_common(tmp_path)]) == 0
    rep = _report(tmp_path, "extreme-classify")
    assert rep["results"]["free"] == "yes"


def test_verify_closed_form_touches_every_module(tmp_path):
    code, report = run(["verify-paper", "--suite", "closed-form", *_common(tmp_path)])
    assert code == 0 and report.passed
    names = " ".join(a["name"] for a in report.assertions)
    for fragment in ("witness pairing", "free extreme", "degree of the qubit pair", "12-dimensional",
                     "witness tuples lie", "re-validated"):
        assert fragment in names


def test_version_flag(capsys):
    assert main(["--version"]) == 0
    assert "0.1.0" in capsys.readouterr().out
