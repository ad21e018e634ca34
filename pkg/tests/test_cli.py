import io
import json
import shutil
import subprocess
import sys

import pytest

from coordlens.cli import FAILED, OK, USAGE, run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


# ------------------------------------------------------------ happy paths
def test_group_analyze_s4():
    code, out, _ = call("group", "analyze", "S4")
    assert code == OK
    assert "classes 5, center 1" in out
    assert "not nilpotent" in out and "indecomposable" in out
    assert "conj-centralizer: FAIL" in out and "crit_p(3): PASS" in out
    assert "verdict: recognizes" in out


def test_reduced_build_prints_support():
    code, out, _ = call("reduced", "build", "--factors", "S3,S3", "--ideal", "{}", "--supp", "x*x=e",
                        "--elem", "(12),(123)")
    assert (code, out.strip()) == (OK, "{0}")


def test_reduced_eval_supp_and_los():
    base = ["--factors", "S3,C2", "--ideal", '{"indices": 2, "generators": [[1]]}']
    code, out, _ = call("reduced", "eval", *base, "--formula", "x*x = e", "--elem", "(12),1")
    assert code == OK and "holds: true" in out
    code, out, _ = call("reduced", "supp", *base, "--formula", "x*x = e", "--elem", "(123),1", "--json")
    assert code == OK and json.loads(out)["support"] == "{}"
    code, out, _ = call("reduced", "los", *base, "--formula", "x*y = y*x")
    assert code == OK and "agrees" in out
    code, _, err = call("reduced", "los", *base, "--formula", "!(x = e)")
    assert code == USAGE and "invalid input" in err


def test_verify_single_check_json():
    code, out, _ = call("verify", "sym.two_cycles", "--json")
    data = json.loads(out)
    assert code == FAILED and data["schema"] == 1
    sizes = {i["group"]: i["size"] for i in data["results"][0]["instances"]}
    assert sizes["S6"] == 31 and sizes["S7"] == 22


def test_verify_passing_check_exits_zero():
    code, out, _ = call("verify", "rps.formulas")
    assert code == OK and out.startswith("PASS rps.formulas")


def test_verify_list():
    code, out, _ = call("verify", "--list")
    assert code == OK and "order.formula" in out.split()


def test_json_is_byte_identical():
    a = call("criteria", "verdict", "S3,SL2_5", "--json")[1]
    b = call("criteria", "verdict", "S3,SL2_5", "--json")[1]
    assert a == b and json.loads(a)["outcome"] == "fails"


def test_criteria_structure_and_timings():
    code, out, _ = call("criteria", "verdict", "RPS")
    assert code == OK and "recognizes" in out
    code, out, _ = call("criteria", "verdict", "A5", "--timings", "--json")
    assert code == OK and "millis" in json.loads(out)


def test_catalog_verbs():
    code, out, _ = call("catalog", "list")
    assert code == OK and "GL2_2" in out and "(flagged)" in out
    code, out, _ = call("catalog", "show", "SL2_5", "--json")
    data = json.loads(out)
    assert data["order"] == 120 and data["center"] == 2


def test_formula_verbs():
    code, out, _ = call("formula", "parse", "(E x)(x=y) & (A x)(x*x=e)", "--signature", "group")
    assert code == OK and out.splitlines()[0] == "(E x)(x = y) & (A x_1)(x_1*x_1 = e)"
    code, out, _ = call("formula", "classify", "!(x = y)")
    assert code == OK and "h-formula: no" in out
    code, out, _ = call("formula", "classify", "(A z)(z = x -> z = y)", "--json")
    assert json.loads(out)["h_formula"] is True
    code, out, _ = call("formula", "equiv", "(A q)(x=y -> q=y)", "!(x=y)", "--structure", "pure:3")
    assert code == OK
    code, out, _ = call("formula", "equiv", "x=z -> y=z", "x=y", "--structure", "pure:3")
    assert code == FAILED and "counterexample" in out


def test_graph_verbs():
    spec = '{"vertices": ["u", "v"], "edges": [], "groups": {"u": "C3", "v": "C2"}}'
    code, out, _ = call("graph", "classify", spec)
    assert code == OK and out.startswith("recognizes")
    code, out, _ = call("graph", "normal-form", spec, "--word", "u:1 * u:2 * v:1")
    assert code == OK and out.splitlines()[0] == "v:1"
    code, out, _ = call("graph", "conjugate", spec, "--word", "v:1", "--vertex", "u", "--json")
    data = json.loads(out)
    assert code == OK and data["found"] and data["conjugate"].startswith("u:")


# ------------------------------------------------------------ error paths
def test_missing_file():
    code, _, err = call("group", "analyze", "nope/missing.json")
    assert code == USAGE and err.startswith("error: file not found:")


def test_bad_json_file(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    code, _, err = call("group", "analyze", str(p))
    assert code == USAGE and err.startswith("error: parse error:")


def test_formula_parse_error():
    code, _, err = call("formula", "parse", "(A x)(x = ")
    assert code == USAGE and err.startswith("error: parse error:")


def test_size_bound():
    code, _, err = call("reduced", "build", "--factors", "S5,S5,S5")
    assert code == USAGE and err.startswith("error: size bound exceeded:")
    code, out, _ = call("group", "analyze", "S6", "--bound", "10")
    assert code == OK and "unknown (order above bound)" in out


def test_scale_error():
    code, _, err = call("verify", "rps.formulas", "--scale", "huge")
    assert code == USAGE and err.startswith("error: scale error:")


def test_unknown_check_and_name():
    code, _, err = call("verify", "no.such")
    assert code == USAGE and err.startswith("error: unknown check:")
    code, _, err = call("catalog", "show", "X9")
    assert code == USAGE and err.startswith("error: unknown name:")


def test_usage_errors():
    assert call()[0] == USAGE
    assert call("frobnicate")[0] == USAGE
    assert call("verify", "--all", "rps.formulas")[0] == USAGE
    assert call("verify")[0] == USAGE
    assert call("formula", "equiv", "x=y")[0] == USAGE
    assert call("graph", "normal-form", '{"vertices": ["u"], "edges": [], "groups": {"u": "C2"}}')[0] == USAGE


def test_invalid_inputs():
    code, _, err = call("reduced", "eval", "--factors", "S3", "--formula", "x = y", "--elem", "e")
    assert code == USAGE and "invalid input" in err
    code, _, err = call("reduced", "build", "--factors", "S3,S3", "--ideal", "[[0,1]]")
    assert code == USAGE and "invalid input" in err
    code, _, err = call("graph", "classify", '{"vertices": ["u"]}')
    assert code == USAGE and "invalid input" in err


@pytest.mark.skipif(shutil.which("coordlens") is None, reason="console script not installed")
def test_console_script_exit_codes():
    ok = subprocess.run(["coordlens", "catalog", "show", "S3"], capture_output=True, text=True)
    assert ok.returncode == 0 and "order: 6" in ok.stdout
    bad = subprocess.run([sys.executable, "-m", "coordlens.cli", "verify", "--scale", "huge", "--all"],
                         capture_output=True, text=True)
    assert bad.returncode == 2
