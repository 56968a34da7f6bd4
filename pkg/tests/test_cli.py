"""Command line interface: reports, formats, determinism, exit codes."""

import io
import json
import pathlib
import subprocess
import sys

import jsonschema
import pytest

from dklie.cli import run

SCHEMA_DIR = (pathlib.Path(__file__).resolve().parent.parent
              / "src" / "dklie" / "schemas")


def invoke(argv):
    out = io.StringIO()
    code = run(argv, stream=out)
    return code, out.getvalue()


def invoke_json(argv):
    code, text = invoke(argv + ["--format", "json"])
    return code, json.loads(text)


def check_schema(doc):
    path = SCHEMA_DIR / ("%s.json" % doc["command"])
    schema = json.loads(path.read_text())
    jsonschema.validate(doc, schema)


def test_grt_dims_matches_known_values():
    code, doc = invoke_json(["grt-dims", "--max-weight", "3"])
    assert code == 0
    check_schema(doc)
    dims = [row["dim_grt"] for row in doc["rows"]]
    assert dims == [0, 0, 1]
    assert [row["dim_g3"] for row in doc["rows"]] == [3, 1, 2]


def test_grt_dims_class_test_includes_verdict():
    code, doc = invoke_json(["grt-dims", "--weight", "3", "--class-test"])
    assert code == 0
    check_schema(doc)
    (row,) = doc["rows"]
    assert row["class_test"] == {"cocycle": True, "coboundary": False}
    assert len(row["basis"]) == 1


def test_grt_class_test_weight_three():
    code, doc = invoke_json(["grt-class-test", "--weight", "3"])
    assert code == 0
    check_schema(doc)
    for row in doc["rows"]:
        assert row["cocycle"] and not row["coboundary"]


def test_grt_class_test_control():
    code, doc = invoke_json(["grt-class-test", "--weight", "1", "--control"])
    assert code == 0
    check_schema(doc)
    (row,) = doc["rows"]
    assert not row["cocycle"]
    assert row["witness"] and row["witness"].startswith("arity 4")


def test_dk_basis_report():
    code, doc = invoke_json(["dk-basis", "--points", "3", "--weight", "1"])
    assert code == 0
    check_schema(doc)
    (row,) = doc["rows"]
    assert row["dim"] == 3
    assert row["basis"] == ["t12", "t13", "t23"]


def test_freelie_dims_report():
    code, doc = invoke_json(["freelie-dims", "--letters", "2",
                             "--max-degree", "6"])
    assert code == 0
    check_schema(doc)
    assert [row["witt_dim"] for row in doc["rows"]] == [2, 1, 2, 3, 6, 9]
    assert all(row["match"] for row in doc["rows"])


@pytest.mark.parametrize("kind", ["ce", "bar"])
def test_homology_two_points(kind):
    code, doc = invoke_json(["homology", "--complex", kind, "--points", "2",
                             "--max-weight", "2"])
    assert code == 0
    check_schema(doc)
    ranks = {(row["degree"], row["weight"]): row["rank"]
             for row in doc["rows"] if row["rank"]}
    assert ranks == {(0, 0): 1, (-1, 1): 1}


def test_defcomplex_dimensions():
    code, doc = invoke_json(["defcomplex", "--arity-cap", "3",
                             "--max-weight", "2"])
    assert code == 0
    check_schema(doc)
    by_sector = {(r["arity"], r["weight"], r["wedge"]): r["dim"]
                 for r in doc["rows"]}
    assert by_sector[(2, 0, 0)] == 1
    assert by_sector[(3, 1, 1)] == 1
    for row in doc["rows"]:
        assert row["degree"] == row["arity"] - 2 - row["wedge"]


@pytest.mark.parametrize("suite", ["relations", "operad", "jacobi",
                                   "commutation", "shuffles"])
def test_check_suites_pass(suite):
    code, doc = invoke_json(["check", "--suite", suite,
                             "--arity-cap", "3", "--max-weight", "2"])
    assert code == 0, doc
    check_schema(doc)
    assert doc["rows"]
    assert all(row["passed"] for row in doc["rows"])


def test_check_dsquared_small():
    code, doc = invoke_json(["check", "--suite", "dsquared",
                             "--arity-cap", "3", "--max-weight", "2"])
    assert code == 0
    check_schema(doc)
    assert all(row["passed"] for row in doc["rows"])


def test_json_runs_are_byte_identical():
    argv = ["grt-dims", "--max-weight", "3", "--format", "json"]
    _, first = invoke(argv)
    _, second = invoke(argv)
    assert first == second


def test_jobs_flag_does_not_change_output():
    base = ["homology", "--complex", "bar", "--points", "2",
            "--max-weight", "2", "--format", "json"]
    _, serial = invoke(base + ["--jobs", "1"])
    _, parallel = invoke(base + ["--jobs", "4"])
    assert serial == parallel


def test_seed_changes_sampled_suite_but_stays_deterministic():
    base = ["check", "--suite", "relations", "--arity-cap", "3",
            "--max-weight", "2", "--format", "json"]
    _, a1 = invoke(base + ["--seed", "5"])
    _, a2 = invoke(base + ["--seed", "5"])
    assert a1 == a2
    code, doc = invoke_json(["check", "--suite", "relations",
                             "--arity-cap", "3", "--max-weight", "2",
                             "--seed", "99"])
    assert code == 0
    assert all(row["passed"] for row in doc["rows"])


def test_csv_format():
    code, text = invoke(["dk-basis", "--points", "3", "--weight", "1",
                         "--format", "csv"])
    assert code == 0
    lines = text.strip().split("\n")
    assert lines[0].startswith("points,")
    assert len(lines) == 2


def test_text_format():
    code, text = invoke(["freelie-dims", "--letters", "2", "--max-degree",
                         "2", "--format", "text"])
    assert code == 0
    assert "witt_dim" in text


def test_usage_error_exits_two():
    with pytest.raises(SystemExit) as err:
        invoke(["grt-dims", "--no-such-flag"])
    assert err.value.code == 2


def test_bad_value_exits_two():
    code, text = invoke(["dk-basis", "--points", "0", "--weight", "1"])
    assert code == 2


def test_console_script_entry():
    out = subprocess.run(
        [sys.executable, "-m", "dklie.cli"], capture_output=True, text=True)
    assert out.returncode == 2        # no command given is a usage error
