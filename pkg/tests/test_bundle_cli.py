import copy
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest

import paradp
from paradp.bundle import RESULT_SCHEMA, BundleError, load, load_path, to_json
from paradp.cli import main, render_table

DATA = Path(paradp.__file__).parent / "data"
BUNDLES = sorted(DATA.glob("ev_*.json"))

FLIP = {
    "monad": "distribution",
    "posets": {"F": {"grid": [{"name": "f", "values": [0]}]},
               "C": {"grid": [{"name": "c", "values": [1, 2, 2.5, 3]}]}},
    "dps": {"c1": {"threshold": {"fun": "F", "res": "C", "formula": "1"}},
            "c3": {"threshold": {"fun": "F", "res": "C", "formula": "3"}},
            "c25": {"threshold": {"fun": "F", "res": "C", "formula": "2.5"}}},
    "cells": {"choice": {"param": [{"name": "x", "labels": ["a", "b"]}], "fun": "F", "res": "C",
                         "table": {"a": {"atoms": [["c1", 0.5], ["c3", 0.5]]}, "b": {"atoms": [["c25", 1]]}}}},
    "queries": [{"type": "decide", "f": [0], "utility": "expected"},
                {"type": "decide", "f": [0], "utility": "worst_case"}],
}

DEGENERATE = {
    "monad": "distribution",
    "posets": {"F": {"chain": [0]}, "R": {"chain": [0]}},
    "dps": {"yes": {"matrix": {"fun": "F", "res": "R", "rows": [[True]]}},
            "no": {"matrix": {"fun": "F", "res": "R", "rows": [[False]]}}},
    "cells": {"m": {"param": [{"name": "D", "labels": ["d1", "d2", "d3"]}], "fun": "F", "res": "R",
                    "table": {"d1": "yes", "d2": "no", "d3": "no"}}},
    "queries": [{"type": "infer", "factor": "D", "prior": "uniform",
                 "observations": [{"f": [0], "r": [0], "feasible": True}]}],
}


def write(tmp_path, doc, name="b.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def run_json(argv, capsys):
    code, out, err = run(argv + ["--format", "json"], capsys)
    doc = json.loads(out)
    jsonschema.validate(doc, RESULT_SCHEMA)
    return code, doc


def test_bundled_files_load():
    assert {p.name for p in BUNDLES} == {"ev_identity.json", "ev_interval.json", "ev_distribution.json"}
    for p in BUNDLES:
        b = load_path(p)
        assert b.target().src.names == ("v", "l")


@pytest.mark.parametrize("path", BUNDLES, ids=lambda p: p.stem)
@pytest.mark.parametrize("command", ["eval", "query", "decide", "infer", "fit"])
def test_commands_on_bundles(path, command, capsys):
    b = load_path(path)
    has = command == "eval" or any(q["type"] == command for q in b.queries)
    code, out, err = run([command, str(path)], capsys)
    if has:
        assert code == 0, err
        code, doc = run_json([command, str(path)], capsys)
        assert code == 0 and doc["command"] == command
    else:
        assert code == 2 and "no" in err


def test_eval_summary_fields(capsys):
    code, doc = run_json(["eval", str(DATA / "ev_interval.json")], capsys)
    s = doc["summary"]
    assert s["monad"] == "interval"
    assert s["points"] == 4
    assert set(s["payload"]) == {"support_size", "feasible_entries", "interval_width"}


def test_eval_summary_matches_recomputation(capsys):
    b = load_path(DATA / "ev_distribution.json")
    cell = b.target()
    code, doc = run_json(["eval", str(DATA / "ev_distribution.json")], capsys)
    s = doc["summary"]
    assert s["points"] == cell.dom.size
    assert [f["name"] for f in s["params"]["factors"]] == list(cell.dom.names)
    sizes = [len(v.support()) for v in cell.table]
    assert s["payload"]["support_size"]["max"] == max(sizes)
    assert s["payload"]["support_size"]["min"] == min(sizes)


def test_decide_flip_via_cli(tmp_path, capsys):
    code, doc = run_json(["decide", write(tmp_path, FLIP)], capsys)
    assert code == 0
    exp, worst = doc["results"]
    assert exp["point"] == ["a"] and exp["value"] == 2
    assert worst["point"] == ["b"] and worst["value"] == 2.5


def test_infer_degenerate(tmp_path, capsys):
    code, doc = run_json(["infer", write(tmp_path, DEGENERATE)], capsys)
    assert code == 0
    assert doc["results"][0]["posterior"] == {"atoms": [["d1", 1.0]]}


def test_table_output_sorted_by_mass(capsys):
    code, out, _ = run(["infer", str(DATA / "ev_distribution.json")], capsys)
    rows = [ln.split() for ln in out.splitlines() if ln[:1].isdigit()]
    masses = [float(r[-1]) for r in rows]
    assert masses == sorted(masses, reverse=True)


@pytest.mark.parametrize("mutate,pointer", [
    (lambda d: d.update(monad="fuzzy"), "/monad"),
    (lambda d: d["posets"]["F"].update(grid=[]), "/posets/F"),
    (lambda d: d["cells"]["choice"]["table"].pop("b"), "/cells/choice/table"),
    (lambda d: d["dps"]["c1"]["threshold"].update(formula="1 +"), "/dps/c1"),
    (lambda d: d["cells"]["choice"]["table"].update(b={"atoms": [["c25", 0.5]]}), "/cells/choice/table/b/atoms"),
    (lambda d: d["cells"]["choice"]["table"].update(b={"atoms": [["zz", 1]]}), "/cells/choice/table/b/atoms/0/0"),
    (lambda d: d["queries"].append({"type": "decide"}), "/queries/2"),
])
def test_malformed_bundle_pointer(mutate, pointer, tmp_path, capsys):
    doc = copy.deepcopy(FLIP)
    mutate(doc)
    with pytest.raises(BundleError) as info:
        load(doc)
    assert info.value.pointer.startswith(pointer)
    code, _, err = run(["decide", write(tmp_path, doc)], capsys)
    assert code == 2 and pointer in err


def test_invalid_json_and_missing_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ nope")
    assert run(["eval", str(bad)], capsys)[0] == 2
    assert run(["eval", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_diagram_errors_exit_2(tmp_path, capsys):
    doc = json.loads((DATA / "ev_identity.json").read_text())
    doc["diagram"] = "S ; S"
    code, _, err = run(["eval", write(tmp_path, doc)], capsys)
    assert code == 2 and "column" in err
    doc["diagram"] = "S ;"
    code, _, err = run(["eval", write(tmp_path, doc)], capsys)
    assert code == 2 and "column 4" in err


def test_check_laws_bundle_deterministic(tmp_path, capsys):
    path = str(DATA / "ev_interval.json")
    outs = []
    for i in range(2):
        out = tmp_path / f"r{i}.json"
        code = main(["check-laws", path, "--samples", "20", "--seed", "4", "--format", "json", "--out", str(out)])
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    jsonschema.validate(json.loads(outs[0]), RESULT_SCHEMA)


def test_check_laws_corrupt_mu(capsys):
    code, doc = run_json(["check-laws", str(DATA / "ev_interval.json"), "--samples", "30", "--corrupt-mu"], capsys)
    assert code == 1 and not doc["ok"]
    failed = {r["law"] for r in doc["laws"] if not r["passed"]}
    assert "monad.interval.associativity" in failed


def test_check_laws_builtin_subprocess():
    proc = subprocess.run([sys.executable, "-m", "paradp", "check-laws", "--seed", "0"],
                          capture_output=True, text=True, timeout=300)
    assert proc.returncode == 0, proc.stdout[-2000:]
    assert "all laws hold" in proc.stdout


def test_to_json_and_table():
    from fractions import Fraction
    assert to_json(Fraction(3, 1)) == 3
    assert to_json(Fraction(1, 3)) == pytest.approx(0.333333333333)
    assert to_json(float("inf")) == "inf"
    text = render_table(("a", "bb"), [(1, 2.5), ("xyz", (1, 2))])
    assert text.splitlines()[1] == "---  ------"
    assert "(1, 2)" in text
