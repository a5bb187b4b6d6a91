import dataclasses
import json

import pytest

from adtembed.catalog.programs import EXAMPLES, f64
from adtembed.cli import main


def run(capsys, *argv: str) -> tuple[int, str, str]:
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_list(capsys):
    code, out, _ = run(capsys, "list")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == len(EXAMPLES)
    assert lines[0].startswith("safe_div(n: f64, d: f64) -> MaybeF64")


def test_eval_prints_the_result_as_json(capsys):
    args = json.dumps([{"scalar": {"kind": "f64", "value": 6.0}}, {"scalar": {"kind": "f64", "value": 3.0}}])
    code, out, _ = run(capsys, "eval", "safe_div", "--args", args)
    assert code == 0
    assert json.loads(out) == {
        "con": {"adt": "MaybeF64", "index": 1, "fields": [{"scalar": {"kind": "f64", "value": 2.0}}]}
    }


def test_eval_nested_maybe_bool(capsys):
    just_true = {"con": {"adt": "MaybeBool", "index": 1, "fields": [{"con": {"adt": "Bool", "index": 1}}]}}
    code, out, _ = run(capsys, "eval", "nested_maybe_bool", "-a", json.dumps([just_true]))
    assert code == 0
    assert json.loads(out) == {"scalar": {"kind": "i64", "value": 2}}


@pytest.mark.parametrize("args", [
    "not json",
    "[]",
    '[{"scalar": {"kind": "f64", "value": 1.0}}]',
    '[{"con": {"adt": "MaybeF64", "index": 0}}, {"con": {"adt": "MaybeF64", "index": 0}}]',
])
def test_eval_bad_args_is_a_usage_error(capsys, args):
    code, _, err = run(capsys, "eval", "safe_div", "--args", args)
    assert code == 1
    assert json.loads(err)["error"] == "BadArgs"


def test_unknown_example(capsys):
    code, _, err = run(capsys, "dump", "nope")
    assert code == 1
    assert json.loads(err)["error"] == "UnknownExample"


def test_missing_command_is_a_usage_error(capsys):
    code, _, err = run(capsys)
    assert code == 1
    assert json.loads(err)["error"] == "BadArgs"


def test_bad_log_level(capsys):
    code, _, err = run(capsys, "--log-level", "chatty", "list")
    assert code == 1
    assert json.loads(err)["error"] == "BadArgs"


def test_dump_simple(capsys):
    code, out, _ = run(capsys, "dump", "simple")
    assert code == 0
    assert out == "case p of\n  #0 ((), f64) -> 0.0\n  #1 ((), f64) -> prj[RR] p\n"


def test_dump_json(capsys):
    code, out, _ = run(capsys, "dump", "simple", "--format", "json")
    assert code == 0
    data = json.loads(out)
    assert data["node"] == "case"
    assert len(data["branches"]) == 2


def test_lower_nested_maybe_bool(capsys):
    code, out, _ = run(capsys, "lower", "nested_maybe_bool")
    assert code == 0
    assert out == "switch m.L of\n  0 -> 0\n  1 -> switch m.RRL of\n      0 -> 1\n      1 -> 2\n"


def test_lower_folds_equal_arms_unless_no_dedup(capsys):
    code, out, _ = run(capsys, "lower", "is_just")
    assert code == 0
    assert out == "switch m.L of\n  0 -> 0\n  1 -> 1\n"

    code, out, _ = run(capsys, "lower", "is_just", "-f", "json", "--no-dedup")
    assert code == 0
    data = json.loads(out)
    assert data["node"] == "switch"
    assert [tag for tag, _ in data["arms"]] == [0, 1]
    inner = data["arms"][1][1]
    assert inner["node"] == "switch"
    assert inner["path"] == "RRL"
    assert [tag for tag, _ in inner["arms"]] == [0, 1]
    assert inner["default"] is None


def test_lower_follows_the_dedup_setting(capsys, monkeypatch):
    monkeypatch.setenv("ADTEMBED_DEDUP_DEFAULTS", "false")
    code, out, _ = run(capsys, "lower", "is_just")
    assert code == 0
    assert out == "switch m.L of\n  0 -> 0\n  1 -> switch m.RRL of\n      0 -> 1\n      1 -> 1\n"


def test_trace_pretty(capsys):
    code, out, _ = run(capsys, "trace", "MaybeBool")
    assert code == 0
    assert out.splitlines() == [
        "3 trace(s) for MaybeBool:",
        "  0: #0 ((), (TAG, ()))",
        "  1: #1 ((), #0 ())",
        "  2: #1 ((), #1 ())",
    ]


def test_trace_of_a_tuple_type_as_json(capsys):
    code, out, _ = run(capsys, "trace", '{"tuple": [{"adt": "Bool"}, "f64"]}', "-f", "json")
    assert code == 0
    assert json.loads(out) == [
        ["pair", ["pair", ["unit"], ["tag", 0, ["unit"]]], ["prim", "f64"]],
        ["pair", ["pair", ["unit"], ["tag", 1, ["unit"]]], ["prim", "f64"]],
    ]


def test_trace_of_a_bare_primitive(capsys):
    code, out, _ = run(capsys, "trace", "f64")
    assert code == 0
    assert out.splitlines() == ["1 trace(s) for f64:", "  0: f64"]

    code, out, _ = run(capsys, "trace", "i64", "-f", "json")
    assert code == 0
    assert json.loads(out) == [["prim", "i64"]]


def test_trace_of_unknown_adt_is_an_evaluation_error(capsys):
    code, _, err = run(capsys, "trace", "Nope")
    assert code == 2
    assert json.loads(err)["error"] == "UnknownAdt"


def test_adts(capsys):
    code, out, _ = run(capsys, "adts")
    assert code == 0
    names = [decl["name"] for decl in json.loads(out)]
    assert {"Bool", "MaybeF64", "MaybeBool", "EitherBoolBool", "Point", "ListF64"} <= set(names)


def test_check_all(capsys):
    code, out, _ = run(capsys, "check")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == len(EXAMPLES)
    assert all(line.startswith("✓ ") for line in lines)


def test_check_one(capsys):
    code, out, _ = run(capsys, "check", "two_maybe_bools")
    assert code == 0
    assert out == "✓ two_maybe_bools: 9 input(s) agree (4 case node(s))\n"


def test_check_reports_disagreements_as_host_values(capsys, monkeypatch):
    broken = dataclasses.replace(EXAMPLES["simple"], reference=lambda p: f64(1.0))
    monkeypatch.setitem(EXAMPLES, "simple", broken)
    code, out, _ = run(capsys, "check", "simple")
    assert code == 2
    lines = out.splitlines()
    assert lines[0].startswith("✗ simple: ")
    assert "    Nothing: eval gave 0.0, expected 1.0" in lines
    assert "    Nothing: lowered gave 0.0, expected 1.0" in lines
    assert "    Just 7.0: eval gave 7.0, expected 1.0" in lines
    assert not any(line.startswith("    Just 1.0:") for line in lines)
