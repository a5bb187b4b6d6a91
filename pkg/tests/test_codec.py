import json
import random

import pytest

from adtembed import errors
from adtembed.ast import Const, MatchE, MkPair, MkUnit, PrimApp, PrimOp, Switch, Var, structural_eq
from adtembed.catalog.programs import EXAMPLES, boolean, just, list_f64, point
from adtembed.codec import (
    expr_from_json,
    expr_to_json,
    rep_from_json,
    rep_to_json,
    trace_from_json,
    trace_to_json,
    value_from_json,
    value_to_json,
    values_from_json,
)
from adtembed.lower import lower_expr
from adtembed.trace import PairT, PrimT, RecT, Tag, UnitT
from adtembed.types import AdtTy, Prim, PrimType, Scalar, TupleV, repr_of
from tests.conftest import random_term


def test_rep_json_round_trip(registry):
    for name in registry.names():
        rep = repr_of(AdtTy(name), registry)
        assert rep_from_json(json.loads(json.dumps(rep_to_json(rep)))) == rep


@pytest.mark.parametrize("data, location", [
    ([], "$"),
    (["pair", ["unit"]], "$"),
    (["pair", ["unit"], ["prim", "f32"]], "$[2][1]"),
    (["pair", ["pair", "unit", ["unit"]], ["unit"]], "$[1][1]"),
])
def test_rep_parse_errors(data, location):
    with pytest.raises(errors.ParseError) as exc:
        rep_from_json(data)
    assert exc.value.location == location


def test_trace_json_form():
    trace = Tag(1, PairT(PairT(UnitT(), PrimT(PrimType.F64)), RecT()))
    assert trace_to_json(trace) == ["tag", 1, ["pair", ["pair", ["unit"], ["prim", "f64"]], ["rec"]]]
    assert trace_from_json(trace_to_json(trace)) == trace


@pytest.mark.parametrize("data", [["tag", -1, ["unit"]], ["tag", True, ["unit"]], ["rec", "X"], "unit"])
def test_malformed_traces_are_rejected(data):
    with pytest.raises(errors.ParseError):
        trace_from_json(data)


@pytest.mark.parametrize("name", sorted(EXAMPLES))
def test_example_terms_survive_json(name, registry):
    term = EXAMPLES[name].term(registry)
    lowered = lower_expr(term, registry)
    for e in (term, lowered):
        assert expr_from_json(json.loads(json.dumps(expr_to_json(e)))) == e


def test_match_and_switch_nodes_parse():
    x = Var("x", Prim(PrimType.F64))
    data = expr_to_json(MkPair(MatchE(PrimT(PrimType.F64), x), Switch(MkUnit(), "", (), Const(PrimType.I64, 3))))
    assert data["right"]["default"] == {"node": "const", "kind": "i64", "value": 3}
    assert expr_from_json(data) == MkPair(
        MatchE(PrimT(PrimType.F64), x), Switch(MkUnit(), "", (), Const(PrimType.I64, 3))
    )


def test_bad_constant_payload_location():
    data = {"node": "pair", "left": {"node": "unit"}, "right": {"node": "const", "kind": "tag", "value": -1}}
    with pytest.raises(errors.ParseError) as exc:
        expr_from_json(data)
    assert exc.value.location == "$.right.value"


def test_bad_variable_type_location():
    data = {
        "node": "prim", "op": "add",
        "args": [{"node": "const", "kind": "f64", "value": 1.0}, {"node": "var", "name": "x", "type": ["prim", "f32"]}],
    }
    with pytest.raises(errors.ParseError) as exc:
        expr_from_json(data)
    assert exc.value.location == "$.args[1].type[1]"


def test_missing_field_is_a_parse_error():
    with pytest.raises(errors.ParseError) as exc:
        expr_from_json({"node": "pair", "left": {"node": "unit"}})
    assert "right" in exc.value.location


@pytest.mark.parametrize("data", [
    {"node": "lambda"},
    {"node": "unit", "extra": 1},
    {"node": "prj", "path": "LX", "expr": {"node": "unit"}},
    {"node": "prim", "op": "pow", "args": []},
    [1, 2],
])
def test_malformed_terms_are_rejected(data):
    with pytest.raises(errors.ParseError):
        expr_from_json(data)


def test_prim_args_keep_their_order():
    e = PrimApp(PrimOp.SUB, (Const(PrimType.F64, 5.0), Const(PrimType.F64, 2.0)))
    assert [a["value"] for a in expr_to_json(e)["args"]] == [5.0, 2.0]


def test_value_json_golden():
    assert value_to_json(just("MaybeF64", Scalar(PrimType.F64, 2.0))) == {
        "con": {"adt": "MaybeF64", "index": 1, "fields": [{"scalar": {"kind": "f64", "value": 2.0}}]}
    }
    assert value_to_json(boolean(True)) == {"con": {"adt": "Bool", "index": 1, "fields": []}}


@pytest.mark.parametrize("value", [
    point(1.0, -2.5),
    list_f64([1.5, -2.0]),
    TupleV((boolean(False), Scalar(PrimType.I64, -7))),
    just("MaybeBool", boolean(True)),
])
def test_value_json_round_trip(value):
    assert value_from_json(json.loads(json.dumps(value_to_json(value)))) == value


def test_nullary_constructor_fields_default_to_empty():
    assert value_from_json({"con": {"adt": "MaybeF64", "index": 0}}).fields == ()


def test_values_from_json_locates_bad_payload():
    data = [{"scalar": {"kind": "f64", "value": 1.0}}, {"scalar": {"kind": "tag", "value": -1}}]
    with pytest.raises(errors.ParseError) as exc:
        values_from_json(data)
    assert exc.value.location == "$[1].scalar.value"


@pytest.mark.parametrize("data", [{"scalar": {"kind": "f64"}}, {"con": {"adt": "X", "index": -1}}, {"list": []}])
def test_malformed_values_are_rejected(data):
    with pytest.raises(errors.ParseError):
        value_from_json(data)


@pytest.mark.parametrize("seed", range(6))
def test_random_terms_survive_json(seed, registry):
    rng = random.Random(seed)
    for _ in range(40):
        term = random_term(rng, registry)
        back = expr_from_json(json.loads(json.dumps(expr_to_json(term))))
        assert back == term
        assert structural_eq(back, term)
