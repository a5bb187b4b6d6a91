"""
JSON forms of representation types, traces, terms and host values.

The list-shaped formats (types, traces) are parsed by hand; the dict-shaped
ones (terms, host values) are validated through pydantic wire models and then
converted. Every parse failure is a ``ParseError`` with a JSON-path location.
"""

from __future__ import annotations

from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError

from adtembed import errors
from adtembed.ast import (
    CaseE,
    Const,
    Expr,
    Let,
    MatchE,
    MkPair,
    MkUnit,
    PrimApp,
    PrimOp,
    Prj,
    Roll,
    Switch,
    Undef,
    Unroll,
    Var,
)
from adtembed.trace import PairT, PrimT, RecT, Tag, Trace, UnitT
from adtembed.types import (
    Con,
    Pair,
    Prim,
    PrimType,
    RecMark,
    Scalar,
    SurfaceValue,
    TupleV,
    TypeRep,
    Unit,
)


# ---------------------------------------------------------------------------
# TypeRep

def rep_to_json(rep: TypeRep) -> list:
    match rep:
        case Unit():
            return ["unit"]
        case Prim(kind):
            return ["prim", kind.value]
        case Pair(left, right):
            return ["pair", rep_to_json(left), rep_to_json(right)]
        case RecMark(adt):
            return ["rec", adt]
    raise errors.TypeMismatch(f"not a representation type: {rep!r}")


def _prim_kind(data: Any, location: str) -> PrimType:
    try:
        return PrimType(data)
    except ValueError:
        raise errors.ParseError(f"unknown primitive kind {data!r}", location) from None


def rep_from_json(data: Any, location: str = "$") -> TypeRep:
    if not isinstance(data, list) or not data:
        raise errors.ParseError("type must be a non-empty list", location)
    head, args = data[0], data[1:]
    match head, len(args):
        case "unit", 0:
            return Unit()
        case "prim", 1:
            return Prim(_prim_kind(args[0], f"{location}[1]"))
        case "pair", 2:
            return Pair(rep_from_json(args[0], f"{location}[1]"), rep_from_json(args[1], f"{location}[2]"))
        case "rec", 1 if isinstance(args[0], str):
            return RecMark(args[0])
    raise errors.ParseError(f"malformed type {data!r}", location)


# ---------------------------------------------------------------------------
# Trace

def trace_to_json(trace: Trace) -> list:
    match trace:
        case UnitT():
            return ["unit"]
        case PrimT(kind):
            return ["prim", kind.value]
        case PairT(left, right):
            return ["pair", trace_to_json(left), trace_to_json(right)]
        case RecT():
            return ["rec"]
        case Tag(tag, fields):
            return ["tag", tag, trace_to_json(fields)]
    raise errors.TypeMismatch(f"not a trace: {trace!r}")


def trace_from_json(data: Any, location: str = "$") -> Trace:
    if not isinstance(data, list) or not data:
        raise errors.ParseError("trace must be a non-empty list", location)
    head, args = data[0], data[1:]
    match head, len(args):
        case "unit", 0:
            return UnitT()
        case "prim", 1:
            return PrimT(_prim_kind(args[0], f"{location}[1]"))
        case "pair", 2:
            return PairT(trace_from_json(args[0], f"{location}[1]"), trace_from_json(args[1], f"{location}[2]"))
        case "rec", 0:
            return RecT()
        case "tag", 2 if isinstance(args[0], int) and not isinstance(args[0], bool) and args[0] >= 0:
            return Tag(args[0], trace_from_json(args[1], f"{location}[2]"))
    raise errors.ParseError(f"malformed trace {data!r}", location)


# ---------------------------------------------------------------------------
# Expr wire models

class _Node(BaseModel):
    model_config = ConfigDict(extra="forbid")


class ConstNode(_Node):
    node: Literal["const"]
    kind: PrimType
    value: Union[int, float]


class UnitNode(_Node):
    node: Literal["unit"]


class PairNode(_Node):
    node: Literal["pair"]
    left: ExprNode
    right: ExprNode


class PrjNode(_Node):
    node: Literal["prj"]
    path: str = Field(pattern=r"^[LR]*$", description="L/R steps, outermost first")
    expr: ExprNode


class RollNode(_Node):
    node: Literal["roll"]
    adt: str
    expr: ExprNode


class UnrollNode(_Node):
    node: Literal["unroll"]
    expr: ExprNode


class MatchNode(_Node):
    node: Literal["match"]
    trace: list
    expr: ExprNode


class CaseNode(_Node):
    node: Literal["case"]
    scrutinee: ExprNode
    branches: list[tuple[list, ExprNode]]


class LetNode(_Node):
    node: Literal["let"]
    name: str = Field(min_length=1)
    bound: ExprNode
    body: ExprNode


class VarNode(_Node):
    node: Literal["var"]
    name: str = Field(min_length=1)
    type: list


class UndefNode(_Node):
    node: Literal["undef"]
    type: list


class PrimNode(_Node):
    node: Literal["prim"]
    op: PrimOp
    args: list[ExprNode]


class SwitchNode(_Node):
    node: Literal["switch"]
    scrutinee: ExprNode
    path: str = Field(pattern=r"^[LR]*$")
    arms: list[tuple[int, ExprNode]]
    default: Optional[ExprNode] = None


ExprNode = Annotated[
    Union[
        ConstNode, UnitNode, PairNode, PrjNode, RollNode, UnrollNode, MatchNode,
        CaseNode, LetNode, VarNode, UndefNode, PrimNode, SwitchNode,
    ],
    Field(discriminator="node"),
]

for _model in (PairNode, PrjNode, RollNode, UnrollNode, MatchNode, CaseNode, LetNode, PrimNode, SwitchNode):
    _model.model_rebuild()

_EXPR_ADAPTER: TypeAdapter = TypeAdapter(ExprNode)

_NODE_TAGS = {
    "const", "unit", "pair", "prj", "roll", "unroll", "match",
    "case", "let", "var", "undef", "prim", "switch",
}


def _location_of(loc: tuple, root: str = "$", skip: frozenset[str] = frozenset()) -> str:
    location = root
    for part in loc:
        if isinstance(part, int):
            location += f"[{part}]"
        elif part not in skip:
            location += f".{part}"
    return location


def _validation_to_parse_error(exc: ValidationError, skip: frozenset[str] = frozenset()) -> errors.ParseError:
    first = exc.errors()[0]
    return errors.ParseError(first["msg"], _location_of(first["loc"], skip=skip))


def expr_to_json(e: Expr) -> dict:
    match e:
        case Const(kind, payload):
            return {"node": "const", "kind": kind.value, "value": payload}
        case MkUnit():
            return {"node": "unit"}
        case MkPair(left, right):
            return {"node": "pair", "left": expr_to_json(left), "right": expr_to_json(right)}
        case Prj(path, inner):
            return {"node": "prj", "path": path, "expr": expr_to_json(inner)}
        case Roll(inner, adt):
            return {"node": "roll", "adt": adt, "expr": expr_to_json(inner)}
        case Unroll(inner):
            return {"node": "unroll", "expr": expr_to_json(inner)}
        case MatchE(trace, inner):
            return {"node": "match", "trace": trace_to_json(trace), "expr": expr_to_json(inner)}
        case CaseE(scrutinee, branches):
            return {
                "node": "case",
                "scrutinee": expr_to_json(scrutinee),
                "branches": [[trace_to_json(t), expr_to_json(rhs)] for t, rhs in branches],
            }
        case Let(name, bound, body):
            return {"node": "let", "name": name, "bound": expr_to_json(bound), "body": expr_to_json(body)}
        case Var(name, rep):
            return {"node": "var", "name": name, "type": rep_to_json(rep)}
        case Undef(rep):
            return {"node": "undef", "type": rep_to_json(rep)}
        case PrimApp(op, args):
            return {"node": "prim", "op": op.value, "args": [expr_to_json(a) for a in args]}
        case Switch(scrutinee, path, arms, default):
            return {
                "node": "switch",
                "scrutinee": expr_to_json(scrutinee),
                "path": path,
                "arms": [[tag, expr_to_json(body)] for tag, body in arms],
                "default": None if default is None else expr_to_json(default),
            }
    raise errors.TypeMismatch(f"not an expression: {e!r}")


def expr_from_json(data: Any) -> Expr:
    """Parse the node-dict JSON form of a term (Expr or CoreExpr)."""
    try:
        node = _EXPR_ADAPTER.validate_python(data)
    except ValidationError as exc:
        raise _validation_to_parse_error(exc, frozenset(_NODE_TAGS)) from exc
    return _from_node(node, "$")


def _from_node(node: BaseModel, location: str) -> Expr:
    match node:
        case ConstNode(kind=kind, value=value):
            try:
                return Const(kind, kind.check_payload(value))
            except errors.EmbedError as exc:
                raise errors.ParseError(exc.detail, f"{location}.value") from exc
        case UnitNode():
            return MkUnit()
        case PairNode(left=left, right=right):
            return MkPair(_from_node(left, f"{location}.left"), _from_node(right, f"{location}.right"))
        case PrjNode(path=path, expr=inner):
            return Prj(path, _from_node(inner, f"{location}.expr"))
        case RollNode(adt=adt, expr=inner):
            return Roll(_from_node(inner, f"{location}.expr"), adt)
        case UnrollNode(expr=inner):
            return Unroll(_from_node(inner, f"{location}.expr"))
        case MatchNode(trace=trace, expr=inner):
            return MatchE(trace_from_json(trace, f"{location}.trace"), _from_node(inner, f"{location}.expr"))
        case CaseNode(scrutinee=scrutinee, branches=branches):
            return CaseE(
                _from_node(scrutinee, f"{location}.scrutinee"),
                tuple(
                    (trace_from_json(t, f"{location}.branches[{i}][0]"),
                     _from_node(rhs, f"{location}.branches[{i}][1]"))
                    for i, (t, rhs) in enumerate(branches)
                ),
            )
        case LetNode(name=name, bound=bound, body=body):
            return Let(name, _from_node(bound, f"{location}.bound"), _from_node(body, f"{location}.body"))
        case VarNode(name=name, type=rep):
            return Var(name, rep_from_json(rep, f"{location}.type"))
        case UndefNode(type=rep):
            return Undef(rep_from_json(rep, f"{location}.type"))
        case PrimNode(op=op, args=args):
            return PrimApp(op, tuple(_from_node(a, f"{location}.args[{i}]") for i, a in enumerate(args)))
        case SwitchNode(scrutinee=scrutinee, path=path, arms=arms, default=default):
            return Switch(
                _from_node(scrutinee, f"{location}.scrutinee"),
                path,
                tuple((tag, _from_node(body, f"{location}.arms[{i}][1]")) for i, (tag, body) in enumerate(arms)),
                None if default is None else _from_node(default, f"{location}.default"),
            )
    raise errors.ParseError(f"unexpected node {node!r}", location)


# ---------------------------------------------------------------------------
# SurfaceValue

class ScalarBody(_Node):
    kind: PrimType
    value: Union[int, float]


class ScalarWire(_Node):
    scalar: ScalarBody


class ConBody(_Node):
    adt: str = Field(min_length=1)
    index: int = Field(ge=0)
    fields: list[SurfaceWire] = Field(default_factory=list)


class ConWire(_Node):
    con: ConBody


class TupleWire(_Node):
    tuple: list[SurfaceWire]


SurfaceWire = Union[ScalarWire, ConWire, TupleWire]

for _model in (ConBody, TupleWire):
    _model.model_rebuild()

_VALUE_ADAPTER: TypeAdapter = TypeAdapter(SurfaceWire)
_VALUES_ADAPTER: TypeAdapter = TypeAdapter(list[SurfaceWire])


def value_to_json(value: SurfaceValue) -> dict:
    match value:
        case Scalar(kind, payload):
            return {"scalar": {"kind": kind.value, "value": payload}}
        case Con(adt, index, fields):
            return {"con": {"adt": adt, "index": index, "fields": [value_to_json(f) for f in fields]}}
        case TupleV(components):
            return {"tuple": [value_to_json(c) for c in components]}
    raise errors.TypeMismatch(f"not a surface value: {value!r}")


def _from_wire(wire: BaseModel, location: str) -> SurfaceValue:
    match wire:
        case ScalarWire(scalar=body):
            try:
                return Scalar(body.kind, body.kind.check_payload(body.value))
            except errors.EmbedError as exc:
                raise errors.ParseError(exc.detail, f"{location}.scalar.value") from exc
        case ConWire(con=body):
            return Con(body.adt, body.index, tuple(
                _from_wire(f, f"{location}.con.fields[{i}]") for i, f in enumerate(body.fields)
            ))
        case TupleWire(tuple=components):
            return TupleV(tuple(_from_wire(c, f"{location}.tuple[{i}]") for i, c in enumerate(components)))
    raise errors.ParseError(f"unexpected value {wire!r}", location)


def value_from_json(data: Any) -> SurfaceValue:
    try:
        wire = _VALUE_ADAPTER.validate_python(data)
    except ValidationError as exc:
        raise _validation_to_parse_error(exc) from exc
    return _from_wire(wire, "$")


def values_from_json(data: Any) -> list[SurfaceValue]:
    """Parse a JSON array of host values (the CLI ``--args`` form)."""
    try:
        wires = _VALUES_ADAPTER.validate_python(data)
    except ValidationError as exc:
        raise _validation_to_parse_error(exc) from exc
    return [_from_wire(w, f"$[{i}]") for i, w in enumerate(wires)]
