"""
The embedded language's abstract syntax.

Terms are uni-typed frozen dataclasses; ``type_of`` checks them against the
representation types of ``adtembed.types``. ``Switch`` only appears in lowered
(core) programs, ``MatchE`` only while a program is being built.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, fields, replace
from enum import Enum
from typing import Callable, Iterator, Mapping, Optional, Union

import numpy as np

from adtembed import errors
from adtembed.config import get_settings
from adtembed.trace import Trace, pretty_trace, trace_conforms
from adtembed.types import (
    AdtRegistry,
    Pair,
    Prim,
    PrimType,
    RecMark,
    TypeRep,
    Unit,
    pretty_rep,
)

# A pair path is a string of "L"/"R" steps, outermost first; "" is Here.
PairPath = str


class PrimOp(str, Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"
    EQ = "eq"
    LT = "lt"

    @property
    def is_comparison(self) -> bool:
        return self in (PrimOp.EQ, PrimOp.LT)


OP_SYMBOLS = {
    PrimOp.ADD: "+",
    PrimOp.SUB: "-",
    PrimOp.MUL: "*",
    PrimOp.DIV: "/",
    PrimOp.EQ: "==",
    PrimOp.LT: "<",
}


@dataclass(frozen=True)
class Const:
    kind: PrimType
    payload: int | float


@dataclass(frozen=True)
class MkUnit:
    pass


@dataclass(frozen=True)
class MkPair:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Prj:
    path: PairPath
    expr: Expr


@dataclass(frozen=True)
class Roll:
    expr: Expr
    adt: str


@dataclass(frozen=True)
class Unroll:
    expr: Expr


@dataclass(frozen=True)
class MatchE:
    """Build-time proxy: ``expr`` is known to follow ``trace``. Never evaluated."""

    trace: Trace
    expr: Expr


@dataclass(frozen=True)
class CaseE:
    scrutinee: Expr
    branches: tuple[tuple[Trace, Expr], ...]


@dataclass(frozen=True)
class Let:
    name: str
    bound: Expr
    body: Expr


@dataclass(frozen=True)
class Var:
    name: str
    rep: TypeRep


@dataclass(frozen=True)
class Undef:
    rep: TypeRep


@dataclass(frozen=True)
class PrimApp:
    op: PrimOp
    args: tuple[Expr, ...]


@dataclass(frozen=True)
class Switch:
    scrutinee: Expr
    path: PairPath
    arms: tuple[tuple[int, Expr], ...]
    default: Optional[Expr] = None


Expr = Union[Const, MkUnit, MkPair, Prj, Roll, Unroll, MatchE, CaseE, Let, Var, Undef, PrimApp, Switch]
CoreExpr = Expr

EXPR_TYPES = (Const, MkUnit, MkPair, Prj, Roll, Unroll, MatchE, CaseE, Let, Var, Undef, PrimApp, Switch)

TypeEnv = Mapping[str, TypeRep]


# ---------------------------------------------------------------------------
# Fresh names

_fresh = threading.local()


def fresh_name(prefix: Optional[str] = None) -> str:
    """Next generated variable name; the counter is per thread."""
    prefix = prefix or get_settings().fresh_prefix
    counter = getattr(_fresh, "counter", 0)
    _fresh.counter = counter + 1
    return f"{prefix}{counter}"


def reset_fresh_names() -> None:
    _fresh.counter = 0


# ---------------------------------------------------------------------------
# Traversal

def located_children(e: Expr) -> list[tuple[str, Expr]]:
    """Direct sub-terms with their JSON-path suffix."""
    match e:
        case MkPair(left, right):
            return [(".left", left), (".right", right)]
        case Prj(_, inner) | Roll(inner, _) | Unroll(inner) | MatchE(_, inner):
            return [(".expr", inner)]
        case CaseE(scrutinee, branches):
            return [(".scrutinee", scrutinee)] + [
                (f".branches[{i}][1]", rhs) for i, (_, rhs) in enumerate(branches)
            ]
        case Let(_, bound, body):
            return [(".bound", bound), (".body", body)]
        case PrimApp(_, args):
            return [(f".args[{i}]", a) for i, a in enumerate(args)]
        case Switch(scrutinee, _, arms, default):
            children = [(".scrutinee", scrutinee)] + [
                (f".arms[{i}][1]", body) for i, (_, body) in enumerate(arms)
            ]
            if default is not None:
                children.append((".default", default))
            return children
    return []


def children(e: Expr) -> list[Expr]:
    return [child for _, child in located_children(e)]


def map_children(e: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    match e:
        case MkPair(left, right):
            return MkPair(fn(left), fn(right))
        case Prj() | Roll() | Unroll() | MatchE():
            return replace(e, expr=fn(e.expr))
        case CaseE(scrutinee, branches):
            return CaseE(fn(scrutinee), tuple((t, fn(rhs)) for t, rhs in branches))
        case Let(name, bound, body):
            return Let(name, fn(bound), fn(body))
        case PrimApp(op, args):
            return PrimApp(op, tuple(fn(a) for a in args))
        case Switch(scrutinee, path, arms, default):
            return Switch(
                fn(scrutinee), path, tuple((k, fn(body)) for k, body in arms),
                None if default is None else fn(default),
            )
    return e


def walk(e: Expr) -> Iterator[Expr]:
    """Pre-order traversal."""
    stack = [e]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def count_nodes(e: Expr, kind: type | tuple[type, ...]) -> int:
    return sum(1 for node in walk(e) if isinstance(node, kind))


def strip_match(e: Expr) -> Expr:
    if isinstance(e, MatchE):
        return strip_match(e.expr)
    return map_children(e, strip_match)


def assert_no_match(e: Expr, location: str = "$") -> None:
    if isinstance(e, MatchE):
        raise errors.ResidualMatch("Match node in a finished program", location)
    for suffix, child in located_children(e):
        assert_no_match(child, location + suffix)


# ---------------------------------------------------------------------------
# Type checking

def project_rep(rep: TypeRep, path: PairPath) -> TypeRep:
    for i, step in enumerate(path):
        if not isinstance(rep, Pair):
            raise errors.BadProjection(
                f"step {i} of path {path!r} needs a pair, found {pretty_rep(rep)}"
            )
        rep = rep.left if step == "L" else rep.right
    return rep


def type_of(e: Expr, env: TypeEnv, registry: AdtRegistry) -> TypeRep:
    """
    The representation type of ``e``.

    Args:
        e: Term to check.
        env: Types of the free variables.
        registry: Registry resolving Roll/Unroll targets and the Bool result of comparisons.

    Returns:
        The unique TypeRep of ``e``.
    """
    match e:
        case Const(kind, payload):
            kind.check_payload(payload)
            return Prim(kind)
        case MkUnit():
            return Unit()
        case MkPair(left, right):
            return Pair(type_of(left, env, registry), type_of(right, env, registry))
        case Prj(path, inner):
            return project_rep(type_of(inner, env, registry), path)
        case Roll(inner, adt):
            expected = registry.lookup(adt).rep
            found = type_of(inner, env, registry)
            if found != expected:
                raise errors.BadRoll(
                    f"roll into {adt} expects {pretty_rep(expected)}, found {pretty_rep(found)}"
                )
            return RecMark(adt)
        case Unroll(inner):
            found = type_of(inner, env, registry)
            if not isinstance(found, RecMark):
                raise errors.BadUnroll(f"unroll of a non-recursive value of type {pretty_rep(found)}")
            return registry.lookup(found.adt).rep
        case MatchE(trace, inner):
            found = type_of(inner, env, registry)
            if not trace_conforms(trace, found, registry):
                raise errors.TypeMismatch(
                    f"trace {pretty_trace(trace)} does not conform to {pretty_rep(found)}"
                )
            return found
        case CaseE(scrutinee, branches):
            scrutinee_rep = type_of(scrutinee, env, registry)
            if not branches:
                raise errors.TypeMismatch("case without branches")
            result: Optional[TypeRep] = None
            for i, (trace, rhs) in enumerate(branches):
                if not trace_conforms(trace, scrutinee_rep, registry):
                    raise errors.TypeMismatch(
                        f"branch {i} trace {pretty_trace(trace)} does not conform to {pretty_rep(scrutinee_rep)}"
                    )
                result = _same_branch_type(result, type_of(rhs, env, registry), f"branch {i}")
            return result
        case Let(name, bound, body):
            return type_of(body, {**env, name: type_of(bound, env, registry)}, registry)
        case Var(name, rep):
            if name not in env:
                raise errors.UnboundVar(f"variable {name!r} is not bound")
            if env[name] != rep:
                raise errors.TypeMismatch(
                    f"variable {name!r} annotated {pretty_rep(rep)} but bound at {pretty_rep(env[name])}"
                )
            return rep
        case Undef(rep):
            return rep
        case PrimApp(op, args):
            return _prim_app_type(op, [type_of(a, env, registry) for a in args], registry)
        case Switch(scrutinee, path, arms, default):
            tag_rep = project_rep(type_of(scrutinee, env, registry), path)
            if tag_rep != Prim(PrimType.TAG):
                raise errors.BadProjection(f"switch path {path!r} addresses {pretty_rep(tag_rep)}, not a TAG")
            tags = [k for k, _ in arms]
            if tags != sorted(set(tags)):
                raise errors.TypeMismatch(f"switch arm tags must be distinct and ascending: {tags}")
            bodies = [body for _, body in arms] + ([default] if default is not None else [])
            if not bodies:
                raise errors.TypeMismatch("switch without arms or default")
            result = None
            for i, body in enumerate(bodies):
                result = _same_branch_type(result, type_of(body, env, registry), f"arm {i}")
            return result
    raise errors.TypeMismatch(f"not an expression: {e!r}")


def infer_type(e: Expr, registry: AdtRegistry) -> TypeRep:
    """``type_of`` with free variables typed by their own annotations."""
    env = {node.name: node.rep for node in walk(e) if isinstance(node, Var)}
    return type_of(e, env, registry)


def _same_branch_type(expected: Optional[TypeRep], found: TypeRep, what: str) -> TypeRep:
    if expected is not None and found != expected:
        raise errors.TypeMismatch(f"{what} has type {pretty_rep(found)}, expected {pretty_rep(expected)}")
    return found if expected is None else expected


def _prim_app_type(op: PrimOp, arg_reps: list[TypeRep], registry: AdtRegistry) -> TypeRep:
    if len(arg_reps) != 2:
        raise errors.ArityMismatch(f"{op.value} takes 2 operands, given {len(arg_reps)}")
    left, right = arg_reps
    if not isinstance(left, Prim) or left != right:
        raise errors.TypeMismatch(
            f"{op.value} needs two operands of one primitive type, found {pretty_rep(left)} and {pretty_rep(right)}"
        )
    if op.is_comparison:
        return registry.bool_rep()
    if left.kind is PrimType.TAG:
        raise errors.TypeMismatch(f"{op.value} is not defined on TAG")
    return left


# ---------------------------------------------------------------------------
# Structural equality

def _same_number(a: int | float, b: int | float) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return np.float64(a).tobytes() == np.float64(b).tobytes()
    return a == b


def structural_eq(a: Expr, b: Expr) -> bool:
    """Syntactic equality up to renaming of Let-bound variables."""
    return _alpha_eq(a, b, {}, {}, 0)


def _alpha_eq(a: Expr, b: Expr, left: dict[str, int], right: dict[str, int], depth: int) -> bool:
    if type(a) is not type(b):
        return False
    match a:
        case Var(name, rep):
            if name in left or b.name in right:
                return left.get(name) == right.get(b.name) and rep == b.rep
            return name == b.name and rep == b.rep
        case Let(name, bound, body):
            if not _alpha_eq(bound, b.bound, left, right, depth):
                return False
            return _alpha_eq(body, b.body, {**left, name: depth}, {**right, b.name: depth}, depth + 1)
        case Const(kind, payload):
            return kind is b.kind and _same_number(payload, b.payload)
    for f in fields(a):
        if not _field_eq(getattr(a, f.name), getattr(b, f.name), left, right, depth):
            return False
    return True


def _field_eq(x, y, left: dict[str, int], right: dict[str, int], depth: int) -> bool:
    if isinstance(x, EXPR_TYPES):
        return isinstance(y, EXPR_TYPES) and _alpha_eq(x, y, left, right, depth)
    if isinstance(x, tuple):
        return (
            isinstance(y, tuple)
            and len(x) == len(y)
            and all(_field_eq(xi, yi, left, right, depth) for xi, yi in zip(x, y))
        )
    return x == y


# ---------------------------------------------------------------------------
# Pretty printing

def pretty_const(kind: PrimType, payload: int | float) -> str:
    if kind is PrimType.TAG:
        return f"#{payload}"
    return repr(payload)


def pretty(e: Expr, indent: int = 0) -> str:
    pad = "  " * indent
    inner = "  " * (indent + 1)
    match e:
        case Const(kind, payload):
            return pretty_const(kind, payload)
        case MkUnit():
            return "()"
        case MkPair(left, right):
            return f"({pretty(left, indent)}, {pretty(right, indent)})"
        case Prj(path, expr):
            return f"prj[{path}] {_atom(expr, indent)}"
        case Roll(expr, adt):
            return f"roll[{adt}] {_atom(expr, indent)}"
        case Unroll(expr):
            return f"unroll {_atom(expr, indent)}"
        case MatchE(trace, expr):
            return f"match[{pretty_trace(trace)}] {_atom(expr, indent)}"
        case CaseE(scrutinee, branches):
            lines = [f"case {pretty(scrutinee, indent)} of"]
            for trace, rhs in branches:
                lines.append(f"{inner}{pretty_trace(trace)} -> {pretty(rhs, indent + 2)}")
            return "\n".join(lines)
        case Let(name, bound, body):
            return f"let {name} = {pretty(bound, indent + 1)} in\n{pad}{pretty(body, indent)}"
        case Var(name):
            return name
        case Undef(rep):
            return f"undef[{pretty_rep(rep)}]"
        case PrimApp(op, args):
            return "(" + f" {OP_SYMBOLS[op]} ".join(pretty(a, indent) for a in args) + ")"
        case Switch(scrutinee, path, arms, default):
            lines = [f"switch {_atom(scrutinee, indent)}.{path or '.'} of"]
            for tag, body in arms:
                lines.append(f"{inner}{tag} -> {pretty(body, indent + 2)}")
            if default is not None:
                lines.append(f"{inner}_ -> {pretty(default, indent + 2)}")
            return "\n".join(lines)
    return repr(e)


def _atom(e: Expr, indent: int) -> str:
    text = pretty(e, indent)
    if isinstance(e, (Var, Const, MkUnit, MkPair, PrimApp)):
        return text
    return f"({text})"
