"""
Reference interpreter.

``evaluate`` defines the meaning of source terms (with ``CaseE``);
``evaluate_core`` the meaning of lowered terms (with ``Switch``). Undefined
values carry a poison flag; arithmetic propagates it and any attempt to look
at it (a tag test, a projection through it, lowering it to a host value) is a
``PoisonRead``.
"""

from __future__ import annotations

from typing import Mapping

import numpy as np

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
from adtembed.trace import trace_matches
from adtembed.types import (
    AdtRegistry,
    PairV,
    PrimType,
    PrimV,
    RepValue,
    RollV,
    SurfaceType,
    SurfaceValue,
    UnitV,
    lower,
    make_undef,
    project_value,
)

ValueEnv = Mapping[str, RepValue]

_ARITHMETIC = {
    PrimOp.ADD: np.add,
    PrimOp.SUB: np.subtract,
    PrimOp.MUL: np.multiply,
}

_DTYPES = {PrimType.I64: np.int64, PrimType.F64: np.float64}


def bool_value(flag: bool, poisoned: bool = False) -> RepValue:
    """Representation of the prelude Bool: (TAG, ())."""
    return PairV(PrimV(PrimType.TAG, int(flag) if not poisoned else 0, poisoned), UnitV())


def apply_prim(op: PrimOp, args: list[RepValue]) -> RepValue:
    if len(args) != 2:
        raise errors.ArityMismatch(f"{op.value} takes 2 operands, given {len(args)}")
    a, b = args
    if not isinstance(a, PrimV) or not isinstance(b, PrimV) or a.kind is not b.kind:
        raise errors.TypeMismatch(f"{op.value} needs two primitives of one kind, found {a!r} and {b!r}")
    kind = a.kind
    poisoned = a.poisoned or b.poisoned

    if op.is_comparison:
        if poisoned:
            return bool_value(False, poisoned=True)
        result = a.payload == b.payload if op is PrimOp.EQ else a.payload < b.payload
        return bool_value(bool(result))

    if kind is PrimType.TAG:
        raise errors.TypeMismatch(f"{op.value} is not defined on TAG")
    if poisoned:
        return PrimV(kind, kind.zero(), poisoned=True)

    dtype = _DTYPES[kind]
    x, y = dtype(a.payload), dtype(b.payload)
    with np.errstate(all="ignore"):
        if op is PrimOp.DIV:
            if kind is PrimType.I64:
                if y == 0:
                    raise errors.IntegerDivByZero(f"{a.payload} / 0")
                value = np.floor_divide(x, y)
            else:
                value = np.divide(x, y)
        else:
            value = _ARITHMETIC[op](x, y)
    return PrimV(kind, float(value) if kind is PrimType.F64 else int(value))


def evaluate(e: Expr, env: ValueEnv, registry: AdtRegistry) -> RepValue:
    """Evaluate a source term; Case picks the first branch whose trace matches."""
    return _eval(e, env, registry, core=False)


def evaluate_core(e: Expr, env: ValueEnv, registry: AdtRegistry) -> RepValue:
    """Evaluate a lowered term; Switch reads the TAG at its path."""
    return _eval(e, env, registry, core=True)


def evaluate_closed(e: Expr, result_type: SurfaceType, registry: AdtRegistry, *, core: bool = False) -> SurfaceValue:
    return lower(_eval(e, {}, registry, core=core), result_type, registry)


def _eval(e: Expr, env: ValueEnv, registry: AdtRegistry, core: bool) -> RepValue:
    match e:
        case Const(kind, payload):
            return PrimV(kind, kind.check_payload(payload))
        case MkUnit():
            return UnitV()
        case MkPair(left, right):
            return PairV(_eval(left, env, registry, core), _eval(right, env, registry, core))
        case Prj(path, inner):
            return project_value(_eval(inner, env, registry, core), path)
        case Roll(inner, _):
            return RollV(_eval(inner, env, registry, core))
        case Unroll(inner):
            value = _eval(inner, env, registry, core)
            if not isinstance(value, RollV):
                raise errors.BadUnroll(f"unroll of a non-rolled value {value!r}")
            return value.inner
        case MatchE():
            raise errors.ResidualMatch("Match node reached evaluation")
        case CaseE(scrutinee, branches):
            if core:
                raise errors.TypeMismatch("case in a lowered program")
            value = _eval(scrutinee, env, registry, core)
            for trace, rhs in branches:
                if trace_matches(trace, value):
                    return _eval(rhs, env, registry, core)
            raise errors.NoBranchMatched(f"no branch of {len(branches)} matches {value!r}")
        case Switch(scrutinee, path, arms, default):
            if not core:
                raise errors.TypeMismatch("switch in a source program")
            tag = project_value(_eval(scrutinee, env, registry, core), path)
            if not isinstance(tag, PrimV) or tag.kind is not PrimType.TAG:
                raise errors.TypeMismatch(f"switch path {path!r} does not address a TAG")
            if tag.poisoned:
                raise errors.PoisonRead("switch inspected an undefined tag")
            for arm_tag, body in arms:
                if arm_tag == tag.payload:
                    return _eval(body, env, registry, core)
            if default is None:
                raise errors.NoBranchMatched(f"switch has no arm for tag {tag.payload} and no default")
            return _eval(default, env, registry, core)
        case Let(name, bound, body):
            value = _eval(bound, env, registry, core)
            return _eval(body, {**env, name: value}, registry, core)
        case Var(name):
            try:
                return env[name]
            except KeyError:
                raise errors.UnboundVar(f"variable {name!r} is not bound") from None
        case Undef(rep):
            return make_undef(rep)
        case PrimApp(op, args):
            return apply_prim(op, [_eval(a, env, registry, core) for a in args])
    raise errors.TypeMismatch(f"not an expression: {e!r}")
