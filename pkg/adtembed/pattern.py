"""
Builders and matchers for constructors and tuples.

A builder assembles the representation of a constructor application. A
matcher takes a term wrapped in a ``MatchE`` proxy and, if the proxy's trace
selects the constructor, hands back one expression per field (each again
wrapped with its sub-trace, so nested patterns keep working). Outside of a
match context matchers refuse to run.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from adtembed import errors
from adtembed.ast import Const, Expr, MatchE, MkPair, MkUnit, Prj, Roll, Undef, Unroll, infer_type
from adtembed.matcher import EmbeddedFn, apply_fn, match_fn
from adtembed.trace import RecT, Tag, UnitT, subtrace
from adtembed.types import (
    BOOL,
    AdtInfo,
    AdtRegistry,
    AdtTy,
    Con,
    PrimType,
    Scalar,
    SurfaceValue,
    TupleV,
    pretty_rep,
    product_paths,
)


@dataclass(frozen=True)
class ConRef:
    adt: str
    index: int

    @classmethod
    def named(cls, registry: AdtRegistry, adt: str, con_name: str) -> ConRef:
        return cls(adt, registry.lookup(adt).con_index(con_name))

    def info(self, registry: AdtRegistry) -> AdtInfo:
        info = registry.lookup(self.adt)
        if not 0 <= self.index < info.constructor_count:
            raise errors.BadTag(f"{self.adt} has no constructor with index {self.index}")
        return info

    def label(self, registry: AdtRegistry) -> str:
        return self.info(registry).decl.constructors[self.index].name


FALSE = ConRef(BOOL, 0)
TRUE = ConRef(BOOL, 1)


def build_tuple(args: Sequence[Expr]) -> Expr:
    result: Expr = MkUnit()
    for arg in args:
        result = MkPair(result, arg)
    return result


def build_con(con: ConRef, args: Sequence[Expr], registry: AdtRegistry) -> Expr:
    """
    Build a constructor application.

    Args:
        con: The constructor.
        args: One term per declared field; recursive fields take an unrolled term
            of the ADT and are wrapped in Roll here.
        registry: Registry that holds the ADT.

    Returns:
        For sums, the pair of the constructor's TAG and the flat field tuple in
        which every other constructor's slot is Undef. For single-constructor
        ADTs, the field tuple alone.
    """
    info = con.info(registry)
    slots = info.slots[con.index]
    if len(args) != len(slots):
        raise errors.ArityMismatch(
            f"{con.label(registry)} takes {len(slots)} argument(s), given {len(args)}"
        )
    for i, (slot, arg) in enumerate(zip(slots, args)):
        expected = info.rep if slot.recursive else slot.rep
        found = infer_type(arg, registry)
        if found != expected:
            raise errors.TypeMismatch(
                f"argument {i} of {con.label(registry)} has type {pretty_rep(found)}, expected {pretty_rep(expected)}"
            )

    given = iter(zip(slots, args))
    components: list[Expr] = []
    for owner, slot in info.all_slots():
        if owner != con.index:
            components.append(Undef(slot.rep))
            continue
        _, arg = next(given)
        components.append(Roll(arg, info.name) if slot.recursive else arg)
    fields = build_tuple(components)
    if info.is_sum:
        return MkPair(Const(PrimType.TAG, con.index), fields)
    return fields


def match_con(con: ConRef, scrutinee: Expr, registry: AdtRegistry) -> Optional[list[Expr]]:
    """
    Match a constructor against a proxied term.

    Returns None when the proxy's trace selects another constructor, otherwise
    the field expressions. Recursive fields come back unrolled and without a
    proxy, so they can only be inspected by a separate match.
    """
    info = con.info(registry)
    if isinstance(scrutinee, Unroll) or (isinstance(scrutinee, MatchE) and isinstance(scrutinee.trace, RecT)):
        raise errors.RecursiveSubPattern(
            f"{con.label(registry)}: a recursive field cannot be matched as a nested pattern; "
            "match it in a separate case"
        )
    if not isinstance(scrutinee, MatchE):
        raise errors.MatchOutsideContext(
            f"embedded pattern {con.label(registry)} used outside of a match context"
        )

    trace, inner = scrutinee.trace, scrutinee.expr
    if info.is_sum:
        if not isinstance(trace, Tag):
            raise errors.TypeMismatch(f"{info.name} matched against a trace without a tag")
        if trace.tag != con.index:
            return None

    fields: list[Expr] = []
    for slot in info.slots[con.index]:
        projection = Prj(slot.path, inner)
        if slot.recursive:
            fields.append(Unroll(projection))
        else:
            fields.append(MatchE(subtrace(trace, slot.path), projection))
    return fields


def match_tuple(scrutinee: Expr, arity: int) -> list[Expr]:
    """Project the components of a product; proxies propagate their sub-traces."""
    paths = product_paths(arity)
    if not isinstance(scrutinee, MatchE):
        return [Prj(path, scrutinee) for path in paths]
    trace, inner = scrutinee.trace, scrutinee.expr
    try:
        if subtrace(trace, "L" * arity) != UnitT():
            raise errors.BadProjection("component count differs")
        return [MatchE(subtrace(trace, path), Prj(path, inner)) for path in paths]
    except errors.BadProjection as exc:
        raise errors.TypeMismatch(f"matched term is not a {arity}-component product: {exc.detail}") from exc


def quote(value: SurfaceValue, registry: AdtRegistry) -> Expr:
    """A closed constant term for a host value."""
    match value:
        case Scalar(kind, payload):
            return Const(kind, kind.check_payload(payload))
        case TupleV(components):
            return build_tuple([quote(c, registry) for c in components])
        case Con(adt, index, fields):
            return build_con(ConRef(adt, index), [quote(f, registry) for f in fields], registry)
    raise errors.TypeMismatch(f"not a surface value: {value!r}")


def if_then_else(cond: Expr, then: Expr, else_: Expr, registry: AdtRegistry) -> Expr:
    """Embedded conditional: a match over the Bool ``cond``."""
    branch = match_fn(
        EmbeddedFn(
            (AdtTy(BOOL),),
            lambda b: then if match_con(TRUE, b, registry) is not None else else_,
            name="if",
        ),
        registry,
    )
    return apply_fn(branch, [cond], registry)
