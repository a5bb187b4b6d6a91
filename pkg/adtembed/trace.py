"""
Traces: witnesses of one complete pathway through nested constructor choices.

A trace mirrors a representation type. ``Tag`` nodes fix the constructor at a
sum root; every other node is a wildcard. Enumeration never descends through a
recursion marker, so the trace set of any registered type is finite.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Union

from adtembed import errors
from adtembed.types import (
    AdtRegistry,
    Con,
    Pair,
    PairV,
    Prim,
    PrimType,
    PrimV,
    RecMark,
    RepValue,
    Scalar,
    SurfaceValue,
    TupleV,
    TypeRep,
    Unit,
    is_sum_root,
)


@dataclass(frozen=True)
class UnitT:
    pass


@dataclass(frozen=True)
class PrimT:
    kind: PrimType


@dataclass(frozen=True)
class PairT:
    left: Trace
    right: Trace


@dataclass(frozen=True)
class RecT:
    pass


@dataclass(frozen=True)
class Tag:
    tag: int
    fields: Trace


Trace = Union[UnitT, PrimT, PairT, RecT, Tag]

TAG_T = PrimT(PrimType.TAG)


def witness(rep: TypeRep) -> Trace:
    """The single tag-free trace of ``rep``; matches every value of the type."""
    match rep:
        case Unit():
            return UnitT()
        case Prim(kind):
            return PrimT(kind)
        case Pair(left, right):
            return PairT(witness(left), witness(right))
        case RecMark():
            return RecT()
    raise errors.TypeMismatch(f"not a representation type: {rep!r}")


def _product_trace(components) -> Trace:
    trace: Trace = UnitT()
    for component in components:
        trace = PairT(trace, component)
    return trace


def enumerate_traces(rep: TypeRep, registry: AdtRegistry) -> list[Trace]:
    """
    All traces of ``rep`` in the fixed order: constructors in declaration order
    outermost, then Cartesian products with the left component varying slowest.

    Args:
        rep: A representation type produced by ``repr_of``; sum roots must carry
            their ADT annotation to be split by constructor.
        registry: Registry that resolves annotated sum roots.

    Returns:
        A non-empty list of traces.
    """
    match rep:
        case Unit():
            return [UnitT()]
        case Prim(kind):
            return [PrimT(kind)]
        case RecMark():
            return [RecT()]
        case Pair(left, right) if is_sum_root(rep) and rep.sum_of is not None:
            info = registry.lookup(rep.sum_of)
            traces: list[Trace] = []
            for k in range(info.constructor_count):
                choices = [
                    enumerate_traces(slot.rep, registry) if owner == k else [witness(slot.rep)]
                    for owner, slot in info.all_slots()
                ]
                traces.extend(Tag(k, _product_trace(combo)) for combo in itertools.product(*choices))
            return traces
        case Pair(left, right):
            return [
                PairT(lt, rt)
                for lt, rt in itertools.product(enumerate_traces(left, registry), enumerate_traces(right, registry))
            ]
    raise errors.TypeMismatch(f"not a representation type: {rep!r}")


def trace_of_value(value: SurfaceValue, registry: AdtRegistry) -> Trace:
    """The enumerated trace selecting exactly ``value``'s constructors; recursion points are RecT."""
    match value:
        case Scalar(kind):
            return PrimT(kind)
        case TupleV(components):
            return _product_trace(trace_of_value(c, registry) for c in components)
        case Con(adt, index, fields):
            info = registry.lookup(adt)
            given = iter(fields)
            components = []
            for owner, slot in info.all_slots():
                if owner != index:
                    components.append(witness(slot.rep))
                    continue
                field_value = next(given)
                components.append(RecT() if slot.recursive else trace_of_value(field_value, registry))
            fields_trace = _product_trace(components)
            return Tag(index, fields_trace) if info.is_sum else fields_trace
    raise errors.TypeMismatch(f"not a surface value: {value!r}")


def trace_matches(trace: Trace, value: RepValue) -> bool:
    match trace:
        case Tag(tag, fields):
            if not isinstance(value, PairV) or not isinstance(value.left, PrimV):
                raise errors.TypeMismatch(f"trace {pretty_trace(trace)} does not fit value {value!r}")
            if value.left.poisoned:
                raise errors.PoisonRead("case inspected an undefined tag")
            # tag first: the fields of a non-selected constructor are undefined
            return value.left.payload == tag and trace_matches(fields, value.right)
        case PairT(left, right):
            if not isinstance(value, PairV):
                raise errors.TypeMismatch(f"trace {pretty_trace(trace)} does not fit value {value!r}")
            return trace_matches(left, value.left) and trace_matches(right, value.right)
    return True


def trace_conforms(trace: Trace, rep: TypeRep, registry: Optional[AdtRegistry] = None) -> bool:
    match trace, rep:
        case UnitT(), Unit():
            return True
        case PrimT(kind), Prim(rkind):
            return kind is rkind
        case RecT(), RecMark():
            return True
        case PairT(left, right), Pair(rleft, rright):
            return trace_conforms(left, rleft, registry) and trace_conforms(right, rright, registry)
        case Tag(tag, fields), Pair(_, rfields) if is_sum_root(rep):
            if tag < 0:
                return False
            if registry is not None and rep.sum_of is not None:
                if tag >= registry.lookup(rep.sum_of).constructor_count:
                    return False
            return trace_conforms(fields, rfields, registry)
    return False


def subtrace(trace: Trace, path: str) -> Trace:
    """Follow a pair path into a trace; a Tag node behaves as the pair (TAG, fields)."""
    for step in path:
        match trace:
            case PairT(left, right):
                trace = left if step == "L" else right
            case Tag(_, fields):
                trace = TAG_T if step == "L" else fields
            case _:
                raise errors.BadProjection(f"path {path!r} leaves the trace at {pretty_trace(trace)}")
    return trace


def leftmost_tag(trace: Trace) -> Optional[str]:
    """Path of the first Tag node in pre-order, or None for a tag-free trace."""
    match trace:
        case Tag():
            return ""
        case PairT(left, right):
            found = leftmost_tag(left)
            if found is not None:
                return "L" + found
            found = leftmost_tag(right)
            if found is not None:
                return "R" + found
    return None


def erase_tag(trace: Trace, path: str) -> tuple[int, Trace]:
    """Replace the Tag node at ``path`` by its tag-free pair; returns (tag, new trace)."""
    if not path:
        if not isinstance(trace, Tag):
            raise errors.MalformedTraces(f"no tag at this position in {pretty_trace(trace)}")
        return trace.tag, PairT(TAG_T, trace.fields)
    step, rest = path[0], path[1:]
    match trace:
        case PairT(left, right) if step == "L":
            tag, left = erase_tag(left, rest)
            return tag, PairT(left, right)
        case PairT(left, right):
            tag, right = erase_tag(right, rest)
            return tag, PairT(left, right)
        case Tag(k, fields) if step == "R":
            tag, fields = erase_tag(fields, rest)
            return tag, Tag(k, fields)
    raise errors.MalformedTraces(f"branch traces disagree in shape at {path!r}")


def pretty_trace(trace: Trace) -> str:
    match trace:
        case UnitT():
            return "()"
        case PrimT(kind):
            return "TAG" if kind is PrimType.TAG else kind.value
        case PairT(left, right):
            return f"({pretty_trace(left)}, {pretty_trace(right)})"
        case RecT():
            return "rec"
        case Tag(tag, fields):
            return f"#{tag} {pretty_trace(fields)}"
    return repr(trace)
