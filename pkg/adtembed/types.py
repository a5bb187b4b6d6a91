"""
ADT schemas and their internal representation.

User-facing (surface) types are mapped onto a closed set of representation
types: unit, primitives, left-nested pairs and recursion markers. Products
become Unit-rooted left-nested pairs of their fields; sums become a pair of a
TAG and the flat concatenation of *all* constructors' fields, where the slots
of the constructors that were not chosen hold undefined (poisoned) values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Optional, Sequence, Union

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    ValidationError,
    field_serializer,
    field_validator,
    model_validator,
)

from adtembed import errors

logger = logging.getLogger(__name__)

TAG_MAX = int(np.iinfo(np.uint32).max)
I64_MIN = int(np.iinfo(np.int64).min)
I64_MAX = int(np.iinfo(np.int64).max)

BOOL = "Bool"


class PrimType(str, Enum):
    I64 = "i64"
    F64 = "f64"
    TAG = "tag"

    def check_payload(self, payload: Any) -> int | float:
        """Validate a host number for this primitive and return it in canonical form."""
        if self is PrimType.F64:
            if isinstance(payload, bool) or not isinstance(payload, (int, float, np.floating, np.integer)):
                raise errors.TypeMismatch(f"f64 payload must be a number, got {payload!r}")
            return float(payload)
        if isinstance(payload, bool) or not isinstance(payload, (int, np.integer)):
            raise errors.TypeMismatch(f"{self.value} payload must be an integer, got {payload!r}")
        payload = int(payload)
        if self is PrimType.TAG and not 0 <= payload <= TAG_MAX:
            raise errors.BadTag(f"TAG {payload} does not fit in 32 unsigned bits")
        if self is PrimType.I64 and not I64_MIN <= payload <= I64_MAX:
            raise errors.TypeMismatch(f"i64 payload {payload} out of range")
        return payload

    def zero(self) -> int | float:
        return 0.0 if self is PrimType.F64 else 0


# ---------------------------------------------------------------------------
# Representation types

@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Prim:
    kind: PrimType


@dataclass(frozen=True)
class Pair:
    left: TypeRep
    right: TypeRep
    # name of the sum ADT whose root this is; set by repr_of, never compared or serialised
    sum_of: Optional[str] = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class RecMark:
    adt: str


TypeRep = Union[Unit, Prim, Pair, RecMark]

TAG_REP = Prim(PrimType.TAG)


def product_rep(components: Iterable[TypeRep]) -> TypeRep:
    """Unit-rooted left-nested pairs: ``((((), a), b), c)``."""
    rep: TypeRep = Unit()
    for component in components:
        rep = Pair(rep, component)
    return rep


def product_paths(arity: int) -> list[str]:
    """Pair paths of the fields of an ``arity``-component product, in field order."""
    return ["L" * (arity - 1 - i) + "R" for i in range(arity)]


def is_sum_root(rep: TypeRep) -> bool:
    return isinstance(rep, Pair) and rep.left == TAG_REP


def fully_annotated(rep: TypeRep) -> bool:
    """True when every sum root in ``rep`` knows its ADT (i.e. it came from repr_of)."""
    if isinstance(rep, Pair):
        if is_sum_root(rep) and rep.sum_of is None:
            return False
        return fully_annotated(rep.left) and fully_annotated(rep.right)
    return True


def pretty_rep(rep: TypeRep) -> str:
    match rep:
        case Unit():
            return "()"
        case Prim(kind):
            return "TAG" if kind is PrimType.TAG else kind.value
        case Pair(left, right):
            return f"({pretty_rep(left)}, {pretty_rep(right)})"
        case RecMark(adt):
            return f"Rec {adt}"
    raise errors.TypeMismatch(f"not a representation type: {rep!r}")


# ---------------------------------------------------------------------------
# Surface types

@dataclass(frozen=True)
class PrimTy:
    kind: PrimType


@dataclass(frozen=True)
class AdtTy:
    name: str


@dataclass(frozen=True)
class TupleTy:
    components: tuple[SurfaceType, ...] = ()


SurfaceType = Union[PrimTy, AdtTy, TupleTy]

F64 = PrimTy(PrimType.F64)
I64 = PrimTy(PrimType.I64)


def parse_typeref(data: Any, location: str = "$") -> SurfaceType:
    """Parse a JSON typeref: ``"i64" | "f64" | {"adt": name} | {"tuple": [typeref...]}``."""
    if isinstance(data, (PrimTy, AdtTy, TupleTy)):
        return data
    if data in ("i64", "f64"):
        return PrimTy(PrimType(data))
    if isinstance(data, dict) and len(data) == 1:
        if isinstance(data.get("adt"), str) and data["adt"]:
            return AdtTy(data["adt"])
        if isinstance(data.get("tuple"), list):
            return TupleTy(tuple(
                parse_typeref(item, f"{location}.tuple[{i}]") for i, item in enumerate(data["tuple"])
            ))
    raise errors.ParseError(f"invalid typeref {data!r}", location)


def typeref_to_json(t: SurfaceType) -> Any:
    match t:
        case PrimTy(kind):
            return kind.value
        case AdtTy(name):
            return {"adt": name}
        case TupleTy(components):
            return {"tuple": [typeref_to_json(c) for c in components]}
    raise errors.TypeMismatch(f"not a surface type: {t!r}")


def pretty_surface(t: SurfaceType) -> str:
    match t:
        case PrimTy(kind):
            return kind.value
        case AdtTy(name):
            return name
        case TupleTy(components):
            return "(" + ", ".join(pretty_surface(c) for c in components) + ")"
    raise errors.TypeMismatch(f"not a surface type: {t!r}")


# ---------------------------------------------------------------------------
# Schemas

class ConDecl(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1, description="Constructor name, unique within its ADT")
    fields: tuple[Any, ...] = Field(
        default=(), description="SurfaceType of each field; an AdtTy of the enclosing ADT marks recursion"
    )

    @field_validator("fields", mode="before")
    @classmethod
    def parse_fields(cls, value: Any) -> tuple[SurfaceType, ...]:
        if not isinstance(value, (list, tuple)):
            raise ValueError("fields must be a list of typerefs")
        parsed = []
        for i, item in enumerate(value):
            try:
                parsed.append(parse_typeref(item, f"fields[{i}]"))
            except errors.ParseError as exc:
                raise ValueError(exc.message) from exc
        return tuple(parsed)

    @field_serializer("fields")
    def dump_fields(self, value: tuple[SurfaceType, ...]) -> list:
        return [typeref_to_json(t) for t in value]


class AdtDecl(BaseModel):
    """A user-defined algebraic data type; constructor index = declaration position."""

    model_config = ConfigDict(frozen=True)

    name: str = Field(min_length=1, description="ADT name (monomorphic, e.g. 'MaybeF64')")
    constructors: tuple[ConDecl, ...] = Field(min_length=1, description="Alternatives in tag order")

    @model_validator(mode="after")
    def unique_constructor_names(self) -> AdtDecl:
        names = [c.name for c in self.constructors]
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise ValueError(f"duplicate constructor names in {self.name}: {duplicates}")
        return self

    @classmethod
    def from_json(cls, data: Any) -> AdtDecl:
        try:
            return cls.model_validate(data)
        except ValidationError as exc:
            first = exc.errors()[0]
            location = "$" + "".join(
                f"[{part}]" if isinstance(part, int) else f".{part}" for part in first["loc"]
            )
            raise errors.ParseError(first["msg"], location) from exc

    def referenced_adts(self) -> set[str]:
        found: set[str] = set()

        def visit(t: SurfaceType) -> None:
            if isinstance(t, AdtTy):
                found.add(t.name)
            elif isinstance(t, TupleTy):
                for c in t.components:
                    visit(c)

        for con in self.constructors:
            for t in con.fields:
                visit(t)
        return found


@dataclass(frozen=True)
class FieldSlot:
    """Where one constructor field lives inside the ADT's representation."""

    path: str
    rep: TypeRep
    surface: SurfaceType
    recursive: bool


@dataclass(frozen=True)
class AdtInfo:
    decl: AdtDecl
    rep: TypeRep
    slots: tuple[tuple[FieldSlot, ...], ...]

    @property
    def name(self) -> str:
        return self.decl.name

    @property
    def is_sum(self) -> bool:
        return len(self.decl.constructors) >= 2

    @property
    def constructor_count(self) -> int:
        return len(self.decl.constructors)

    def all_slots(self) -> list[tuple[int, FieldSlot]]:
        """Every field slot of every constructor, in flat layout order."""
        return [(k, slot) for k, slots in enumerate(self.slots) for slot in slots]

    def con_index(self, con_name: str) -> int:
        for i, con in enumerate(self.decl.constructors):
            if con.name == con_name:
                return i
        raise errors.UnknownAdt(f"{self.name} has no constructor {con_name!r}")


BOOL_DECL = AdtDecl(
    name=BOOL,
    constructors=(ConDecl(name="False"), ConDecl(name="True")),
)


class AdtRegistry:
    """
    Immutable registry of ADT schemas. ``register`` returns a new registry.

    Every registry starts with the prelude ``Bool`` (False = 0, True = 1),
    which comparisons produce.
    """

    def __init__(self, infos: Optional[dict[str, AdtInfo]] = None):
        if infos is None:
            infos = {}
            infos[BOOL] = _derive(BOOL_DECL, infos)
        self._infos = dict(infos)

    def __contains__(self, name: str) -> bool:
        return name in self._infos

    def names(self) -> list[str]:
        return list(self._infos)

    def lookup(self, name: str) -> AdtInfo:
        try:
            return self._infos[name]
        except KeyError:
            raise errors.UnknownAdt(f"ADT {name!r} is not registered") from None

    def decls(self) -> list[AdtDecl]:
        return [info.decl for info in self._infos.values()]

    def register(self, decl: AdtDecl) -> AdtRegistry:
        if decl.name in self._infos:
            raise errors.DuplicateAdt(f"ADT {decl.name!r} is already registered")
        info = _derive(decl, self._infos)
        logger.debug("registered %s with %d constructor(s): %s",
                     decl.name, info.constructor_count, pretty_rep(info.rep))
        return AdtRegistry({**self._infos, decl.name: info})

    def register_all(self, decls: Sequence[AdtDecl]) -> AdtRegistry:
        """Register a batch in dependency order; cycles between distinct ADTs are rejected."""
        pending = {d.name: d for d in decls}
        if len(pending) != len(decls):
            raise errors.DuplicateAdt("batch declares the same ADT twice")
        registry = self
        while pending:
            ready = [
                d for d in pending.values()
                if not (d.referenced_adts() - {d.name}) & pending.keys()
            ]
            if not ready:
                raise errors.MutualRecursionUnsupported(
                    f"ADTs {sorted(pending)} reference each other; only self-recursion is supported"
                )
            for decl in ready:
                registry = registry.register(decl)
                del pending[decl.name]
        return registry

    def repr_of(self, t: SurfaceType) -> TypeRep:
        match t:
            case PrimTy(kind):
                return Prim(kind)
            case AdtTy(name):
                return self.lookup(name).rep
            case TupleTy(components):
                return product_rep(self.repr_of(c) for c in components)
        raise errors.TypeMismatch(f"not a surface type: {t!r}")

    def bool_rep(self) -> TypeRep:
        return self.lookup(BOOL).rep


def _derive(decl: AdtDecl, known: dict[str, AdtInfo]) -> AdtInfo:
    def field_rep(t: SurfaceType, top: bool) -> TypeRep:
        match t:
            case PrimTy(kind):
                if kind is PrimType.TAG:
                    raise errors.UnknownFieldType(f"{decl.name}: TAG is not a user field type")
                return Prim(kind)
            case AdtTy(name) if name == decl.name:
                if not top:
                    raise errors.UnknownFieldType(
                        f"{decl.name}: recursive reference must be a direct constructor field"
                    )
                return RecMark(name)
            case AdtTy(name):
                if name not in known:
                    raise errors.UnknownFieldType(f"{decl.name}: field type {name!r} is not registered")
                return known[name].rep
            case TupleTy(components):
                return product_rep(field_rep(c, False) for c in components)
        raise errors.UnknownFieldType(f"{decl.name}: invalid field type {t!r}")

    flat = [(k, t, field_rep(t, True)) for k, con in enumerate(decl.constructors) for t in con.fields]
    is_sum = len(decl.constructors) >= 2
    prefix = "R" if is_sum else ""
    paths = product_paths(len(flat))
    slots: list[list[FieldSlot]] = [[] for _ in decl.constructors]
    for (k, t, rep), path in zip(flat, paths):
        slots[k].append(FieldSlot(prefix + path, rep, t, isinstance(rep, RecMark)))

    fields_rep = product_rep(rep for _, _, rep in flat)
    rep = Pair(TAG_REP, fields_rep, sum_of=decl.name) if is_sum else fields_rep
    return AdtInfo(decl, rep, tuple(tuple(s) for s in slots))


def register_adt(decl: AdtDecl, registry: AdtRegistry) -> AdtRegistry:
    return registry.register(decl)


def repr_of(t: SurfaceType, registry: AdtRegistry) -> TypeRep:
    return registry.repr_of(t)


# ---------------------------------------------------------------------------
# Values

@dataclass(frozen=True)
class UnitV:
    pass


@dataclass(frozen=True)
class PrimV:
    kind: PrimType
    payload: int | float
    poisoned: bool = False


@dataclass(frozen=True)
class PairV:
    left: RepValue
    right: RepValue


@dataclass(frozen=True)
class RollV:
    inner: RepValue


RepValue = Union[UnitV, PrimV, PairV, RollV]


@dataclass(frozen=True)
class Scalar:
    kind: PrimType
    value: int | float


@dataclass(frozen=True)
class Con:
    adt: str
    index: int
    fields: tuple[SurfaceValue, ...] = ()


@dataclass(frozen=True)
class TupleV:
    components: tuple[SurfaceValue, ...] = ()


SurfaceValue = Union[Scalar, Con, TupleV]


def undef_stub() -> RepValue:
    """The TAG-only value standing in for an undefined recursive slot."""
    return PrimV(PrimType.TAG, 0, poisoned=True)


def make_undef(rep: TypeRep) -> RepValue:
    match rep:
        case Unit():
            return UnitV()
        case Prim(kind):
            return PrimV(kind, kind.zero(), poisoned=True)
        case Pair(left, right):
            return PairV(make_undef(left), make_undef(right))
        case RecMark():
            return RollV(undef_stub())
    raise errors.TypeMismatch(f"not a representation type: {rep!r}")


def project_value(value: RepValue, path: str) -> RepValue:
    for step in path:
        if isinstance(value, PrimV) and value.poisoned:
            raise errors.PoisonRead(f"projection {path!r} passes through an undefined value")
        if not isinstance(value, PairV):
            raise errors.TypeMismatch(f"projection {path!r} expects a pair, found {value!r}")
        value = value.left if step == "L" else value.right
    return value


def conforms(value: RepValue, rep: TypeRep, registry: AdtRegistry) -> bool:
    """True when ``value`` has the shape of ``rep``, unfolding recursion points through ``registry``."""
    match rep, value:
        case Unit(), UnitV():
            return True
        case Prim(kind), PrimV(vkind):
            return kind is vkind
        case Pair(left, right), PairV(lv, rv):
            return conforms(lv, left, registry) and conforms(rv, right, registry)
        case RecMark(adt), RollV(inner):
            # the undefined stub stands in for any recursive slot
            return inner == undef_stub() or conforms(inner, registry.lookup(adt).rep, registry)
    return False


def surface_type_of(value: SurfaceValue) -> SurfaceType:
    match value:
        case Scalar(kind):
            return PrimTy(kind)
        case Con(adt):
            return AdtTy(adt)
        case TupleV(components):
            return TupleTy(tuple(surface_type_of(c) for c in components))
    raise errors.TypeMismatch(f"not a surface value: {value!r}")


def check_value(value: SurfaceValue, t: SurfaceType, registry: AdtRegistry) -> None:
    """Raise unless ``value`` is a well-typed inhabitant of ``t``."""
    match t, value:
        case PrimTy(kind), Scalar(vkind, payload) if kind is vkind:
            kind.check_payload(payload)
        case TupleTy(components), TupleV(values):
            if len(components) != len(values):
                raise errors.ArityMismatch(
                    f"tuple of {len(components)} components given {len(values)} values"
                )
            for c, v in zip(components, values):
                check_value(v, c, registry)
        case AdtTy(name), Con(adt, index, fields) if name == adt:
            info = registry.lookup(adt)
            if not 0 <= index < info.constructor_count:
                raise errors.BadTag(f"{adt} has no constructor with index {index}")
            slots = info.slots[index]
            if len(slots) != len(fields):
                con = info.decl.constructors[index].name
                raise errors.ArityMismatch(f"{con} takes {len(slots)} field(s), given {len(fields)}")
            for slot, v in zip(slots, fields):
                check_value(v, slot.surface, registry)
        case _:
            raise errors.TypeMismatch(f"value {value!r} is not of type {pretty_surface(t)}")


def lift(value: SurfaceValue, registry: AdtRegistry) -> RepValue:
    """Host value to representation value (fromElt)."""
    check_value(value, surface_type_of(value), registry)
    return _lift(value, registry)


def _lift(value: SurfaceValue, registry: AdtRegistry) -> RepValue:
    match value:
        case Scalar(kind, payload):
            return PrimV(kind, kind.check_payload(payload))
        case TupleV(components):
            return _product_value([_lift(c, registry) for c in components])
        case Con(adt, index, fields):
            info = registry.lookup(adt)
            given = iter(fields)
            slot_values = []
            for k, slot in info.all_slots():
                if k != index:
                    slot_values.append(make_undef(slot.rep))
                    continue
                v = _lift(next(given), registry)
                slot_values.append(RollV(v) if slot.recursive else v)
            fields_value = _product_value(slot_values)
            if info.is_sum:
                return PairV(PrimV(PrimType.TAG, index), fields_value)
            return fields_value
    raise errors.TypeMismatch(f"not a surface value: {value!r}")


def _product_value(values: Iterable[RepValue]) -> RepValue:
    result: RepValue = UnitV()
    for v in values:
        result = PairV(result, v)
    return result


def lower(value: RepValue, t: SurfaceType, registry: AdtRegistry) -> SurfaceValue:
    """Representation value to host value (toElt); reading poison is an error."""
    match t:
        case PrimTy(kind):
            if not isinstance(value, PrimV) or value.kind is not kind:
                raise errors.TypeMismatch(f"expected a {kind.value} value, found {value!r}")
            if value.poisoned:
                raise errors.PoisonRead(f"observed an undefined {kind.value} value")
            return Scalar(kind, value.payload)
        case TupleTy(components):
            paths = product_paths(len(components))
            return TupleV(tuple(
                lower(project_value(value, p), c, registry) for c, p in zip(components, paths)
            ))
        case AdtTy(name):
            info = registry.lookup(name)
            index = 0
            if info.is_sum:
                tag = project_value(value, "L")
                if not isinstance(tag, PrimV) or tag.kind is not PrimType.TAG:
                    raise errors.TypeMismatch(f"{name} value has no TAG: {value!r}")
                if tag.poisoned:
                    raise errors.PoisonRead(f"observed an undefined {name} tag")
                index = int(tag.payload)
                if index >= info.constructor_count:
                    raise errors.BadTag(f"{name} has {info.constructor_count} constructors, tag is {index}")
            fields = []
            for slot in info.slots[index]:
                field_value = project_value(value, slot.path)
                if slot.recursive:
                    if not isinstance(field_value, RollV):
                        raise errors.TypeMismatch(f"{name} recursive field is not rolled: {field_value!r}")
                    if field_value.inner == undef_stub():
                        raise errors.PoisonRead(f"observed an undefined {name} recursive field")
                    field_value = field_value.inner
                fields.append(lower(field_value, slot.surface, registry))
            return Con(name, index, tuple(fields))
    raise errors.TypeMismatch(f"not a surface type: {t!r}")


def pretty_value(value: SurfaceValue, registry: Optional[AdtRegistry] = None) -> str:
    match value:
        case Scalar(_, payload):
            return repr(payload)
        case TupleV(components):
            return "(" + ", ".join(pretty_value(c, registry) for c in components) + ")"
        case Con(adt, index, fields):
            name = f"{adt}#{index}"
            if registry is not None and adt in registry:
                name = registry.lookup(adt).decl.constructors[index].name
            if not fields:
                return name
            return name + " " + " ".join(
                f"({pretty_value(f, registry)})" if isinstance(f, Con) and f.fields else pretty_value(f, registry)
                for f in fields
            )
    return repr(value)
