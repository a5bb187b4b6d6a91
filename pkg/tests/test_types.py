import json
import random

import pytest

from adtembed import errors
from adtembed.catalog.programs import boolean, just, list_f64, nothing, point
from adtembed.codec import rep_to_json
from adtembed.types import (
    BOOL,
    F64,
    AdtDecl,
    AdtRegistry,
    AdtTy,
    Con,
    Pair,
    PairV,
    Prim,
    PrimType,
    PrimV,
    RecMark,
    RollV,
    Scalar,
    TupleTy,
    TupleV,
    Unit,
    UnitV,
    conforms,
    lift,
    lower,
    make_undef,
    pretty_rep,
    register_adt,
    repr_of,
    undef_stub,
)
from tests.conftest import random_value

TAG = Prim(PrimType.TAG)


def test_point_representation_golden(registry):
    rep = repr_of(AdtTy("Point"), registry)
    assert json.dumps(rep_to_json(rep)) == '["pair", ["pair", ["unit"], ["prim", "f64"]], ["prim", "f64"]]'
    assert pretty_rep(rep) == "(((), f64), f64)"


def test_maybe_bool_representation_golden(registry):
    rep = repr_of(AdtTy("MaybeBool"), registry)
    assert json.dumps(rep_to_json(rep)) == (
        '["pair", ["prim", "tag"], ["pair", ["unit"], ["pair", ["prim", "tag"], ["unit"]]]]'
    )
    assert pretty_rep(rep) == "(TAG, ((), (TAG, ())))"


def test_list_representation_golden(registry):
    rep = repr_of(AdtTy("ListF64"), registry)
    assert rep == Pair(TAG, Pair(Pair(Unit(), Prim(PrimType.F64)), RecMark("ListF64")))
    assert json.dumps(rep_to_json(rep)) == (
        '["pair", ["prim", "tag"], ["pair", ["pair", ["unit"], ["prim", "f64"]], ["rec", "ListF64"]]]'
    )


def test_bool_is_a_prelude_sum(registry):
    info = registry.lookup(BOOL)
    assert [c.name for c in info.decl.constructors] == ["False", "True"]
    assert info.rep == Pair(TAG, Unit())
    assert info.rep.sum_of == BOOL


def test_tuple_representation(registry):
    rep = repr_of(TupleTy((F64, AdtTy(BOOL))), registry)
    assert rep == Pair(Pair(Unit(), Prim(PrimType.F64)), Pair(TAG, Unit()))


def test_register_maybe_indexes_constructors_in_order():
    decl = AdtDecl.from_json({
        "name": "Maybe_F64",
        "constructors": [{"name": "Nothing", "fields": []}, {"name": "Just", "fields": ["f64"]}],
    })
    registry = register_adt(decl, AdtRegistry())
    info = registry.lookup("Maybe_F64")
    assert info.con_index("Nothing") == 0
    assert info.con_index("Just") == 1
    assert [slot.path for slot in info.slots[1]] == ["RR"]


def test_register_list_marks_recursive_field(registry):
    cons = registry.lookup("ListF64").slots[1]
    assert [slot.path for slot in cons] == ["RLR", "RR"]
    assert cons[1].recursive
    assert cons[1].rep == RecMark("ListF64")


def test_register_duplicate_is_rejected(registry):
    with pytest.raises(errors.DuplicateAdt):
        registry.register(registry.lookup("Point").decl)


def test_register_unknown_field_type():
    decl = AdtDecl.from_json({"name": "A", "constructors": [{"name": "A", "fields": [{"adt": "B"}]}]})
    with pytest.raises(errors.UnknownFieldType):
        AdtRegistry().register(decl)


def test_register_all_rejects_mutual_recursion():
    a = AdtDecl.from_json({"name": "A", "constructors": [{"name": "A", "fields": [{"adt": "B"}]}]})
    b = AdtDecl.from_json({
        "name": "B",
        "constructors": [{"name": "Stop", "fields": []}, {"name": "B", "fields": [{"adt": "A"}]}],
    })
    with pytest.raises(errors.MutualRecursionUnsupported):
        AdtRegistry().register_all([a, b])


def test_register_all_orders_dependencies():
    outer = AdtDecl.from_json({"name": "Outer", "constructors": [{"name": "O", "fields": [{"adt": "Inner"}]}]})
    inner = AdtDecl.from_json({"name": "Inner", "constructors": [{"name": "I", "fields": ["i64"]}]})
    registry = AdtRegistry().register_all([outer, inner])
    assert registry.lookup("Outer").rep == Pair(Unit(), Pair(Unit(), Prim(PrimType.I64)))


def test_recursion_inside_a_tuple_field_is_rejected():
    decl = AdtDecl.from_json({
        "name": "T",
        "constructors": [{"name": "Leaf", "fields": []}, {"name": "Node", "fields": [{"tuple": [{"adt": "T"}]}]}],
    })
    with pytest.raises(errors.UnknownFieldType):
        AdtRegistry().register(decl)


@pytest.mark.parametrize("data, location", [
    ({"name": "Empty", "constructors": []}, "$.constructors"),
    ({"name": "X", "constructors": [{"name": "A", "fields": ["f32"]}]}, "$.constructors[0].fields"),
    ({"name": "X", "constructors": [{"name": "A"}, {"name": "A"}]}, "$"),
])
def test_invalid_declarations_are_parse_errors(data, location):
    with pytest.raises(errors.ParseError) as exc:
        AdtDecl.from_json(data)
    assert exc.value.location == location


def test_decl_json_round_trip(registry):
    for decl in registry.decls():
        assert AdtDecl.from_json(decl.model_dump(mode="json")) == decl


def test_unknown_adt(registry):
    with pytest.raises(errors.UnknownAdt):
        repr_of(AdtTy("Nope"), registry)


def test_make_undef_examples():
    assert make_undef(Unit()) == UnitV()
    assert make_undef(Prim(PrimType.F64)) == PrimV(PrimType.F64, 0.0, poisoned=True)
    assert make_undef(Pair(Unit(), TAG)) == PairV(UnitV(), PrimV(PrimType.TAG, 0, poisoned=True))


def _prims(value):
    match value:
        case PrimV():
            yield value
        case PairV(left, right):
            yield from _prims(left)
            yield from _prims(right)
        case RollV(inner):
            yield from _prims(inner)


def test_make_undef_is_total_and_poisoned(registry):
    for name in registry.names():
        rep = registry.lookup(name).rep
        value = make_undef(rep)
        assert conforms(value, rep, registry)
        assert all(p.poisoned and p.payload == 0 for p in _prims(value))


def test_lift_examples(registry):
    assert lift(boolean(True), registry) == PairV(PrimV(PrimType.TAG, 1), UnitV())
    assert lift(nothing("MaybeF64"), registry) == PairV(
        PrimV(PrimType.TAG, 0), PairV(UnitV(), PrimV(PrimType.F64, 0.0, poisoned=True))
    )
    assert lift(point(1.0, 2.0), registry) == PairV(
        PairV(UnitV(), PrimV(PrimType.F64, 1.0)), PrimV(PrimType.F64, 2.0)
    )


def test_lift_wraps_recursive_fields(registry):
    value = lift(list_f64([1.5]), registry)
    tail = value.right.right
    assert isinstance(tail, RollV)
    assert tail.inner.left == PrimV(PrimType.TAG, 0)


def test_lift_rejects_bad_arity_and_unknown_adt(registry):
    with pytest.raises(errors.ArityMismatch):
        lift(Con("MaybeF64", 1, ()), registry)
    with pytest.raises(errors.UnknownAdt):
        lift(Con("Nope", 0, ()), registry)
    with pytest.raises(errors.BadTag):
        lift(Con("MaybeF64", 2, ()), registry)


def test_lower_ignores_fields_of_nullary_constructor(registry):
    value = PairV(PrimV(PrimType.TAG, 0), PairV(UnitV(), PrimV(PrimType.F64, 0.0, poisoned=True)))
    assert lower(value, AdtTy("MaybeF64"), registry) == nothing("MaybeF64")


def test_lower_bad_tag(registry):
    value = PairV(PrimV(PrimType.TAG, 5), PairV(UnitV(), PrimV(PrimType.F64, 0.0)))
    with pytest.raises(errors.BadTag):
        lower(value, AdtTy("MaybeF64"), registry)


def test_lower_poisoned_field_of_selected_constructor(registry):
    value = PairV(PrimV(PrimType.TAG, 1), PairV(UnitV(), PrimV(PrimType.F64, 0.0, poisoned=True)))
    with pytest.raises(errors.PoisonRead):
        lower(value, AdtTy("MaybeF64"), registry)


ROUND_TRIP_TYPES = [
    AdtTy(BOOL), AdtTy("MaybeF64"), AdtTy("MaybeBool"), AdtTy("EitherBoolBool"),
    AdtTy("Point"), AdtTy("ListF64"), TupleTy((AdtTy("Point"), AdtTy("MaybeBool"), F64)),
]


@pytest.mark.parametrize("t", ROUND_TRIP_TYPES, ids=repr)
def test_round_trip_conformance_and_tag_bound(t, registry):
    rng = random.Random(7)
    for _ in range(50):
        v = random_value(rng, t, registry)
        lifted = lift(v, registry)
        assert conforms(lifted, repr_of(t, registry), registry)
        assert lower(lifted, t, registry) == v
        if isinstance(v, Con) and registry.lookup(v.adt).is_sum:
            assert lifted.left.payload < registry.lookup(v.adt).constructor_count


def test_conformance_looks_through_recursion_points(registry):
    list_rep = registry.lookup("ListF64").rep
    assert not conforms(RollV(PairV(UnitV(), UnitV())), RecMark("ListF64"), registry)
    assert conforms(RollV(undef_stub()), RecMark("ListF64"), registry)
    assert conforms(RollV(lift(list_f64([]), registry)), RecMark("ListF64"), registry)

    two = lift(list_f64([1.0, 2.0]), registry)
    assert conforms(two, list_rep, registry)
    # an i64 head in the second cell, behind one recursion point
    inner = two.right.right.inner
    bad_inner = PairV(inner.left, PairV(PairV(UnitV(), PrimV(PrimType.I64, 2)), inner.right.right))
    bad = PairV(two.left, PairV(two.right.left, RollV(bad_inner)))
    assert not conforms(bad, list_rep, registry)


def test_tag_payload_range():
    assert PrimType.TAG.check_payload(2**32 - 1) == 2**32 - 1
    with pytest.raises(errors.BadTag):
        PrimType.TAG.check_payload(2**32)
    with pytest.raises(errors.BadTag):
        PrimType.TAG.check_payload(-1)


def test_just_payload_round_trip(registry):
    v = just("MaybeF64", Scalar(PrimType.F64, 2.0))
    assert lower(lift(v, registry), AdtTy("MaybeF64"), registry) == v
