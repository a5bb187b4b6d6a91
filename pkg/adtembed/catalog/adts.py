"""Built-in ADT declarations, in the JSON schema accepted by ``AdtDecl.from_json``."""

from functools import lru_cache

from adtembed.types import AdtDecl, AdtRegistry

MAYBE_F64 = {
    "name": "MaybeF64",
    "constructors": [
        {"name": "Nothing", "fields": []},
        {"name": "Just", "fields": ["f64"]},
    ],
}

MAYBE_BOOL = {
    "name": "MaybeBool",
    "constructors": [
        {"name": "Nothing", "fields": []},
        {"name": "Just", "fields": [{"adt": "Bool"}]},
    ],
}

EITHER_BOOL_BOOL = {
    "name": "EitherBoolBool",
    "constructors": [
        {"name": "Left", "fields": [{"adt": "Bool"}]},
        {"name": "Right", "fields": [{"adt": "Bool"}]},
    ],
}

POINT = {
    "name": "Point",
    "constructors": [
        {"name": "Point", "fields": ["f64", "f64"]},
    ],
}

LIST_F64 = {
    "name": "ListF64",
    "constructors": [
        {"name": "Nil", "fields": []},
        {"name": "Cons", "fields": ["f64", {"adt": "ListF64"}]},
    ],
}

BUILTIN_ADTS = [MAYBE_F64, MAYBE_BOOL, EITHER_BOOL_BOOL, POINT, LIST_F64]


@lru_cache(maxsize=1)
def builtin_registry() -> AdtRegistry:
    """The prelude plus every built-in declaration."""
    return AdtRegistry().register_all([AdtDecl.from_json(d) for d in BUILTIN_ADTS])
