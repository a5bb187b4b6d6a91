import itertools

import pytest

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
    map_children,
    reset_fresh_names,
)
from adtembed.catalog.adts import builtin_registry
from adtembed.config import get_settings
from adtembed.trace import enumerate_traces
from adtembed.types import (
    AdtRegistry,
    AdtTy,
    Con,
    Prim,
    PrimTy,
    PrimType,
    Scalar,
    SurfaceType,
    TupleTy,
    TupleV,
    Unit,
)


@pytest.fixture(autouse=True)
def fresh_state():
    reset_fresh_names()
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def registry() -> AdtRegistry:
    return builtin_registry()


def all_values(t: SurfaceType, registry: AdtRegistry) -> list:
    """Every value of a finite (primitive-free, non-recursive) type, in declaration order."""
    match t:
        case AdtTy(name):
            info = registry.lookup(name)
            values = []
            for k, slots in enumerate(info.slots):
                for fields in itertools.product(*(all_values(s.surface, registry) for s in slots)):
                    values.append(Con(name, k, tuple(fields)))
            return values
        case TupleTy(components):
            return [TupleV(tuple(c)) for c in itertools.product(*(all_values(c, registry) for c in components))]
        case PrimTy():
            raise ValueError("primitive types have no finite value list")
    raise ValueError(t)


def random_value(rng, t: SurfaceType, registry: AdtRegistry, depth: int = 0):
    """A random inhabitant of ``t``; lists stop growing past depth 4."""
    match t:
        case AdtTy(name):
            info = registry.lookup(name)
            k = 0 if name == "ListF64" and depth > 4 else rng.randrange(info.constructor_count)
            fields = tuple(random_value(rng, s.surface, registry, depth + 1) for s in info.slots[k])
            return Con(name, k, fields)
        case TupleTy(components):
            return TupleV(tuple(random_value(rng, c, registry, depth + 1) for c in components))
    if t.kind is PrimType.I64:
        return Scalar(PrimType.I64, rng.randint(-2**63, 2**63 - 1))
    return Scalar(PrimType.F64, rng.uniform(-1e6, 1e6))


LET_NAMES = ("a", "b", "c")
PATHS = ("", "L", "R", "LR", "RRL")


def _random_rep(rng, registry: AdtRegistry):
    choices = [Unit(), Prim(PrimType.F64), Prim(PrimType.I64)]
    choices += [registry.lookup(name).rep for name in registry.names()]
    return rng.choice(choices)


def _random_leaf(rng, registry: AdtRegistry, scope: tuple[str, ...]) -> Expr:
    kind = rng.randrange(6)
    if kind == 0:
        return Const(PrimType.F64, rng.choice([0.0, -0.0, 1.5, rng.uniform(-1e3, 1e3)]))
    if kind == 1:
        return Const(PrimType.I64, rng.randint(-2**63, 2**63 - 1))
    if kind == 2:
        return Const(PrimType.TAG, rng.randrange(4))
    if kind == 3:
        return MkUnit()
    if kind == 4:
        return Undef(_random_rep(rng, registry))
    name = rng.choice(scope) if scope and rng.random() < 0.8 else "free"
    return Var(name, Prim(PrimType.F64))


def random_term(rng, registry: AdtRegistry, depth: int = 0, scope: tuple[str, ...] = ()) -> Expr:
    """
    A random, not necessarily well-typed, term over every node kind.

    Let names are drawn from a small pool, so shadowing and bound variables are common.
    """
    if depth >= 4 or rng.random() < 0.25:
        return _random_leaf(rng, registry, scope)

    def sub(inner_scope: tuple[str, ...] = scope) -> Expr:
        return random_term(rng, registry, depth + 1, inner_scope)

    def trace():
        return rng.choice(enumerate_traces(_random_rep(rng, registry), registry))

    match rng.randrange(9):
        case 0:
            return MkPair(sub(), sub())
        case 1:
            return Prj(rng.choice(PATHS), sub())
        case 2:
            return Roll(sub(), "ListF64")
        case 3:
            return Unroll(sub())
        case 4:
            return MatchE(trace(), sub())
        case 5:
            return CaseE(sub(), tuple((trace(), sub()) for _ in range(rng.randint(1, 3))))
        case 6:
            tags = sorted(rng.sample(range(4), rng.randint(0, 3)))
            default = sub() if rng.random() < 0.5 else None
            return Switch(sub(), rng.choice(PATHS), tuple((k, sub()) for k in tags), default)
        case 7:
            op = rng.choice(list(PrimOp))
            return PrimApp(op, (sub(), sub()))
    name = rng.choice(LET_NAMES)
    return Let(name, sub(), sub(scope + (name,)))


def rename_bound(e: Expr, suffix: str) -> Expr:
    """Rename every Let-bound variable (and its uses) by appending ``suffix``."""
    return _rename(e, suffix, {})


def _rename(e: Expr, suffix: str, renames: dict[str, str]) -> Expr:
    match e:
        case Var(name, rep):
            return Var(renames.get(name, name), rep)
        case Let(name, bound, body):
            new_name = f"{name}{suffix}"
            return Let(new_name, _rename(bound, suffix, renames), _rename(body, suffix, {**renames, name: new_name}))
    return map_children(e, lambda child: _rename(child, suffix, renames))
