"""
Example embedded programs.

Each example pairs an embedded body (written against builders and matchers)
with a plain host implementation and a finite input domain, which together
serve as the oracle for evaluation and lowering.
"""

import random
from dataclasses import dataclass
from typing import Callable, Sequence

from adtembed import errors
from adtembed.ast import Const, Expr, PrimApp, PrimOp, Var
from adtembed.interpreter import evaluate_closed
from adtembed.lower import lower_expr
from adtembed.matcher import EmbeddedFn, apply_fn, match_fn
from adtembed.pattern import TRUE, ConRef, build_con, if_then_else, match_con, quote
from adtembed.types import (
    BOOL,
    F64,
    I64,
    AdtRegistry,
    AdtTy,
    Con,
    PrimType,
    Scalar,
    SurfaceType,
    SurfaceValue,
    check_value,
)

MAYBE_F64 = AdtTy("MaybeF64")
MAYBE_BOOL = AdtTy("MaybeBool")
EITHER_BOOL_BOOL = AdtTy("EitherBoolBool")
POINT = AdtTy("Point")
LIST_F64 = AdtTy("ListF64")

NOTHING_F64 = ConRef("MaybeF64", 0)
JUST_F64 = ConRef("MaybeF64", 1)
JUST_BOOL = ConRef("MaybeBool", 1)
LEFT = ConRef("EitherBoolBool", 0)
RIGHT = ConRef("EitherBoolBool", 1)
MK_POINT = ConRef("Point", 0)
CONS = ConRef("ListF64", 1)


# ---------------------------------------------------------------------------
# Host values

def f64(x: float) -> Scalar:
    return Scalar(PrimType.F64, float(x))


def i64(n: int) -> Scalar:
    return Scalar(PrimType.I64, int(n))


def boolean(flag: bool) -> Con:
    return Con(BOOL, int(flag))


def nothing(adt: str) -> Con:
    return Con(adt, 0)


def just(adt: str, value: SurfaceValue) -> Con:
    return Con(adt, 1, (value,))


def point(x: float, y: float) -> Con:
    return Con("Point", 0, (f64(x), f64(y)))


def list_f64(xs: Sequence[float]) -> Con:
    result = Con("ListF64", 0)
    for x in reversed(xs):
        result = Con("ListF64", 1, (f64(x), result))
    return result


def _f64_samples() -> list[float]:
    rng = random.Random(1729)
    fixed = [0.0, -0.0, 1.0, -1.0, 0.5, 2.0, 7.0, -3.25]
    return fixed + [round(rng.uniform(-100.0, 100.0), 3) for _ in range(24)]


F64_SAMPLES = _f64_samples()

BOOLS = [boolean(False), boolean(True)]
MAYBE_BOOLS = [nothing("MaybeBool")] + [just("MaybeBool", b) for b in BOOLS]
EITHER_BOOLS = [Con("EitherBoolBool", side, (b,)) for side in (0, 1) for b in BOOLS]
MAYBE_F64S = [nothing("MaybeF64")] + [just("MaybeF64", f64(x)) for x in F64_SAMPLES]


def _short_lists(max_length: int, elements: Sequence[float]) -> list[Con]:
    shapes: list[list[float]] = [[]]
    frontier: list[list[float]] = [[]]
    for _ in range(max_length):
        frontier = [xs + [x] for xs in frontier for x in elements]
        shapes.extend(frontier)
    return [list_f64(xs) for xs in shapes]


SHORT_LISTS = _short_lists(3, (1.5, -2.0))


# ---------------------------------------------------------------------------
# Embedded bodies

def _safe_div(registry: AdtRegistry) -> Callable[..., Expr]:
    def body(n: Expr, d: Expr) -> Expr:
        return if_then_else(
            PrimApp(PrimOp.EQ, (d, Const(PrimType.F64, 0.0))),
            build_con(NOTHING_F64, [], registry),
            build_con(JUST_F64, [PrimApp(PrimOp.DIV, (n, d))], registry),
            registry,
        )
    return body


def _from_maybe(registry: AdtRegistry) -> Callable[..., Expr]:
    def body(d: Expr, m: Expr) -> Expr:
        fields = match_con(JUST_F64, m, registry)
        return d if fields is None else fields[0]
    return body


def _simple(registry: AdtRegistry) -> Callable[..., Expr]:
    def body(p: Expr) -> Expr:
        fields = match_con(JUST_F64, p, registry)
        return Const(PrimType.F64, 0.0) if fields is None else fields[0]
    return body


def _add_point(registry: AdtRegistry) -> Callable[..., Expr]:
    def body(p: Expr, q: Expr) -> Expr:
        px, py = match_con(MK_POINT, p, registry)
        qx, qy = match_con(MK_POINT, q, registry)
        return build_con(
            MK_POINT,
            [PrimApp(PrimOp.ADD, (px, qx)), PrimApp(PrimOp.ADD, (py, qy))],
            registry,
        )
    return body


def _maybe_bool_code(m: Expr, registry: AdtRegistry) -> int:
    """Nothing -> 0, Just False -> 1, Just True -> 2."""
    fields = match_con(JUST_BOOL, m, registry)
    if fields is None:
        return 0
    return 2 if match_con(TRUE, fields[0], registry) is not None else 1


def _nested_maybe_bool(registry: AdtRegistry) -> Callable[..., Expr]:
    def body(m: Expr) -> Expr:
        return Const(PrimType.I64, _maybe_bool_code(m, registry))
    return body


def _is_just(registry: AdtRegistry) -> Callable[..., Expr]:
    def body(m: Expr) -> Expr:
        return Const(PrimType.I64, 0 if match_con(JUST_BOOL, m, registry) is None else 1)
    return body


def _two_maybe_bools(registry: AdtRegistry) -> Callable[..., Expr]:
    def body(a: Expr, b: Expr) -> Expr:
        return Const(PrimType.I64, 3 * _maybe_bool_code(a, registry) + _maybe_bool_code(b, registry))
    return body


def _either_bool(registry: AdtRegistry) -> Callable[..., Expr]:
    def body(e: Expr) -> Expr:
        for side, con in enumerate((LEFT, RIGHT)):
            fields = match_con(con, e, registry)
            if fields is not None:
                flag = match_con(TRUE, fields[0], registry) is not None
                return Const(PrimType.I64, 2 * side + int(flag))
        raise errors.NoBranchMatched("EitherBoolBool value is neither Left nor Right")
    return body


def _head_or_default(registry: AdtRegistry) -> Callable[..., Expr]:
    def body(d: Expr, xs: Expr) -> Expr:
        fields = match_con(CONS, xs, registry)
        return d if fields is None else fields[0]
    return body


def _second_or_default(registry: AdtRegistry) -> Callable[..., Expr]:
    head_of_tail = EmbeddedFn((F64, LIST_F64), _head_or_default(registry), F64, "second_or_default.tail")

    def body(d: Expr, xs: Expr) -> Expr:
        fields = match_con(CONS, xs, registry)
        if fields is None:
            return d
        # the tail is recursive: inspect it with a case of its own
        return apply_fn(match_fn(head_of_tail, registry), [d, fields[1]], registry)
    return body


def _sign(registry: AdtRegistry) -> Callable[..., Expr]:
    zero = Const(PrimType.F64, 0.0)

    def body(x: Expr) -> Expr:
        return if_then_else(
            PrimApp(PrimOp.LT, (x, zero)),
            Const(PrimType.I64, -1),
            if_then_else(PrimApp(PrimOp.EQ, (x, zero)), Const(PrimType.I64, 0), Const(PrimType.I64, 1), registry),
            registry,
        )
    return body


# ---------------------------------------------------------------------------
# Host references

def _ref_safe_div(n: Scalar, d: Scalar) -> SurfaceValue:
    if d.value == 0.0:
        return nothing("MaybeF64")
    return just("MaybeF64", f64(n.value / d.value))


def _ref_from_maybe(d: Scalar, m: Con) -> SurfaceValue:
    return d if m.index == 0 else m.fields[0]


def _ref_simple(p: Con) -> SurfaceValue:
    return f64(0.0) if p.index == 0 else p.fields[0]


def _ref_add_point(p: Con, q: Con) -> SurfaceValue:
    (px, py), (qx, qy) = p.fields, q.fields
    return point(px.value + qx.value, py.value + qy.value)


def _code(m: Con) -> int:
    return 0 if m.index == 0 else 1 + m.fields[0].index


def _ref_nested_maybe_bool(m: Con) -> SurfaceValue:
    return i64(_code(m))


def _ref_is_just(m: Con) -> SurfaceValue:
    return i64(0 if m.index == 0 else 1)


def _ref_two_maybe_bools(a: Con, b: Con) -> SurfaceValue:
    return i64(3 * _code(a) + _code(b))


def _ref_either_bool(e: Con) -> SurfaceValue:
    return i64(2 * e.index + e.fields[0].index)


def _host_list(xs: Con) -> list[float]:
    values = []
    while xs.index == 1:
        head, xs = xs.fields
        values.append(head.value)
    return values


def _ref_head_or_default(d: Scalar, xs: Con) -> SurfaceValue:
    values = _host_list(xs)
    return f64(values[0]) if values else d


def _ref_second_or_default(d: Scalar, xs: Con) -> SurfaceValue:
    values = _host_list(xs)
    return f64(values[1]) if len(values) >= 2 else d


def _ref_sign(x: Scalar) -> SurfaceValue:
    if x.value < 0.0:
        return i64(-1)
    return i64(0) if x.value == 0.0 else i64(1)


# ---------------------------------------------------------------------------
# Registry of examples

@dataclass(frozen=True)
class ExampleProgram:
    name: str
    description: str
    arg_names: tuple[str, ...]
    arg_types: tuple[SurfaceType, ...]
    result_type: SurfaceType
    builder: Callable[[AdtRegistry], Callable[..., Expr]]
    reference: Callable[..., SurfaceValue]
    domain: Callable[[], list[tuple[SurfaceValue, ...]]]

    def embedded(self, registry: AdtRegistry) -> EmbeddedFn:
        return EmbeddedFn(self.arg_types, self.builder(registry), self.result_type, self.name)

    def matched(self, registry: AdtRegistry) -> EmbeddedFn:
        return match_fn(self.embedded(registry), registry)

    def term(self, registry: AdtRegistry) -> Expr:
        """The matched program applied to variables named after its parameters."""
        args = [Var(name, registry.repr_of(t)) for name, t in zip(self.arg_names, self.arg_types)]
        return apply_fn(self.matched(registry), args, registry)

    def check_arguments(self, values: Sequence[SurfaceValue], registry: AdtRegistry) -> None:
        if len(values) != len(self.arg_types):
            raise errors.ArityMismatch(f"{self.name} takes {len(self.arg_types)} argument(s), given {len(values)}")
        for value, t in zip(values, self.arg_types):
            check_value(value, t, registry)

    def closed_term(self, values: Sequence[SurfaceValue], registry: AdtRegistry) -> Expr:
        """The matched program applied to constant arguments."""
        self.check_arguments(values, registry)
        return apply_fn(self.matched(registry), [quote(v, registry) for v in values], registry)

    def run(self, values: Sequence[SurfaceValue], registry: AdtRegistry, *, lowered: bool = False) -> SurfaceValue:
        term = self.closed_term(values, registry)
        if lowered:
            return evaluate_closed(lower_expr(term, registry), self.result_type, registry, core=True)
        return evaluate_closed(term, self.result_type, registry)


def _pairs(xs: Sequence[float], shift: int) -> list[tuple[float, float]]:
    return list(zip(xs, xs[shift:] + xs[:shift]))


EXAMPLES: dict[str, ExampleProgram] = {
    p.name: p
    for p in [
        ExampleProgram(
            name="safe_div",
            description="Nothing when the divisor is zero, else Just the quotient",
            arg_names=("n", "d"),
            arg_types=(F64, F64),
            result_type=MAYBE_F64,
            builder=_safe_div,
            reference=_ref_safe_div,
            domain=lambda: [(f64(a), f64(b)) for a, b in _pairs(F64_SAMPLES, 3)]
            + [(f64(a), f64(0.0)) for a in F64_SAMPLES[:4]]
            + [(f64(1.0), f64(-0.0))],
        ),
        ExampleProgram(
            name="from_maybe",
            description="The Just payload, or the default for Nothing",
            arg_names=("d", "m"),
            arg_types=(F64, MAYBE_F64),
            result_type=F64,
            builder=_from_maybe,
            reference=_ref_from_maybe,
            domain=lambda: [(f64(d), m) for d in F64_SAMPLES[:4] for m in MAYBE_F64S],
        ),
        ExampleProgram(
            name="simple",
            description="Nothing -> 0, Just x -> x",
            arg_names=("p",),
            arg_types=(MAYBE_F64,),
            result_type=F64,
            builder=_simple,
            reference=_ref_simple,
            domain=lambda: [(m,) for m in MAYBE_F64S],
        ),
        ExampleProgram(
            name="add_point",
            description="Componentwise sum of two points",
            arg_names=("p", "q"),
            arg_types=(POINT, POINT),
            result_type=POINT,
            builder=_add_point,
            reference=_ref_add_point,
            domain=lambda: [
                (point(a, b), point(c, d))
                for (a, b), (c, d) in zip(_pairs(F64_SAMPLES, 1), _pairs(F64_SAMPLES, 5))
            ],
        ),
        ExampleProgram(
            name="nested_maybe_bool",
            description="Nothing -> 0, Just False -> 1, Just True -> 2",
            arg_names=("m",),
            arg_types=(MAYBE_BOOL,),
            result_type=I64,
            builder=_nested_maybe_bool,
            reference=_ref_nested_maybe_bool,
            domain=lambda: [(m,) for m in MAYBE_BOOLS],
        ),
        ExampleProgram(
            name="is_just",
            description="Nothing -> 0, Just _ -> 1 (both Just branches are equal)",
            arg_names=("m",),
            arg_types=(MAYBE_BOOL,),
            result_type=I64,
            builder=_is_just,
            reference=_ref_is_just,
            domain=lambda: [(m,) for m in MAYBE_BOOLS],
        ),
        ExampleProgram(
            name="two_maybe_bools",
            description="3 * code(a) + code(b) over two MaybeBool arguments",
            arg_names=("a", "b"),
            arg_types=(MAYBE_BOOL, MAYBE_BOOL),
            result_type=I64,
            builder=_two_maybe_bools,
            reference=_ref_two_maybe_bools,
            domain=lambda: [(a, b) for a in MAYBE_BOOLS for b in MAYBE_BOOLS],
        ),
        ExampleProgram(
            name="either_bool",
            description="Left False -> 0, Left True -> 1, Right False -> 2, Right True -> 3",
            arg_names=("e",),
            arg_types=(EITHER_BOOL_BOOL,),
            result_type=I64,
            builder=_either_bool,
            reference=_ref_either_bool,
            domain=lambda: [(e,) for e in EITHER_BOOLS],
        ),
        ExampleProgram(
            name="head_or_default",
            description="The first element of a list, or the default",
            arg_names=("d", "xs"),
            arg_types=(F64, LIST_F64),
            result_type=F64,
            builder=_head_or_default,
            reference=_ref_head_or_default,
            domain=lambda: [(f64(d), xs) for d in (0.0, 9.5) for xs in SHORT_LISTS],
        ),
        ExampleProgram(
            name="second_or_default",
            description="The second element of a list (separate case on the tail), or the default",
            arg_names=("d", "xs"),
            arg_types=(F64, LIST_F64),
            result_type=F64,
            builder=_second_or_default,
            reference=_ref_second_or_default,
            domain=lambda: [(f64(d), xs) for d in (0.0, 9.5) for xs in SHORT_LISTS],
        ),
        ExampleProgram(
            name="sign",
            description="-1, 0 or 1 by comparison with zero",
            arg_names=("x",),
            arg_types=(F64,),
            result_type=I64,
            builder=_sign,
            reference=_ref_sign,
            domain=lambda: [(f64(x),) for x in F64_SAMPLES],
        ),
    ]
}


def get_example(name: str) -> ExampleProgram:
    try:
        return EXAMPLES[name]
    except KeyError:
        raise errors.UnknownExample(f"no example named {name!r}; try one of {sorted(EXAMPLES)}") from None
