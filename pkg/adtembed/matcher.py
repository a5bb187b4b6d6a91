"""
The match combinator.

``match_fn`` turns a host function that inspects its arguments with
``match_con``/``match_tuple`` into one that emits embedded ``CaseE`` terms: the
body is re-run once per trace of each argument, with the argument wrapped in a
``MatchE`` proxy carrying that trace, and the results become the branches.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from adtembed import errors
from adtembed.ast import (
    CaseE,
    Expr,
    Let,
    MatchE,
    Var,
    fresh_name,
    infer_type,
    pretty,
    strip_match,
    structural_eq,
)
from adtembed.config import get_settings
from adtembed.trace import enumerate_traces, pretty_trace
from adtembed.types import AdtRegistry, SurfaceType, pretty_rep, pretty_surface

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmbeddedFn:
    """
    A host function over embedded terms.

    ``body`` takes one Expr per entry of ``arg_types`` and must be pure: the
    match combinator calls it once per combination of argument traces.
    """

    arg_types: tuple[SurfaceType, ...]
    body: Callable[..., Expr]
    result_type: Optional[SurfaceType] = None
    name: str = "fn"

    @property
    def arity(self) -> int:
        return len(self.arg_types)


def match_fn(f: EmbeddedFn, registry: AdtRegistry, *, purity_audit: Optional[bool] = None) -> EmbeddedFn:
    """
    Lift the host-level branching of ``f`` into embedded Case terms.

    Args:
        f: Function whose body inspects its arguments through matchers.
        registry: Registry resolving the argument types.
        purity_audit: Run the body twice per trace combination and require
            structurally equal results (defaults to the ADTEMBED_PURITY_AUDIT setting).

    Returns:
        An EmbeddedFn with the same signature whose body returns a Match-free term.
    """
    audit = get_settings().purity_audit if purity_audit is None else purity_audit

    def matched_body(*args: Expr) -> Expr:
        if len(args) != f.arity:
            raise errors.ArityMismatch(f"{f.name} takes {f.arity} argument(s), given {len(args)}")
        scrutinees, bindings = _bind_arguments(f, args, registry)
        body = _explore(f, scrutinees, [], registry, audit)
        for name, bound in reversed(bindings):
            body = Let(name, bound, body)
        return strip_match(body)

    return EmbeddedFn(f.arg_types, matched_body, f.result_type, f.name)


def _bind_arguments(
    f: EmbeddedFn, args: Sequence[Expr], registry: AdtRegistry
) -> tuple[list[Expr], list[tuple[str, Expr]]]:
    """Bind each computed argument to a fresh variable; every case then scrutinises a Var."""
    scrutinees: list[Expr] = []
    bindings: list[tuple[str, Expr]] = []
    for arg, t in zip(args, f.arg_types):
        if isinstance(arg, (Var, MatchE)):
            scrutinees.append(arg)
            continue
        var = Var(fresh_name(), registry.repr_of(t))
        bindings.append((var.name, arg))
        scrutinees.append(var)
    return scrutinees, bindings


def _explore(
    f: EmbeddedFn,
    pending: Sequence[Expr],
    matched: list[Expr],
    registry: AdtRegistry,
    audit: bool,
) -> Expr:
    if len(matched) == len(pending):
        return _call(f, matched, audit)

    position = len(matched)
    arg = pending[position]
    if isinstance(arg, MatchE):
        # already under a match: its trace is fixed, no new case
        return _explore(f, pending, matched + [arg], registry, audit)

    traces = enumerate_traces(registry.repr_of(f.arg_types[position]), registry)
    if len(traces) == 1:
        logger.debug("%s: argument %d has a single trace, case elided", f.name, position)
        return _explore(f, pending, matched + [MatchE(traces[0], arg)], registry, audit)
    logger.debug("%s: case on argument %d over %d traces", f.name, position, len(traces))
    return CaseE(arg, tuple(
        (trace, _explore(f, pending, matched + [MatchE(trace, arg)], registry, audit))
        for trace in traces
    ))


def _call(f: EmbeddedFn, args: list[Expr], audit: bool) -> Expr:
    result = f.body(*args)
    if audit:
        again = f.body(*args)
        if not structural_eq(result, again):
            traces = ", ".join(pretty_trace(a.trace) for a in args if isinstance(a, MatchE))
            raise errors.PurityViolation(
                f"{f.name} returned different terms for the same arguments ({traces}):\n"
                f"{pretty(result)}\n---\n{pretty(again)}"
            )
    return result


def apply_fn(f: EmbeddedFn, args: Sequence[Expr], registry: AdtRegistry) -> Expr:
    """Saturate ``f`` with argument terms, checking argument and result types."""
    if len(args) != f.arity:
        raise errors.ArityMismatch(f"{f.name} takes {f.arity} argument(s), given {len(args)}")
    for i, (arg, t) in enumerate(zip(args, f.arg_types)):
        expected = registry.repr_of(t)
        found = infer_type(arg, registry)
        if found != expected:
            raise errors.TypeMismatch(
                f"{f.name}: argument {i} has type {pretty_rep(found)}, expected {pretty_surface(t)}"
            )
    result = f.body(*args)
    if f.result_type is not None:
        expected = registry.repr_of(f.result_type)
        found = infer_type(result, registry)
        if found != expected:
            raise errors.TypeMismatch(
                f"{f.name}: result has type {pretty_rep(found)}, expected {pretty_surface(f.result_type)}"
            )
    return result
