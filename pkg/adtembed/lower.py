"""
Case lowering.

Rewrites each trace-based ``CaseE`` into nested ``Switch`` nodes on literal
tags: branches are grouped by the tag at the leftmost tag position of their
traces, each group is lowered again on its residual traces, and structurally
equal arms are folded into a default.
"""

from __future__ import annotations

import logging
from collections import Counter
from typing import Optional

from adtembed import errors
from adtembed.ast import (
    CaseE,
    Expr,
    Let,
    Switch,
    Var,
    assert_no_match,
    fresh_name,
    infer_type,
    map_children,
    structural_eq,
)
from adtembed.config import get_settings
from adtembed.trace import Tag, Trace, enumerate_traces, erase_tag, leftmost_tag, subtrace
from adtembed.types import AdtRegistry, fully_annotated

logger = logging.getLogger(__name__)

Row = tuple[Trace, Expr]


def lower_expr(e: Expr, registry: AdtRegistry, *, dedup: Optional[bool] = None) -> Expr:
    """
    Lower every CaseE of ``e`` into Switch nodes.

    Args:
        e: A Match-free source term.
        registry: Registry used to check that each Case enumerates its scrutinee type.
        dedup: Fold structurally equal arms into a default (defaults to the
            ADTEMBED_DEDUP_DEFAULTS setting).

    Returns:
        A core term: no CaseE or MatchE nodes remain.
    """
    assert_no_match(e)
    dedup = get_settings().dedup_defaults if dedup is None else dedup
    return _lower(e, registry, dedup)


def _lower(e: Expr, registry: AdtRegistry, dedup: bool) -> Expr:
    if isinstance(e, CaseE):
        return _lower_case(e, registry, dedup)
    return map_children(e, lambda child: _lower(child, registry, dedup))


def _lower_case(case: CaseE, registry: AdtRegistry, dedup: bool) -> Expr:
    if not case.branches:
        raise errors.MalformedTraces("case without branches")
    rep = infer_type(case.scrutinee, registry)
    if fully_annotated(rep):
        expected = Counter(enumerate_traces(rep, registry))
        if Counter(trace for trace, _ in case.branches) != expected:
            raise errors.MalformedTraces(
                f"{len(case.branches)} branch trace(s) are not the enumeration of the scrutinee type "
                f"({sum(expected.values())} trace(s))"
            )

    rows = [(trace, _lower(rhs, registry, dedup)) for trace, rhs in case.branches]
    scrutinee = _lower(case.scrutinee, registry, dedup)
    if isinstance(scrutinee, Var):
        return _switch(scrutinee, rows, dedup, outermost=True)
    var = Var(fresh_name(), rep)
    return Let(var.name, scrutinee, _switch(var, rows, dedup, outermost=True))


def _tag_at(trace: Trace, path: str) -> Optional[int]:
    try:
        node = subtrace(trace, path)
    except errors.BadProjection:
        return None
    return node.tag if isinstance(node, Tag) else None


def _switch(scrutinee: Var, rows: list[Row], dedup: bool, outermost: bool = False) -> Expr:
    if not rows:
        raise errors.MalformedTraces("no branch covers this combination of tags")
    path = leftmost_tag(rows[0][0])
    if path is None:
        # tag-free trace: matches everything, first match wins
        return rows[0][1]

    tagged = [(_tag_at(trace, path), trace, rhs) for trace, rhs in rows]
    tags = sorted({tag for tag, _, _ in tagged if tag is not None})
    wildcards = [(trace, rhs) for tag, trace, rhs in tagged if tag is None]

    arms: list[tuple[int, Expr]] = []
    for k in tags:
        group = [
            (erase_tag(trace, path)[1], rhs) if tag == k else (trace, rhs)
            for tag, trace, rhs in tagged
            if tag == k or tag is None
        ]
        arms.append((k, _switch(scrutinee, group, dedup)))
    default = _switch(scrutinee, wildcards, dedup) if wildcards else None

    if dedup:
        arms, default = _fold_default(arms, default)
    if not arms and default is not None and not outermost:
        logger.debug("switch at %s.%sL collapsed into its default", scrutinee.name, path)
        return default
    logger.debug("switch at %s.%sL with %d arm(s)%s", scrutinee.name, path, len(arms),
                 " and a default" if default is not None else "")
    # the switch reads the TAG itself: the left component of the tagged pair
    return Switch(scrutinee, path + "L", tuple(arms), default)


def _fold_default(
    arms: list[tuple[int, Expr]], default: Optional[Expr]
) -> tuple[list[tuple[int, Expr]], Optional[Expr]]:
    if default is not None:
        return [(k, body) for k, body in arms if not structural_eq(body, default)], default

    classes: list[list[tuple[int, Expr]]] = []
    for k, body in arms:
        for members in classes:
            if structural_eq(members[0][1], body):
                members.append((k, body))
                break
        else:
            classes.append([(k, body)])
    # classes are ordered by their smallest tag, so max() keeps the first on ties
    largest = max(classes, key=len, default=[])
    if len(largest) < 2:
        return arms, None
    folded = {k for k, _ in largest}
    return [(k, body) for k, body in arms if k not in folded], largest[0][1]
