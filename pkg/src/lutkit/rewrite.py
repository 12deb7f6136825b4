"""Announcement elimination by the reduction axioms AP, AN, AC, AK and AA.

Each axiom is used left to right on the leftmost-outermost announcement
whose body matches.  ``[a] top`` reduces like an atom.  Nothing under a
``U_i`` is touched and ``[a] U_i b`` is never a redex, since no reduction
axiom covers it.
"""
from __future__ import annotations

from typing import Iterator

from .formula import (Ann, And, Atom, Formula, Know, Neg, Top, Unk, implies,
                      is_el, is_pal, measures)

__all__ = ["reduce_once", "reduction_steps", "eliminate_announcements", "apply_axiom",
           "NotReducibleError"]


class NotReducibleError(ValueError):
    pass


def apply_axiom(f: Formula) -> tuple[str, Formula] | None:
    """Rewrite ``f`` at its root; returns (axiom name, result) or None."""
    if not isinstance(f, Ann):
        return None
    ann, body = f.announcement, f.body
    match body:
        case Atom() | Top():
            return "AP", implies(ann, body)
        case Neg(sub):
            return "AN", implies(ann, Neg(Ann(ann, sub)))
        case And(left, right):
            return "AC", And(Ann(ann, left), Ann(ann, right))
        case Know(agent, sub):
            return "AK", implies(ann, Know(agent, Ann(ann, sub)))
        case Ann(inner, sub):
            return "AA", Ann(And(ann, Ann(ann, inner)), sub)
    return None


def _step(f: Formula) -> tuple[str, Formula] | None:
    hit = apply_axiom(f)
    if hit is not None:
        return hit
    match f:
        case Neg(sub):
            hit = _step(sub)
            return hit and (hit[0], Neg(hit[1]))
        case Know(agent, sub):
            hit = _step(sub)
            return hit and (hit[0], Know(agent, hit[1]))
        case And(left, right):
            hit = _step(left)
            if hit:
                return hit[0], And(hit[1], right)
            hit = _step(right)
            return hit and (hit[0], And(left, hit[1]))
        case Ann(ann, body):
            hit = _step(ann)
            if hit:
                return hit[0], Ann(hit[1], body)
            hit = _step(body)
            return hit and (hit[0], Ann(ann, hit[1]))
    return None


def reduce_once(f: Formula) -> Formula | None:
    """One leftmost-outermost reduction step, or None when nothing matches."""
    hit = _step(f)
    return None if hit is None else hit[1]


def reduction_steps(f: Formula) -> Iterator[tuple[str, Formula]]:
    """Yield (axiom, formula) for each step until no redex is left.

    Every step must lower the complexity measure; an AssertionError is
    raised otherwise.
    """
    current = f
    while (hit := _step(current)) is not None:
        name, nxt = hit
        assert measures(nxt) < measures(current), f"{name} step did not decrease complexity"
        yield name, nxt
        current = nxt


def eliminate_announcements(f: Formula) -> Formula:
    """Equivalent epistemic formula of an announcement-logic formula."""
    if not is_pal(f):
        raise NotReducibleError("formula contains U_i; no reduction axiom applies under it")
    result = f
    for _, result in reduction_steps(f):
        pass
    assert is_el(result)
    return result
