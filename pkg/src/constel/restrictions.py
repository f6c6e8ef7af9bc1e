"""Conjunctive restriction predicates applied to dimension members.

A restriction set is a conjunction of per-parameter predicates.  Member
values are stored as strings; numeric literals compare against the canonical
string form for equality and numerically for ordered comparators.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ALL_LEVEL, ALL_VALUE

Literal = str | int | float
COMPARATORS = ("=", "!=", "<", "<=", ">", ">=", "in")
ORDERED = ("<", "<=", ">", ">=")

_ASCII_OPS = {"≠": "!=", "≤": "<=", "≥": ">="}


def canonical_op(op: str) -> str:
    return _ASCII_OPS.get(op, op)


def canonical_literal(lit: Literal) -> str:
    """String form used to match stored values: integral numbers drop the point."""
    if isinstance(lit, bool):  # bool is an int subclass; reject silently as text
        return str(lit)
    if isinstance(lit, (int, float)):
        f = float(lit)
        if f.is_integer():
            return str(int(f))
        return repr(f)
    return lit


def _as_number(value: str) -> float | None:
    try:
        return float(value)
    except ValueError:
        return None


@dataclass(frozen=True)
class Predicate:
    dim: str
    param: str
    op: str  # one of COMPARATORS
    literal: Literal | tuple[Literal, ...]  # tuple only for `in`

    def matches(self, value: str) -> bool:
        op = self.op
        if op == "=":
            return value == canonical_literal(self.literal)
        if op == "!=":
            return value != canonical_literal(self.literal)
        if op == "in":
            lits = self.literal if isinstance(self.literal, tuple) else (self.literal,)
            return value in {canonical_literal(x) for x in lits}
        v = _as_number(value)
        lit = self.literal
        n = float(lit) if isinstance(lit, (int, float)) else _as_number(lit)
        if v is None or n is None:
            return False
        if op == "<":
            return v < n
        if op == "<=":
            return v <= n
        if op == ">":
            return v > n
        if op == ">=":
            return v >= n
        raise ValueError(f"unknown comparator {op!r}")


RestrictionSet = tuple[Predicate, ...]

EMPTY: RestrictionSet = ()


def normalize(predicates: RestrictionSet) -> RestrictionSet:
    """Dedupe; collapse conflicting equalities on one parameter to an empty `in`.

    Keeps conjunction semantics while guaranteeing at most one equality per
    (dimension, parameter).
    """
    out: list[Predicate] = []
    eq_at: dict[tuple[str, str], int] = {}
    for p in predicates:
        if p in out:
            continue
        if p.op == "=":
            slot = eq_at.get((p.dim, p.param))
            if slot is None:
                eq_at[(p.dim, p.param)] = len(out)
                out.append(p)
            elif out[slot].literal != p.literal:
                # contradictory conjunction: satisfiable by no value
                out[slot] = Predicate(p.dim, p.param, "in", ())
                eq_at.pop((p.dim, p.param))
            continue
        out.append(p)
    return tuple(out)


def for_dimension(restrictions: RestrictionSet, dname: str) -> tuple[Predicate, ...]:
    return tuple(p for p in restrictions if p.dim == dname)


def restricted_dimensions(restrictions: RestrictionSet) -> set[str]:
    return {p.dim for p in restrictions}


def member_passes(pred: Predicate, member: dict[str, str]) -> bool:
    value = ALL_VALUE if pred.param == ALL_LEVEL else member[pred.param]
    return pred.matches(value)


def render_literal(lit: Literal | tuple[Literal, ...]) -> str:
    """Footer/MDQL form: strings quoted, numbers bare, lists parenthesised."""
    if isinstance(lit, tuple):
        return "(" + ", ".join(render_literal(x) for x in lit) + ")"
    if isinstance(lit, str):
        escaped = lit.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    return canonical_literal(lit)


def render_predicate(pred: Predicate) -> str:
    op = pred.op
    if op == "in":
        return f"{pred.dim}.{pred.param} in {render_literal(pred.literal)}"
    return f"{pred.dim}.{pred.param}{op}{render_literal(pred.literal)}"
