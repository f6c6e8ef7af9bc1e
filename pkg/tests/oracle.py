"""Reference results computed the slow way.

The oracle recomputes a display grid with plain Python loops over raw member
and fact records: no vectorized masks, no materialized roll-up maps, no code
shared with the engine's aggregation path.  Predicate evaluation and literal
canonicalization are deliberately reimplemented here; engine and oracle must
agree on the same contract, not on the same function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def canon(lit) -> str:
    """Canonical string form of a literal: integral numbers drop the point."""
    if isinstance(lit, bool):
        return str(lit)
    if isinstance(lit, (int, float)):
        f = float(lit)
        return str(int(f)) if f.is_integer() else repr(f)
    return lit


def _as_number(value: str):
    try:
        return float(value)
    except ValueError:
        return None


def matches(op: str, value: str, literal) -> bool:
    if op == "=":
        return value == canon(literal)
    if op == "!=":
        return value != canon(literal)
    if op == "in":
        lits = literal if isinstance(literal, tuple) else (literal,)
        return value in {canon(x) for x in lits}
    v = _as_number(value)
    n = float(literal) if isinstance(literal, (int, float)) else _as_number(literal)
    if v is None or n is None:
        return False
    return {"<": v < n, "<=": v <= n, ">": v > n, ">=": v >= n}[op]


def level_value(member: dict[str, str], level: str) -> str:
    return "All" if level == "all" else member[level]


def member_passes(pred, member: dict[str, str]) -> bool:
    return matches(pred.op, level_value(member, pred.param), pred.literal)


def aggregate(agg: str, kind: str, values: list) -> object:
    if agg == "count":
        return len(values)
    if agg == "distinct_set":
        if kind == "numeric":
            return tuple(canon(v) for v in sorted({float(v) for v in values}))
        return tuple(sorted(set(values)))
    nums = [float(v) for v in values]
    if agg == "sum":
        return float(sum(nums))
    if agg == "min":
        return min(nums)
    if agg == "max":
        return max(nums)
    if agg == "avg":
        return sum(nums) / len(nums)
    raise ValueError(f"unknown aggregation {agg!r}")


@dataclass
class OracleTable:
    col_values: tuple[str, ...]
    row_values: tuple[str, ...]
    cells: dict[tuple[str, str], tuple]  # (row value, col value) -> measure tuple


def raw_fact_rows(store, fact: str) -> list[dict]:
    """Every loaded row of a fact, no restrictions, plain dicts."""
    inst = store.facts[fact]
    linked = store.schema.param_of(fact)
    rows = []
    for i in range(inst.nrows):
        row: dict = {}
        for d in linked:
            row[d] = store.dimensions[d].key[int(inst.refs[d][i])]
        for m, col in inst.numeric.items():
            row[m] = float(col[i])
        for m, col in inst.text.items():
            row[m] = col.value_at(i)
        rows.append(row)
    return rows


def oracle_grid(store, fact: str, restrictions, d1: str, level1: str, d2: str, level2: str) -> OracleTable:
    """Group fact rows by two display levels; one nested loop, no shortcuts.

    `restrictions` is any iterable of objects with dim/param/op/literal
    fields; predicates on dimensions not linked to the fact are ignored.
    """
    schema = store.schema
    linked = schema.param_of(fact)
    preds = [p for p in restrictions if p.dim in linked]
    preds_on: dict[str, list] = {d: [] for d in linked}
    for p in preds:
        preds_on[p.dim].append(p)

    members = {d: store.dimensions[d].member_records() for d in linked}
    key_of = {d: schema.dimension(d).key for d in linked}
    by_key = {d: {m[key_of[d]]: m for m in members[d]} for d in linked}

    def axis_values(d: str, level: str) -> tuple[str, ...]:
        passing = set()
        for m in members[d]:
            if all(member_passes(p, m) for p in preds_on[d]):
                passing.add(level_value(m, level))
        return tuple(v for v in store.orderings[(d, level)] if v in passing)

    col_values = axis_values(d1, level1)
    row_values = axis_values(d2, level2)

    fact_def = schema.fact(fact)
    groups: dict[tuple[str, str], list[dict]] = {}
    for row in raw_fact_rows(store, fact):
        ms = {d: by_key[d][row[d]] for d in linked}
        if not all(member_passes(p, ms[p.dim]) for p in preds):
            continue
        rv = level_value(ms[d2], level2)
        cv = level_value(ms[d1], level1)
        groups.setdefault((rv, cv), []).append(row)

    cells = {
        key: tuple(
            aggregate(m.agg, m.kind, [r[m.name] for r in rows])
            for m in fact_def.measures
        )
        for key, rows in groups.items()
    }
    return OracleTable(col_values, row_values, cells)


def oracle_ntable(ctx) -> OracleTable:
    """The oracle grid for an analysis context's current display state."""
    schema = ctx.schema
    fact = schema.current_fact.fname
    d1, d2 = schema.param_of(fact)[:2]
    return oracle_grid(
        ctx.store, fact, ctx.restrictions,
        d1, ctx.display_levels[d1], d2, ctx.display_levels[d2],
    )


def values_close(a, b, rel: float = 1e-9) -> bool:
    """Measure-value equality: exact for ints/tuples, tolerant for floats."""
    if isinstance(a, float) or isinstance(b, float):
        return math.isclose(float(a), float(b), rel_tol=rel, abs_tol=1e-12)
    return a == b


def tables_equal(a: OracleTable, b: OracleTable, rel: float = 1e-9) -> bool:
    if a.col_values != b.col_values or a.row_values != b.row_values:
        return False
    if set(a.cells) != set(b.cells):
        return False
    for key, left in a.cells.items():
        right = b.cells[key]
        if len(left) != len(right):
            return False
        if not all(values_close(x, y, rel) for x, y in zip(left, right)):
            return False
    return True
