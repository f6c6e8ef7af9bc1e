"""Relational rendering of the analysis state over a star encoding.

One table per dimension (key column primary, one column per attribute),
one table per fact (one foreign-key column per linked dimension plus the
measures).  Identifiers are mangled to lowercase with every run of
non-alphanumerics replaced by underscores, and always double-quoted.
The emitted text sticks to a portable SQL-92 subset: explicit joins,
CAST for numeric comparison on text columns, and CASE ranking so the
result order follows the stored display orderings.
"""

from __future__ import annotations

import re

from . import restrictions as rst
from .algebra import AnalysisContext
from .errors import EmptyMeasureSet
from .model import ALL_LEVEL, ALL_VALUE, ConstellationSchema, Dimension, NUMERIC

_MANGLE = re.compile(r"[^a-z0-9]+")


def mangle(name: str) -> str:
    return _MANGLE.sub("_", name.lower())


def _q(name: str) -> str:
    return f'"{mangle(name)}"'


def _col(table: str, column: str) -> str:
    return f"{_q(table)}.{_q(column)}"


def _string(value: str) -> str:
    return "'" + value.replace("'", "''") + "'"


def _number(lit) -> str:
    return str(lit) if isinstance(lit, int) else repr(float(lit))


def fk_column(dname: str) -> str:
    return mangle(f"{dname}_id")


def attribute_columns(dim: Dimension) -> tuple[str, ...]:
    """Column order: key, then hierarchy walks, then leftovers sorted."""
    cols = [dim.key]
    for h in dim.hierarchies:
        for p in h.params:
            if p != ALL_LEVEL and p not in cols:
                cols.append(p)
    for name in sorted(dim.attributes):
        if name != ALL_LEVEL and name not in cols:
            cols.append(name)
    return tuple(cols)


def emit_ddl(schema: ConstellationSchema) -> str:
    """CREATE TABLE statements for every dimension, then every fact."""
    statements = []
    for dim in schema.dims:
        lines = []
        for name in attribute_columns(dim):
            constraint = " PRIMARY KEY" if name == dim.key else ""
            lines.append(f"  {_q(name)} VARCHAR(255) NOT NULL{constraint}")
        body = ",\n".join(lines)
        statements.append(f"CREATE TABLE {_q(dim.dname)} (\n{body}\n);")
    for fact in schema.facts:
        lines = []
        for dname in schema.param_of(fact.fname):
            key = schema.dimension(dname).key
            lines.append(
                f'  "{fk_column(dname)}" VARCHAR(255) NOT NULL'
                f" REFERENCES {_q(dname)} ({_q(key)})"
            )
        for m in fact.measures:
            kind = "NUMERIC" if m.kind == NUMERIC else "VARCHAR(255)"
            lines.append(f"  {_q(m.name)} {kind} NOT NULL")
        body = ",\n".join(lines)
        statements.append(f"CREATE TABLE {_q(fact.fname)} (\n{body}\n);")
    return "\n\n".join(statements) + "\n"


def _predicate_sql(p: rst.Predicate) -> str | None:
    """One WHERE conjunct; None when the predicate cannot exclude anything."""
    if p.param == ALL_LEVEL:
        return None if p.matches(ALL_VALUE) else "1 = 0"
    col = _col(p.dim, p.param)
    if p.op == "in":
        lits = p.literal if isinstance(p.literal, tuple) else (p.literal,)
        body = ", ".join(_string(rst.canonical_literal(x)) for x in lits)
        return f"{col} IN ({body})"
    if p.op in rst.ORDERED:
        return f"CAST({col} AS NUMERIC) {p.op} {_number(p.literal)}"
    op = "<>" if p.op == "!=" else "="
    return f"{col} {op} {_string(rst.canonical_literal(p.literal))}"


_AGG_SQL = {"sum": "SUM", "min": "MIN", "max": "MAX", "avg": "AVG"}


def _rank_case(dim: str, level: str, ordering: tuple[str, ...]) -> str:
    whens = " ".join(f"WHEN {_string(v)} THEN {i}" for i, v in enumerate(ordering))
    return f"CASE {_col(dim, level)} {whens} ELSE {len(ordering)} END"


def emit_query(ctx: AnalysisContext) -> str:
    """One SELECT reproducing the current n-table's cells, in grid order."""
    schema = ctx.schema
    fact = schema.current_fact
    if not fact.measures:
        raise EmptyMeasureSet(f"fact {fact.fname!r} has no measures to display")
    fname = fact.fname
    linked = schema.param_of(fname)
    axes = [(d, ctx.display_levels[d]) for d in linked[:2]]
    preds = [p for p in ctx.restrictions if p.dim in linked]

    select: list[tuple[str, str]] = []  # (expression, trailing comment)
    group = []
    for dim, level in axes:
        if level != ALL_LEVEL:
            select.append((_col(dim, level), ""))
            group.append(_col(dim, level))
    for m in fact.measures:
        col = _col(fname, m.name)
        if m.agg == "count":
            expr = f"COUNT(*) AS {_q(m.name)}"
            comment = ""
        elif m.agg == "distinct_set":
            expr = f"COUNT(DISTINCT {col}) AS {_q(m.name)}"
            comment = "  -- distinct count; the n-table shows the member set"
        else:
            expr = f"{_AGG_SQL[m.agg]}({col}) AS {_q(m.name)}"
            comment = ""
        select.append((expr, comment))

    joined = []
    for dname in linked:
        on_axis = any(d == dname and level != ALL_LEVEL for d, level in axes)
        restricted = any(p.dim == dname and p.param != ALL_LEVEL for p in preds)
        if on_axis or restricted:
            joined.append(dname)

    lines = ["SELECT"]
    for i, (expr, comment) in enumerate(select):
        comma = "," if i < len(select) - 1 else ""
        lines.append(f"  {expr}{comma}{comment}")
    lines.append(f"FROM {_q(fname)}")
    for dname in joined:
        key = schema.dimension(dname).key
        lines.append(
            f'JOIN {_q(dname)} ON {_q(fname)}."{fk_column(dname)}"'
            f" = {_col(dname, key)}"
        )
    conjuncts = [c for c in (_predicate_sql(p) for p in preds) if c is not None]
    for i, cond in enumerate(conjuncts):
        lines.append(f"{'WHERE' if i == 0 else '  AND'} {cond}")
    if group:
        lines.append("GROUP BY " + ", ".join(group))
        lines.append("ORDER BY")
        ranks = [
            _rank_case(dim, level, ctx.store.parameter_domain(dim, level))
            for dim, level in axes
            if level != ALL_LEVEL
        ]
        for i, rank in enumerate(ranks):
            comma = "," if i < len(ranks) - 1 else ""
            lines.append(f"  {rank}{comma}")
    else:
        # a scalar aggregate still yields one row over zero input rows;
        # the grid has no cell then, so suppress it
        lines.append("HAVING COUNT(*) > 0")
    lines[-1] = lines[-1] + ";"
    return "\n".join(lines) + "\n"
