"""The display plane: a 2-D grid of aggregated measure tuples.

The current fact supplies the measures; the first two dimensions of its
linkage list supply the column and row axes at their display levels.  Cells
aggregate every fact row that passes the restrictions, grouped by the axis
values its member references carry; dimensions that are neither displayed
nor restricted are aggregated over.  Groups with no rows stay absent, they
never render as zero.

Grouping is vectorized: axis values are gathered through the dictionary
codes of the member columns, combined into one group id per row, compacted
with ``np.unique``, then reduced per measure with bincount-style kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import restrictions as rst
from .algebra import AnalysisContext
from .errors import EmptyMeasureSet
from .model import ALL_LEVEL, ALL_VALUE, NUMERIC
from .store import InstanceStore


@dataclass(frozen=True)
class Axis:
    dim: str
    hier: str
    level: str
    values: tuple[str, ...]


@dataclass
class NTable:
    fact: str
    measures: tuple[str, ...]
    col: Axis
    row: Axis
    cells: dict[tuple[str, str], tuple]  # (row value, col value) -> measure tuple
    footer: rst.RestrictionSet


def _level_codes(store: InstanceStore, dname: str, level: str, refs: np.ndarray):
    """Per-row axis code and the code-indexed value domain."""
    if level == ALL_LEVEL:
        return np.zeros(len(refs), dtype=np.int64), (ALL_VALUE,)
    col = store.dimensions[dname].attrs[level]
    return col.codes[refs].astype(np.int64), col.values


def _axis_values(store, dname, level, preds) -> tuple[str, ...]:
    """Display-ordered level values of the members passing the dimension's predicates."""
    mask = store.member_mask(dname, tuple(p for p in preds if p.dim == dname))
    if level == ALL_LEVEL:
        return (ALL_VALUE,) if bool(mask.any()) else ()
    col = store.dimensions[dname].attrs[level]
    present = {col.values[c] for c in np.unique(col.codes[mask])}
    return tuple(v for v in store.orderings[(dname, level)] if v in present)


def _distinct_sets(cgid, ngroups, ranked, domain_size, to_value) -> dict[int, tuple]:
    """Sorted distinct values per compact group from (group, rank) pairs."""
    pairs = np.unique(cgid * domain_size + ranked)
    out: dict[int, list] = {}
    for p in pairs:
        out.setdefault(int(p // domain_size), []).append(to_value(int(p % domain_size)))
    return {g: tuple(vs) for g, vs in out.items()}


def build(ctx: AnalysisContext) -> NTable:
    """Aggregate the current fact into its two-axis display grid."""
    schema = ctx.schema
    fact = schema.current_fact
    if not fact.measures:
        raise EmptyMeasureSet(f"fact {fact.fname!r} has no measures to display")
    fname = fact.fname
    linked = schema.param_of(fname)
    d1, d2 = linked[0], linked[1]
    l1, l2 = ctx.display_levels[d1], ctx.display_levels[d2]
    store = ctx.store
    preds = tuple(p for p in ctx.restrictions if p.dim in linked)

    inst = store.facts[fname]
    idx = np.flatnonzero(store.row_mask(fname, preds))
    col_codes, col_domain = _level_codes(store, d1, l1, inst.refs[d1])
    row_codes, row_domain = _level_codes(store, d2, l2, inst.refs[d2])
    ncol = len(col_domain)
    gid = row_codes[idx] * ncol + col_codes[idx]
    uids, cgid = np.unique(gid, return_inverse=True)
    ngroups = len(uids)
    counts = np.bincount(cgid, minlength=ngroups)

    per_measure: list = []
    for m in fact.measures:
        if m.agg == "count":
            per_measure.append(("int", counts))
            continue
        if m.kind == NUMERIC:
            vals = inst.numeric[m.name][idx]
            if m.agg == "sum":
                per_measure.append(("float", np.bincount(cgid, weights=vals, minlength=ngroups)))
            elif m.agg == "avg":
                sums = np.bincount(cgid, weights=vals, minlength=ngroups)
                per_measure.append(("float", sums / np.maximum(counts, 1)))
            elif m.agg == "min":
                acc = np.full(ngroups, np.inf)
                np.minimum.at(acc, cgid, vals)
                per_measure.append(("float", acc))
            elif m.agg == "max":
                acc = np.full(ngroups, -np.inf)
                np.maximum.at(acc, cgid, vals)
                per_measure.append(("float", acc))
            else:  # distinct_set over numbers
                uv, ranked = np.unique(vals, return_inverse=True)
                sets = _distinct_sets(
                    cgid, ngroups, ranked, max(len(uv), 1),
                    lambda r, uv=uv: rst.canonical_literal(float(uv[r])),
                )
                per_measure.append(("set", sets))
        else:  # text measure, distinct_set
            col = inst.text[m.name]
            codes = col.codes[idx].astype(np.int64)
            order = sorted(range(len(col.values)), key=lambda c: col.values[c])
            rank_of = np.empty(len(col.values), dtype=np.int64)
            for r, c in enumerate(order):
                rank_of[c] = r
            sets = _distinct_sets(
                cgid, ngroups, rank_of[codes], max(len(col.values), 1),
                lambda r, col=col, order=order: col.values[order[r]],
            )
            per_measure.append(("set", sets))

    col_values = _axis_values(store, d1, l1, preds)
    row_values = _axis_values(store, d2, l2, preds)
    row_pos = {v: i for i, v in enumerate(row_values)}
    col_pos = {v: i for i, v in enumerate(col_values)}

    placed = sorted(
        range(ngroups),
        key=lambda g: (
            row_pos[row_domain[uids[g] // ncol]],
            col_pos[col_domain[uids[g] % ncol]],
        ),
    )
    cells: dict[tuple[str, str], tuple] = {}
    for g in placed:
        key = (row_domain[uids[g] // ncol], col_domain[uids[g] % ncol])
        values = []
        for tag, data in per_measure:
            if tag == "int":
                values.append(int(data[g]))
            elif tag == "float":
                values.append(float(data[g]))
            else:
                values.append(data.get(g, ()))
        cells[key] = tuple(values)

    dim1 = schema.dimension(d1)
    dim2 = schema.dimension(d2)
    return NTable(
        fact=fname,
        measures=fact.measure_names(),
        col=Axis(d1, dim1.current_hierarchy.hname, l1, col_values),
        row=Axis(d2, dim2.current_hierarchy.hname, l2, row_values),
        cells=cells,
        footer=ctx.restrictions,
    )


# ---- text rendering ------------------------------------------------------


def format_value(v) -> str:
    if isinstance(v, tuple):
        return "{" + ", ".join(v) + "}"
    if isinstance(v, float):
        return rst.canonical_literal(v)
    return str(v)


def format_cell(values: tuple | None) -> str:
    if values is None:
        return ""
    return "(" + ", ".join(format_value(v) for v in values) + ")"


def render_text(nt: NTable) -> str:
    """Fixed-width grid: fact and axis captions, value grid, restriction footer."""
    lines = [
        f"{nt.fact}: {', '.join(nt.measures)}",
        f"columns: {nt.col.dim} / {nt.col.hier} @ {nt.col.level}",
        f"rows: {nt.row.dim} / {nt.row.hier} @ {nt.row.level}",
        "",
    ]
    left = [nt.row.level] + list(nt.row.values)
    columns = [
        [cv] + [format_cell(nt.cells.get((rv, cv))) for rv in nt.row.values]
        for cv in nt.col.values
    ]
    widths = [max(len(s) for s in left)] + [
        max(len(s) for s in col) for col in columns
    ]
    rows = list(zip(left, *columns))
    header, *body = rows
    lines.append(" | ".join(s.ljust(w) for s, w in zip(header, widths)).rstrip())
    lines.append("-+-".join("-" * w for w in widths))
    for r in body:
        lines.append(" | ".join(s.ljust(w) for s, w in zip(r, widths)).rstrip())
    if nt.footer:
        lines.append("")
        lines.extend(rst.render_predicate(p) for p in nt.footer)
    return "\n".join(lines) + "\n"


# ---- interchange ---------------------------------------------------------


def _axis_doc(axis: Axis) -> dict:
    return {
        "dim": axis.dim,
        "hier": axis.hier,
        "level": axis.level,
        "values": list(axis.values),
    }


def _literal_doc(lit):
    return list(lit) if isinstance(lit, tuple) else lit


def _literal_from_doc(lit):
    return tuple(lit) if isinstance(lit, list) else lit


def encode(nt: NTable) -> dict:
    """Loss-free JSON-ready document; decode() inverts it exactly."""
    return {
        "fact": nt.fact,
        "measures": list(nt.measures),
        "colAxis": _axis_doc(nt.col),
        "rowAxis": _axis_doc(nt.row),
        "cells": [
            {
                "row": rv,
                "col": cv,
                "values": [list(v) if isinstance(v, tuple) else v for v in values],
            }
            for (rv, cv), values in nt.cells.items()
        ],
        "footer": [
            {"dim": p.dim, "param": p.param, "op": p.op, "literal": _literal_doc(p.literal)}
            for p in nt.footer
        ],
    }


def decode(doc: dict) -> NTable:
    def axis(d: dict) -> Axis:
        return Axis(d["dim"], d["hier"], d["level"], tuple(d["values"]))

    cells = {
        (c["row"], c["col"]): tuple(
            tuple(v) if isinstance(v, list) else v for v in c["values"]
        )
        for c in doc["cells"]
    }
    footer = tuple(
        rst.Predicate(f["dim"], f["param"], f["op"], _literal_from_doc(f["literal"]))
        for f in doc["footer"]
    )
    return NTable(
        fact=doc["fact"],
        measures=tuple(doc["measures"]),
        col=axis(doc["colAxis"]),
        row=axis(doc["rowAxis"]),
        cells=cells,
        footer=footer,
    )
