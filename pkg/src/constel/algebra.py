"""Query algebra over immutable analysis contexts.

Every operator takes a context and returns a new one; inputs are never
mutated and a rejected operation raises before anything is built.  Rotations
reorder the schema's fact, dimension, or hierarchy lists ("current" is
positional).  Drill/roll move a per-dimension display level along the current
hierarchy, inserting foreign attributes next to it once the instance data
proves the functional dependencies that keep the hierarchy strict.  Push and
pull convert between attributes and measures, deriving a new store that
shares every untouched table with its parent.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace

import numpy as np

from . import restrictions as rst
from .errors import (
    CannotPushAll,
    CannotPushKey,
    FunctionalDependencyViolated,
    MeasureConflict,
    NotCoarser,
    NotFiner,
    NotInCurrentHierarchy,
    NotLinked,
    NotStarSchema,
    SameDimension,
    SameFact,
    SameHierarchy,
    SchemaMismatch,
    TypeMismatch,
    UnknownDimension,
    UnknownFact,
    UnknownHierarchy,
    UnknownMeasure,
    UnknownParameter,
    UnknownValue,
)
from .model import (
    ALL_LEVEL,
    NUMERIC,
    ConstellationSchema,
    Dimension,
    Fact,
    Hierarchy,
    MeasureDef,
    default_aggregation,
    default_display_level,
)
from .store import (
    AttrColumn,
    DimensionInstance,
    FactInstance,
    InstanceStore,
    TextColumn,
)

PULL_EMPTY = "∅"  # value given to members no fact row refers to


@dataclass(frozen=True)
class AnalysisContext:
    """One analysis state: schema, display levels, restrictions, data.

    ``store.schema`` is always the same object as ``schema``; operators that
    reshape the schema derive a store alongside it.
    """

    schema: ConstellationSchema
    display_levels: dict[str, str]  # dimension name -> displayed parameter
    restrictions: rst.RestrictionSet
    store: InstanceStore

    def equals(self, other: "AnalysisContext") -> bool:
        return (
            self.schema == other.schema
            and self.display_levels == other.display_levels
            and self.restrictions == other.restrictions
            and self.store.equals(other.store)
        )


def initial_context(schema: ConstellationSchema, store: InstanceStore) -> AnalysisContext:
    levels = {d.dname: default_display_level(d) for d in schema.dims}
    return AnalysisContext(schema, levels, rst.EMPTY, store)


def _with_schema(ctx: AnalysisContext, schema: ConstellationSchema, **changes) -> AnalysisContext:
    store = changes.pop("store", None)
    if store is None:
        store = ctx.store.derive(schema=schema)
    return replace(ctx, schema=schema, store=store, **changes)


def _swap(items: tuple, a, b) -> tuple:
    out = list(items)
    i, j = out.index(a), out.index(b)
    out[i], out[j] = out[j], out[i]
    return tuple(out)


def _need_fact(schema: ConstellationSchema, name: str) -> Fact:
    fact = schema.fact(name)
    if fact is None:
        raise UnknownFact(f"unknown fact {name!r}")
    return fact


def _need_dimension(schema: ConstellationSchema, name: str) -> Dimension:
    dim = schema.dimension(name)
    if dim is None:
        raise UnknownDimension(f"unknown dimension {name!r}")
    return dim


# ---- rotations -----------------------------------------------------------


def d_rotate(ctx: AnalysisContext, fact: str, d_a: str, d_b: str) -> AnalysisContext:
    """Swap two dimensions in one fact's linkage list; other facts keep theirs."""
    _need_fact(ctx.schema, fact)
    if d_a == d_b:
        raise SameDimension(f"cannot rotate {d_a!r} with itself")
    linked = ctx.schema.param_of(fact)
    for d in (d_a, d_b):
        if d not in linked:
            raise NotLinked(f"dimension {d!r} is not linked to fact {fact!r}")
    param = dict(ctx.schema.param)
    param[fact] = _swap(linked, d_a, d_b)
    schema = ConstellationSchema(ctx.schema.sname, ctx.schema.facts, ctx.schema.dims, param)
    return _with_schema(ctx, schema)


def h_rotate(ctx: AnalysisContext, dim: str, h_a: str, h_b: str) -> AnalysisContext:
    """Swap two hierarchies of a dimension; display level resets if stranded."""
    d = _need_dimension(ctx.schema, dim)
    if h_a == h_b:
        raise SameHierarchy(f"cannot rotate {h_a!r} with itself")
    for h in (h_a, h_b):
        if d.hierarchy(h) is None:
            raise UnknownHierarchy(f"dimension {dim!r} has no hierarchy {h!r}")
    hierarchies = _swap(d.hierarchies, d.hierarchy(h_a), d.hierarchy(h_b))
    new_dim = replace(d, hierarchies=hierarchies)
    schema = ctx.schema.replace_dimension(new_dim)
    levels = dict(ctx.display_levels)
    if levels[dim] not in new_dim.current_hierarchy.params:
        levels[dim] = default_display_level(new_dim)
    return _with_schema(ctx, schema, display_levels=levels)


def f_rotate(ctx: AnalysisContext, f_a: str, f_b: str) -> AnalysisContext:
    """Swap two facts; the new first fact becomes the displayed plane."""
    if f_a == f_b:
        raise SameFact(f"cannot rotate {f_a!r} with itself")
    fa, fb = _need_fact(ctx.schema, f_a), _need_fact(ctx.schema, f_b)
    schema = ConstellationSchema(
        ctx.schema.sname, _swap(ctx.schema.facts, fa, fb), ctx.schema.dims, ctx.schema.param
    )
    return _with_schema(ctx, schema)


def switch(ctx: AnalysisContext, dim: str, p: str, v1: str, v2: str) -> AnalysisContext:
    """Swap two values in the display ordering of a current-hierarchy parameter."""
    d = _need_dimension(ctx.schema, dim)
    if p not in d.current_hierarchy.params:
        raise NotInCurrentHierarchy(
            f"{p!r} is not in the current hierarchy of {dim!r}"
        )
    ordering = ctx.store.parameter_domain(dim, p)
    for v in (v1, v2):
        if v not in ordering:
            raise UnknownValue(f"{v!r} is not a value of {dim}.{p}")
    orderings = dict(ctx.store.orderings)
    orderings[(dim, p)] = _swap(ordering, v1, v2)
    return replace(ctx, store=ctx.store.derive(orderings=orderings))


# ---- drill / roll --------------------------------------------------------


def _fd_holds(inst: DimensionInstance, lower: str, upper: str) -> bool:
    # lower -> upper is functional iff no lower value has two upper values
    seen: dict[str, str] = {}
    for i in range(inst.size):
        v = inst.value_of(lower, i)
        w = inst.value_of(upper, i)
        if seen.setdefault(v, w) != w:
            return False
    return True


def _insert_level(
    ctx: AnalysisContext, dim: str, p: str, position: int, checks: list[tuple[str, str]]
) -> ConstellationSchema:
    """Insert p into the current hierarchy once every (lower, upper) FD holds."""
    d = ctx.schema.dimension(dim)
    assert d is not None
    inst = ctx.store.dimensions[dim]
    for lower, upper in checks:
        if upper == ALL_LEVEL or lower == upper:
            continue
        if not _fd_holds(inst, lower, upper):
            raise FunctionalDependencyViolated(
                f"{dim}.{lower} does not determine {dim}.{upper} in the loaded data"
            )
    h = d.current_hierarchy
    params = h.params[:position] + (p,) + h.params[position:]
    new_dim = replace(
        d, hierarchies=(Hierarchy(h.hname, params),) + d.hierarchies[1:]
    )
    return ctx.schema.replace_dimension(new_dim)


def drill_down(ctx: AnalysisContext, dim: str, p: str) -> AnalysisContext:
    """Move a dimension's display level to a strictly finer parameter."""
    d = _need_dimension(ctx.schema, dim)
    if p not in d.attributes:
        raise UnknownParameter(f"{p!r} is not an attribute of {dim!r}")
    level = ctx.display_levels[dim]
    params = d.current_hierarchy.params
    levels = dict(ctx.display_levels)
    levels[dim] = p
    if p in params:
        if params.index(p) >= params.index(level):
            raise NotFiner(f"{p!r} is not finer than {level!r} in the current hierarchy")
        return replace(ctx, display_levels=levels)
    if level == d.key:
        raise NotFiner(f"{level!r} is the finest parameter of {dim!r}")
    at = params.index(level)
    schema = _insert_level(ctx, dim, p, at, [(p, level)])
    return _with_schema(
        ctx, schema, display_levels=levels,
        store=ctx.store.derive(schema=schema, rebuild_rollups=True),
    )


def roll_up(ctx: AnalysisContext, dim: str, p: str) -> AnalysisContext:
    """Move a dimension's display level to a strictly coarser parameter."""
    d = _need_dimension(ctx.schema, dim)
    if p not in d.attributes:
        raise UnknownParameter(f"{p!r} is not an attribute of {dim!r}")
    level = ctx.display_levels[dim]
    params = d.current_hierarchy.params
    levels = dict(ctx.display_levels)
    levels[dim] = p
    if p in params:
        if params.index(p) <= params.index(level):
            raise NotCoarser(f"{p!r} is not coarser than {level!r} in the current hierarchy")
        return replace(ctx, display_levels=levels)
    at = params.index(level) + 1
    schema = _insert_level(ctx, dim, p, at, [(level, p)])
    return _with_schema(
        ctx, schema, display_levels=levels,
        store=ctx.store.derive(schema=schema, rebuild_rollups=True),
    )


# ---- push / pull ---------------------------------------------------------


def push(ctx: AnalysisContext, dim: str, p: str, fact: str) -> AnalysisContext:
    """Convert a dimension parameter into a measure of a linked fact."""
    d = _need_dimension(ctx.schema, dim)
    f = _need_fact(ctx.schema, fact)
    if dim not in ctx.schema.param_of(fact):
        raise NotLinked(f"dimension {dim!r} is not linked to fact {fact!r}")
    if p not in d.attributes:
        raise UnknownParameter(f"{p!r} is not an attribute of {dim!r}")
    if p == d.key:
        raise CannotPushKey(f"cannot push the key parameter {p!r}")
    if p == ALL_LEVEL:
        raise CannotPushAll(f"cannot push the distinguished level {ALL_LEVEL!r}")
    if f.measure(p) is not None:
        raise MeasureConflict(f"fact {fact!r} already has a measure named {p!r}")

    inst = ctx.store.dimensions[dim]
    member_values = [inst.value_of(p, i) for i in range(inst.size)]

    def numeric_or_none(values: list[str]) -> list[float] | None:
        out = []
        for v in values:
            try:
                out.append(float(v))
            except ValueError:
                return None
        return out

    as_numbers = numeric_or_none(member_values)
    kind = NUMERIC if as_numbers is not None else "text"
    measure = MeasureDef(p, kind=kind, agg=default_aggregation(kind))

    hierarchies = tuple(
        Hierarchy(h.hname, tuple(q for q in h.params if q != p)) for h in d.hierarchies
    )
    new_dim = replace(d, attributes=d.attributes - {p}, hierarchies=hierarchies)
    new_fact = replace(f, measures=f.measures + (measure,))
    schema = ctx.schema.replace_dimension(new_dim).replace_fact(new_fact)

    new_dinst = DimensionInstance(
        dim, d.key, {a: c for a, c in inst.attrs.items() if a != p}
    )
    finst = ctx.store.facts[fact]
    refs = finst.refs[dim]
    if as_numbers is not None:
        col = np.asarray(as_numbers, dtype=np.float64)[refs]
        new_finst = FactInstance(
            fact, finst.nrows, finst.refs, {**finst.numeric, p: col}, finst.text
        )
    else:
        source = inst.attrs[p]
        new_finst = FactInstance(
            fact, finst.nrows, finst.refs, finst.numeric,
            {**finst.text, p: TextColumn(source.values, source.codes[refs])},
        )

    # removing p fuses the (prev, p), (p, next) pairs into (prev, next),
    # a composition of functional maps, so the rebuild cannot find conflicts
    store = ctx.store.derive(
        schema=schema,
        dimensions={**ctx.store.dimensions, dim: new_dinst},
        facts={**ctx.store.facts, fact: new_finst},
        orderings={k: v for k, v in ctx.store.orderings.items() if k != (dim, p)},
        rebuild_rollups=True,
    )
    levels = dict(ctx.display_levels)
    if levels[dim] == p:
        levels[dim] = default_display_level(new_dim)
    # the parameter no longer exists on the dimension side
    restrictions = tuple(
        r for r in ctx.restrictions if not (r.dim == dim and r.param == p)
    )
    return replace(
        ctx, schema=schema, display_levels=levels, restrictions=restrictions, store=store
    )


def pull(ctx: AnalysisContext, fact: str, m: str, dim: str) -> AnalysisContext:
    """Convert a measure into a parameter by refining the dimension's members.

    Each member splits into one refinement per distinct measure value observed
    in the fact's rows for it; refinements keep the original key when unique
    and gain a "~n" suffix otherwise.  Members no row refers to keep a single
    refinement carrying the empty-value sentinel.  Rows of other facts follow
    their member's first refinement.
    """
    f = _need_fact(ctx.schema, fact)
    d = _need_dimension(ctx.schema, dim)
    if f.measure(m) is None:
        raise UnknownMeasure(f"fact {fact!r} has no measure {m!r}")
    if dim not in ctx.schema.param_of(fact):
        raise NotLinked(f"dimension {dim!r} is not linked to fact {fact!r}")
    if m in d.attributes:
        raise MeasureConflict(f"dimension {dim!r} already has an attribute {m!r}")

    finst = ctx.store.facts[fact]
    inst = ctx.store.dimensions[dim]
    refs = finst.refs[dim]
    measure_def = f.measure(m)
    if measure_def.kind == NUMERIC:
        row_values = [rst.canonical_literal(float(x)) for x in finst.numeric[m]]
    else:
        col = finst.text[m]
        row_values = [col.value_at(i) for i in range(finst.nrows)]

    # distinct values per member, in first-observation order
    observed: dict[int, list[str]] = {}
    for i in range(finst.nrows):
        member = int(refs[i])
        vals = observed.setdefault(member, [])
        if row_values[i] not in vals:
            vals.append(row_values[i])

    new_rows: list[tuple[int, str, str]] = []  # (source member, new key, m value)
    refinement_at: dict[tuple[int, str], int] = {}
    first_refinement: dict[int, int] = {}
    for member in range(inst.size):
        vals = observed.get(member, [PULL_EMPTY])
        base = inst.key[member]
        for j, v in enumerate(vals):
            key = base if len(vals) == 1 else f"{base}~{j + 1}"
            refinement_at[(member, v)] = len(new_rows)
            first_refinement.setdefault(member, len(new_rows))
            new_rows.append((member, key, v))

    src_idx = np.asarray([src for src, _, _ in new_rows], dtype=np.int32)
    attrs: dict[str, AttrColumn] = {}
    for a, col in inst.attrs.items():
        attrs[a] = AttrColumn(col.values, col.codes[src_idx])
    attrs[d.key] = AttrColumn.from_strings([key for _, key, _ in new_rows])
    attrs[m] = AttrColumn.from_strings([v for _, _, v in new_rows])
    new_dinst = DimensionInstance(dim, d.key, attrs)

    new_dim = replace(d, attributes=d.attributes | {m})
    new_fact = replace(f, measures=tuple(x for x in f.measures if x.name != m))
    schema = ctx.schema.replace_dimension(new_dim).replace_fact(new_fact)

    facts = dict(ctx.store.facts)
    for fname, other in ctx.store.facts.items():
        if dim not in other.refs:
            continue
        if fname == fact:
            new_refs = np.asarray(
                [refinement_at[(int(refs[i]), row_values[i])] for i in range(other.nrows)],
                dtype=np.int32,
            )
            facts[fname] = FactInstance(
                fname, other.nrows, {**other.refs, dim: new_refs},
                {k: v for k, v in other.numeric.items() if k != m},
                {k: v for k, v in other.text.items() if k != m},
            )
        else:
            moved = np.asarray(
                [first_refinement[int(x)] for x in other.refs[dim]], dtype=np.int32
            )
            facts[fname] = FactInstance(
                fname, other.nrows, {**other.refs, dim: moved},
                other.numeric, other.text,
            )
    orderings = dict(ctx.store.orderings)
    orderings[(dim, d.key)] = attrs[d.key].values
    orderings[(dim, m)] = attrs[m].values
    store = ctx.store.derive(
        schema=schema,
        dimensions={**ctx.store.dimensions, dim: new_dinst},
        facts=facts,
        orderings=orderings,
        rebuild_rollups=True,
    )
    # key values were refined, so restrictions written against them are void
    restrictions = tuple(
        r for r in ctx.restrictions if not (r.dim == dim and r.param == d.key)
    )
    return replace(ctx, schema=schema, restrictions=restrictions, store=store)


# ---- splitting -----------------------------------------------------------


def t_split(ctx: AnalysisContext) -> list[AnalysisContext]:
    """One single-fact context per fact; shared dimensions stay shared."""
    out = []
    for fact in ctx.schema.facts:
        linked = ctx.schema.param_of(fact.fname)
        dims = tuple(d for d in ctx.schema.dims if d.dname in linked)
        schema = ConstellationSchema(
            ctx.schema.sname, (fact,), dims, {fact.fname: linked}
        )
        levels = {d: ctx.display_levels[d] for d in linked}
        restrictions = tuple(p for p in ctx.restrictions if p.dim in linked)
        out.append(
            AnalysisContext(schema, levels, restrictions, ctx.store.derive(schema=schema))
        )
    return out


def split(ctx: AnalysisContext, dim: str, p: str) -> list[AnalysisContext]:
    """One context per value of a parameter, each sliced to that value."""
    if len(ctx.schema.facts) != 1:
        raise NotStarSchema("split needs a single-fact schema; run t_split first")
    fact = ctx.schema.current_fact.fname
    d = _need_dimension(ctx.schema, dim)
    if dim not in ctx.schema.param_of(fact):
        raise NotLinked(f"dimension {dim!r} is not linked to fact {fact!r}")
    if p not in d.attributes:
        raise UnknownParameter(f"{p!r} is not an attribute of {dim!r}")
    return [
        slice_ctx(ctx, dim, rst.Predicate(dim, p, "=", v))
        for v in ctx.store.parameter_domain(dim, p)
    ]


def slice_ctx(ctx: AnalysisContext, dim: str, pred: rst.Predicate) -> AnalysisContext:
    """Conjoin a predicate; members failing it drop from later displays."""
    d = _need_dimension(ctx.schema, dim)
    if pred.dim != dim:
        raise UnknownParameter(f"predicate names {pred.dim!r}, not {dim!r}")
    if pred.param not in d.attributes:
        raise UnknownParameter(f"{pred.param!r} is not an attribute of {dim!r}")
    op = rst.canonical_op(pred.op)
    if op not in rst.COMPARATORS:
        raise TypeMismatch(f"unknown comparator {pred.op!r}")
    if op in rst.ORDERED:
        if isinstance(pred.literal, (str, tuple)):
            raise TypeMismatch("ordered comparators take a numeric literal")
        domain = ctx.store.parameter_domain(dim, pred.param)
        for v in domain:
            try:
                float(v)
            except ValueError:
                raise TypeMismatch(
                    f"{dim}.{pred.param} holds text values; ordered comparison undefined"
                ) from None
    pred = rst.Predicate(dim, pred.param, op, pred.literal)
    return replace(ctx, restrictions=rst.normalize(ctx.restrictions + (pred,)))


# ---- set operators -------------------------------------------------------

Row = tuple[tuple[str, ...], tuple]  # (dimension keys, measure values)


def _restricted_rows(ctx: AnalysisContext) -> list[Row]:
    fact = ctx.schema.current_fact
    linked = ctx.schema.param_of(fact.fname)
    preds = tuple(p for p in ctx.restrictions if p.dim in linked)
    inst = ctx.store.facts[fact.fname]
    mask = ctx.store.row_mask(fact.fname, preds)
    dims = [(d, ctx.store.dimensions[d], inst.refs[d]) for d in linked]
    rows: list[Row] = []
    for i in np.flatnonzero(mask):
        keys = tuple(dinst.key[refs[i]] for _, dinst, refs in dims)
        values = tuple(
            float(inst.numeric[m.name][i]) if m.kind == NUMERIC
            else inst.text[m.name].value_at(i)
            for m in fact.measures
        )
        rows.append((keys, values))
    return rows


def _merge_union(rows_a: list[Row], rows_b: list[Row]) -> list[Row]:
    by_key_a: dict[tuple, Counter] = {}
    by_key_b: dict[tuple, Counter] = {}
    for keys, values in rows_a:
        by_key_a.setdefault(keys, Counter())[values] += 1
    for keys, values in rows_b:
        by_key_b.setdefault(keys, Counter())[values] += 1
    for keys in by_key_a.keys() & by_key_b.keys():
        if by_key_a[keys] != by_key_b[keys]:
            raise MeasureConflict(
                f"row {keys} carries different measure values in the two contexts"
            )
    count_a, count_b = Counter(rows_a), Counter(rows_b)
    out = list(rows_a)
    extra = {r: max(c - count_a.get(r, 0), 0) for r, c in count_b.items()}
    for r in rows_b:
        if extra.get(r, 0) > 0:
            out.append(r)
            extra[r] -= 1
    return out


def _merge_intersect(rows_a: list[Row], rows_b: list[Row]) -> list[Row]:
    allow = Counter(rows_b)
    out = []
    for r in rows_a:
        if allow.get(r, 0) > 0:
            out.append(r)
            allow[r] -= 1
    return out


def _merge_difference(rows_a: list[Row], rows_b: list[Row]) -> list[Row]:
    skip = Counter(rows_b)
    out = []
    for r in rows_a:
        if skip.get(r, 0) > 0:
            skip[r] -= 1
        else:
            out.append(r)
    return out


def combine(kind: str, ctx_a: AnalysisContext, ctx_b: AnalysisContext) -> AnalysisContext:
    """Row-set union/intersect/difference on the current fact's restricted rows.

    The result lives on the first context's store; its restrictions are empty
    because the merge already baked them into the surviving rows.
    """
    if kind not in ("union", "intersect", "difference"):
        raise SchemaMismatch(f"unknown set operation {kind!r}")
    fact_a = ctx_a.schema.current_fact
    fact_b = ctx_b.schema.current_fact
    if fact_a.measures != fact_b.measures or (
        ctx_a.schema.param_of(fact_a.fname) != ctx_b.schema.param_of(fact_b.fname)
    ):
        raise SchemaMismatch(
            "set operations need identical measures and dimension linkage"
        )
    rows_a = _restricted_rows(ctx_a)
    rows_b = _restricted_rows(ctx_b)
    merge = {
        "union": _merge_union,
        "intersect": _merge_intersect,
        "difference": _merge_difference,
    }[kind]
    merged = merge(rows_a, rows_b)

    linked = ctx_a.schema.param_of(fact_a.fname)
    refs: dict[str, list[int]] = {d: [] for d in linked}
    numeric: dict[str, list[float]] = {
        m.name: [] for m in fact_a.measures if m.kind == NUMERIC
    }
    text: dict[str, list[str]] = {
        m.name: [] for m in fact_a.measures if m.kind != NUMERIC
    }
    for keys, values in merged:
        for d, k in zip(linked, keys):
            member = ctx_a.store.dimensions[d].key_index.get(k)
            if member is None:
                raise SchemaMismatch(
                    f"member {k!r} of dimension {d!r} is unknown to the first context"
                )
            refs[d].append(member)
        for m, v in zip(fact_a.measures, values):
            if m.kind == NUMERIC:
                numeric[m.name].append(float(v))
            else:
                text[m.name].append(str(v))
    new_inst = FactInstance(
        fact_a.fname,
        len(merged),
        {d: np.asarray(v, dtype=np.int32) for d, v in refs.items()},
        {k: np.asarray(v, dtype=np.float64) for k, v in numeric.items()},
        {k: TextColumn.from_strings(v) for k, v in text.items()},
    )
    store = ctx_a.store.derive(facts={**ctx_a.store.facts, fact_a.fname: new_inst})
    return replace(ctx_a, restrictions=rst.EMPTY, store=store)
