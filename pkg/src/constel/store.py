"""In-memory instance store: dimension members, fact rows, roll-up maps.

Storage is columnar.  Each dimension attribute is dictionary-encoded: a tuple
of distinct values (in first-appearance order) plus an int32 code per member.
Fact rows hold one member index per linked dimension and one column per
measure.  Roll-up maps for every adjacent parameter pair of every hierarchy
are materialized at load; the functional-dependency check comes free.

A store is immutable after construction.  Derived stores (push, pull, switch,
combine) share every untouched table with their parent.
"""

from __future__ import annotations

from typing import Iterable, Iterator

import numpy as np

from . import restrictions as rst
from .errors import NotAnAncestor, UnknownFact, UnknownParameter, UnknownValue
from .model import (
    ALL_LEVEL,
    ALL_VALUE,
    ConstellationSchema,
    Dimension,
    Issue,
    ValidationReport,
)


class AttrColumn:
    """Dictionary-encoded attribute column over the members of one dimension."""

    __slots__ = ("values", "index", "codes")

    def __init__(self, values: tuple[str, ...], codes: np.ndarray):
        self.values = values
        self.index = {v: i for i, v in enumerate(values)}
        self.codes = codes

    @classmethod
    def from_strings(cls, raw: Iterable[str]) -> "AttrColumn":
        values: list[str] = []
        index: dict[str, int] = {}
        codes: list[int] = []
        for v in raw:
            code = index.get(v)
            if code is None:
                code = len(values)
                index[v] = code
                values.append(v)
            codes.append(code)
        return cls(tuple(values), np.asarray(codes, dtype=np.int32))

    def value_at(self, member: int) -> str:
        return self.values[self.codes[member]]

    def equals(self, other: "AttrColumn") -> bool:
        return self.values == other.values and np.array_equal(self.codes, other.codes)


class TextColumn:
    """Dictionary-encoded text measure column over fact rows."""

    __slots__ = ("values", "codes")

    def __init__(self, values: tuple[str, ...], codes: np.ndarray):
        self.values = values
        self.codes = codes

    @classmethod
    def from_strings(cls, raw: Iterable[str]) -> "TextColumn":
        col = AttrColumn.from_strings(raw)
        return cls(col.values, col.codes)

    def value_at(self, row: int) -> str:
        return self.values[self.codes[row]]

    def equals(self, other: "TextColumn") -> bool:
        return self.values == other.values and np.array_equal(self.codes, other.codes)


class DimensionInstance:
    """All loaded members of one dimension; `attrs` covers the key as well."""

    __slots__ = ("dname", "key", "key_index", "attrs")

    def __init__(self, dname: str, key_param: str, attrs: dict[str, AttrColumn]):
        self.dname = dname
        key_col = attrs[key_param]
        self.key = tuple(key_col.values[c] for c in key_col.codes)
        self.key_index = {v: i for i, v in enumerate(self.key)}
        self.attrs = attrs

    @property
    def size(self) -> int:
        return len(self.key)

    def value_of(self, attr: str, member: int) -> str:
        if attr == ALL_LEVEL:
            return ALL_VALUE
        return self.attrs[attr].value_at(member)

    def member_records(self) -> list[dict[str, str]]:
        """Plain per-member dicts; the naive-oracle view of this dimension."""
        names = list(self.attrs)
        cols = [self.attrs[n] for n in names]
        return [
            {n: c.value_at(i) for n, c in zip(names, cols)}
            for i in range(self.size)
        ]

    def equals(self, other: "DimensionInstance") -> bool:
        return (
            self.dname == other.dname
            and self.key == other.key
            and set(self.attrs) == set(other.attrs)
            and all(c.equals(other.attrs[n]) for n, c in self.attrs.items())
        )


class FactInstance:
    """Loaded rows of one fact: member references plus measure columns."""

    __slots__ = ("fname", "nrows", "refs", "numeric", "text")

    def __init__(
        self,
        fname: str,
        nrows: int,
        refs: dict[str, np.ndarray],
        numeric: dict[str, np.ndarray],
        text: dict[str, TextColumn],
    ):
        self.fname = fname
        self.nrows = nrows
        self.refs = refs
        self.numeric = numeric
        self.text = text

    def measure_values(self, name: str) -> np.ndarray | TextColumn:
        if name in self.numeric:
            return self.numeric[name]
        return self.text[name]

    def equals(self, other: "FactInstance") -> bool:
        return (
            self.fname == other.fname
            and self.nrows == other.nrows
            and set(self.refs) == set(other.refs)
            and all(np.array_equal(a, other.refs[d]) for d, a in self.refs.items())
            and set(self.numeric) == set(other.numeric)
            and all(np.array_equal(a, other.numeric[m]) for m, a in self.numeric.items())
            and set(self.text) == set(other.text)
            and all(c.equals(other.text[m]) for m, c in self.text.items())
        )


RollUpKey = tuple[str, str, str, str]  # (dimension, hierarchy, from_param, to_param)


def build_rollup_maps(
    schema: ConstellationSchema, dimensions: dict[str, DimensionInstance]
) -> tuple[dict[RollUpKey, dict[str, str]], list[Issue]]:
    """Materialize the map for every adjacent parameter pair of every hierarchy.

    A conflict (one finer value observed under two coarser values) is reported
    as an error issue naming the offending value.
    """
    maps: dict[RollUpKey, dict[str, str]] = {}
    issues: list[Issue] = []
    for dim in schema.dims:
        inst = dimensions.get(dim.dname)
        if inst is None:
            continue
        for hier in dim.hierarchies:
            for from_p, to_p in zip(hier.params, hier.params[1:]):
                key = (dim.dname, hier.hname, from_p, to_p)
                mapping: dict[str, str] = {}
                if to_p == ALL_LEVEL:
                    if from_p in inst.attrs:
                        mapping = {v: ALL_VALUE for v in inst.attrs[from_p].values}
                    maps[key] = mapping
                    continue
                if from_p not in inst.attrs or to_p not in inst.attrs:
                    maps[key] = mapping
                    continue
                lower = inst.attrs[from_p]
                upper = inst.attrs[to_p]
                conflicts: set[str] = set()
                for m in range(inst.size):
                    v = lower.value_at(m)
                    v_up = upper.value_at(m)
                    seen = mapping.get(v)
                    if seen is None:
                        mapping[v] = v_up
                    elif seen != v_up and v not in conflicts:
                        conflicts.add(v)
                        issues.append(
                            Issue(
                                "error",
                                f"dimension {dim.dname} / hierarchy {hier.hname}",
                                f"{from_p}={v!r} rolls up to both {seen!r} and {v_up!r} on {to_p}",
                            )
                        )
                maps[key] = mapping
    return maps, issues


class InstanceStore:
    """Immutable bundle of dimension instances, fact instances, and orderings.

    ``orderings`` maps (dimension, parameter) to the display order of the
    parameter's distinct values; it starts as first-appearance order and is
    only ever permuted (by the switch operator) in a derived store.
    """

    __slots__ = ("schema", "dimensions", "facts", "orderings", "rollups")

    def __init__(
        self,
        schema: ConstellationSchema,
        dimensions: dict[str, DimensionInstance],
        facts: dict[str, FactInstance],
        orderings: dict[tuple[str, str], tuple[str, ...]],
        rollups: dict[RollUpKey, dict[str, str]],
    ):
        self.schema = schema
        self.dimensions = dimensions
        self.facts = facts
        self.orderings = orderings
        self.rollups = rollups

    @classmethod
    def assemble(
        cls,
        schema: ConstellationSchema,
        dimensions: dict[str, DimensionInstance],
        facts: dict[str, FactInstance],
    ) -> "InstanceStore":
        """Build orderings and roll-up maps for fully constructed instances."""
        orderings: dict[tuple[str, str], tuple[str, ...]] = {}
        for dim in schema.dims:
            inst = dimensions.get(dim.dname)
            if inst is None:
                continue
            for attr, col in inst.attrs.items():
                orderings[(dim.dname, attr)] = col.values
            orderings[(dim.dname, ALL_LEVEL)] = (ALL_VALUE,)
        rollups, issues = build_rollup_maps(schema, dimensions)
        errors = [i for i in issues if i.severity == "error"]
        if errors:
            raise ValueError("; ".join(f"{i.location}: {i.message}" for i in errors))
        return cls(schema, dimensions, facts, orderings, rollups)

    # ---- derivation -----------------------------------------------------

    def derive(
        self,
        schema: ConstellationSchema | None = None,
        dimensions: dict[str, DimensionInstance] | None = None,
        facts: dict[str, FactInstance] | None = None,
        orderings: dict[tuple[str, str], tuple[str, ...]] | None = None,
        rebuild_rollups: bool = False,
    ) -> "InstanceStore":
        new_schema = schema if schema is not None else self.schema
        new_dims = dimensions if dimensions is not None else self.dimensions
        new_facts = facts if facts is not None else self.facts
        new_orderings = orderings if orderings is not None else self.orderings
        if rebuild_rollups:
            rollups, _ = build_rollup_maps(new_schema, new_dims)
        else:
            rollups = self.rollups
        return InstanceStore(new_schema, new_dims, new_facts, new_orderings, rollups)

    def equals(self, other: "InstanceStore") -> bool:
        if self is other:
            return True
        return (
            self.schema == other.schema
            and set(self.dimensions) == set(other.dimensions)
            and all(d.equals(other.dimensions[n]) for n, d in self.dimensions.items())
            and set(self.facts) == set(other.facts)
            and all(f.equals(other.facts[n]) for n, f in self.facts.items())
            and self.orderings == other.orderings
        )

    # ---- roll-up family -------------------------------------------------

    def roll_up_value(self, dim: str, hier: str, from_p: str, to_p: str, v: str) -> str:
        """Map a parameter value to its unique ancestor value along a hierarchy."""
        d = self.schema.dimension(dim)
        if d is None:
            raise UnknownParameter(f"unknown dimension {dim!r}")
        h = d.hierarchy(hier)
        if h is None:
            raise NotAnAncestor(f"dimension {dim!r} has no hierarchy {hier!r}")
        if from_p not in h.params or to_p not in h.params:
            raise NotAnAncestor(f"{from_p!r} and {to_p!r} must both belong to {hier!r}")
        i, j = h.params.index(from_p), h.params.index(to_p)
        if j < i:
            raise NotAnAncestor(f"{to_p!r} does not follow {from_p!r} in {hier!r}")
        domain = self.parameter_domain(dim, from_p)
        if v not in domain:
            raise UnknownValue(f"{v!r} is not a value of {dim}.{from_p}")
        current = v
        for a, b in zip(h.params[i:j], h.params[i + 1 : j + 1]):
            current = self.rollups[(dim, hier, a, b)][current]
        return current

    def check_rollup_functions(self) -> ValidationReport:
        """Re-verify that every adjacent-pair mapping is functional."""
        _, issues = build_rollup_maps(self.schema, self.dimensions)
        return ValidationReport.from_issues(issues)

    def parameter_domain(self, dim: str, p: str) -> tuple[str, ...]:
        """Distinct values of a parameter in display order."""
        d = self.schema.dimension(dim)
        if d is None:
            raise UnknownParameter(f"unknown dimension {dim!r}")
        if p not in d.attributes:
            raise UnknownParameter(f"{p!r} is not an attribute of {dim!r}")
        return self.orderings[(dim, p)]

    # ---- restriction masks ----------------------------------------------

    def member_mask(self, dname: str, predicates: tuple[rst.Predicate, ...]) -> np.ndarray:
        """Boolean mask over members of a dimension passing every predicate."""
        inst = self.dimensions[dname]
        mask = np.ones(inst.size, dtype=bool)
        for pred in predicates:
            if pred.param == ALL_LEVEL:
                if not pred.matches(ALL_VALUE):
                    mask[:] = False
                continue
            col = inst.attrs[pred.param]
            table = np.fromiter(
                (pred.matches(v) for v in col.values), dtype=bool, count=len(col.values)
            )
            mask &= table[col.codes]
        return mask

    def row_mask(self, fact: str, restriction_set: rst.RestrictionSet) -> np.ndarray:
        """Boolean mask over a fact's rows after member-level restrictions."""
        inst = self.facts[fact]
        mask = np.ones(inst.nrows, dtype=bool)
        for dname in rst.restricted_dimensions(restriction_set):
            preds = rst.for_dimension(restriction_set, dname)
            if dname not in inst.refs:
                continue
            member_ok = self.member_mask(dname, preds)
            mask &= member_ok[inst.refs[dname]]
        return mask

    # ---- row access ------------------------------------------------------

    def fact_rows(
        self, fact: str, restriction_set: rst.RestrictionSet = rst.EMPTY
    ) -> Iterator[dict[str, object]]:
        """Yield rows (dimension key references + measures) passing every predicate."""
        if fact not in self.facts:
            raise UnknownFact(f"unknown fact {fact!r}")
        linked = self.schema.param_of(fact)
        for pred in restriction_set:
            if pred.dim not in linked:
                raise UnknownParameter(
                    f"restriction on {pred.dim!r} which is not linked to {fact!r}"
                )
            d = self.schema.dimension(pred.dim)
            if d is None or pred.param not in d.attributes:
                raise UnknownParameter(f"{pred.param!r} is not an attribute of {pred.dim!r}")
        inst = self.facts[fact]
        mask = self.row_mask(fact, restriction_set)
        dims = [(dname, self.dimensions[dname], inst.refs[dname]) for dname in linked]
        fact_def = self.schema.fact(fact)
        assert fact_def is not None
        measures = fact_def.measure_names()
        for i in np.flatnonzero(mask):
            row: dict[str, object] = {}
            for dname, dinst, refs in dims:
                row[dname] = dinst.key[refs[i]]
            for m in measures:
                if m in inst.numeric:
                    row[m] = float(inst.numeric[m][i])
                else:
                    row[m] = inst.text[m].value_at(i)
            yield row


# ---- module-level operation aliases (store-first call style) -------------


def roll_up_value(store: InstanceStore, dim: str, hier: str, from_p: str, to_p: str, v: str) -> str:
    return store.roll_up_value(dim, hier, from_p, to_p, v)


def check_rollup_functions(store: InstanceStore) -> ValidationReport:
    return store.check_rollup_functions()


def parameter_domain(store: InstanceStore, dim: str, p: str) -> tuple[str, ...]:
    return store.parameter_domain(dim, p)


def fact_rows(
    store: InstanceStore, fact: str, restriction_set: rst.RestrictionSet = rst.EMPTY
) -> Iterator[dict[str, object]]:
    return store.fact_rows(fact, restriction_set)
