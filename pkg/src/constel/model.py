"""Constellation schema model: facts, dimensions, multiple hierarchies.

A constellation groups several facts around shared dimensions.  "Current"
elements are encoded positionally: the first fact is the displayed one, the
first two dimensions of its linkage list are the display axes, and the first
hierarchy of each dimension is the one in effect.  Rotation operators reorder
these lists; nothing holds a separate cursor.
"""

from __future__ import annotations

from dataclasses import dataclass

ALL_LEVEL = "all"
ALL_VALUE = "All"

NUMERIC = "numeric"
TEXT = "text"
KINDS = (NUMERIC, TEXT)

AGGREGATIONS = ("sum", "min", "max", "count", "avg", "distinct_set")
TEXT_AGGREGATIONS = ("count", "distinct_set")


def default_aggregation(kind: str) -> str:
    return "distinct_set" if kind == TEXT else "sum"


@dataclass(frozen=True)
class MeasureDef:
    name: str
    kind: str = NUMERIC
    agg: str = "sum"


@dataclass(frozen=True)
class Fact:
    fname: str
    measures: tuple[MeasureDef, ...]

    def measure(self, name: str) -> MeasureDef | None:
        for m in self.measures:
            if m.name == name:
                return m
        return None

    def measure_names(self) -> tuple[str, ...]:
        return tuple(m.name for m in self.measures)


@dataclass(frozen=True)
class Hierarchy:
    hname: str
    params: tuple[str, ...]  # finest -> coarsest, last element is `all`


@dataclass(frozen=True)
class Dimension:
    dname: str
    attributes: frozenset[str]  # includes the key and the distinguished `all`
    key: str
    hierarchies: tuple[Hierarchy, ...]  # first = current

    @property
    def current_hierarchy(self) -> Hierarchy:
        return self.hierarchies[0]

    def hierarchy(self, name: str) -> Hierarchy | None:
        for h in self.hierarchies:
            if h.hname == name:
                return h
        return None


@dataclass(frozen=True)
class ConstellationSchema:
    sname: str
    facts: tuple[Fact, ...]  # first = current
    dims: tuple[Dimension, ...]
    param: dict[str, tuple[str, ...]]  # fact name -> linked dimension names, ordered

    def fact(self, name: str) -> Fact | None:
        for f in self.facts:
            if f.fname == name:
                return f
        return None

    def dimension(self, name: str) -> Dimension | None:
        for d in self.dims:
            if d.dname == name:
                return d
        return None

    @property
    def current_fact(self) -> Fact:
        return self.facts[0]

    def param_of(self, fact: str) -> tuple[str, ...]:
        return self.param.get(fact, ())

    def replace_dimension(self, dim: Dimension) -> "ConstellationSchema":
        dims = tuple(dim if d.dname == dim.dname else d for d in self.dims)
        return ConstellationSchema(self.sname, self.facts, dims, self.param)

    def replace_fact(self, fact: Fact) -> "ConstellationSchema":
        facts = tuple(fact if f.fname == fact.fname else f for f in self.facts)
        return ConstellationSchema(self.sname, facts, self.dims, self.param)


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning"
    location: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    issues: tuple[Issue, ...]

    @classmethod
    def from_issues(cls, issues: list[Issue]) -> "ValidationReport":
        return cls(ok=not any(i.severity == "error" for i in issues), issues=tuple(issues))


def validate_schema(schema: ConstellationSchema) -> ValidationReport:
    """Check every structural invariant of a constellation schema.

    Total and deterministic: malformed input produces report entries, never
    exceptions.  ``ok`` is true iff no error-severity issue was found.
    """
    issues: list[Issue] = []

    def err(location: str, message: str) -> None:
        issues.append(Issue("error", location, message))

    def warn(location: str, message: str) -> None:
        issues.append(Issue("warning", location, message))

    if not schema.facts:
        err(f"schema {schema.sname}", "constellation needs at least one fact")

    seen_names: set[str] = set()
    for f in schema.facts:
        loc = f"fact {f.fname}"
        if f.fname in seen_names:
            err(loc, "fact or dimension name declared twice")
        seen_names.add(f.fname)
        if not f.measures:
            err(loc, "measure list must not be empty")
        mseen: set[str] = set()
        for m in f.measures:
            mloc = f"{loc} / measure {m.name}"
            if m.name in mseen:
                err(mloc, "duplicate measure name within the fact")
            mseen.add(m.name)
            if m.kind not in KINDS:
                err(mloc, f"unknown measure kind {m.kind!r}")
            if m.agg not in AGGREGATIONS:
                err(mloc, f"unknown aggregation {m.agg!r}")
            elif m.kind == TEXT and m.agg not in TEXT_AGGREGATIONS:
                err(mloc, f"text measures may only use {' or '.join(TEXT_AGGREGATIONS)}")

    dim_names: set[str] = set()
    for d in schema.dims:
        loc = f"dimension {d.dname}"
        if d.dname in seen_names:
            err(loc, "fact or dimension name declared twice")
        seen_names.add(d.dname)
        if d.dname in dim_names:
            err(loc, "duplicate dimension name")
        dim_names.add(d.dname)
        if ALL_LEVEL not in d.attributes:
            err(loc, f"attribute set must contain `{ALL_LEVEL}`")
        if d.key not in d.attributes:
            err(loc, f"key parameter {d.key!r} missing from attribute set")
        if not d.hierarchies:
            err(loc, "dimension needs at least one hierarchy")
        for h in d.hierarchies:
            hloc = f"{loc} / hierarchy {h.hname}"
            if len(h.params) < 2:
                err(hloc, "hierarchy needs at least two parameters")
            if len(set(h.params)) != len(h.params):
                err(hloc, "duplicate parameter in hierarchy")
            if h.params and h.params[0] != d.key:
                err(hloc, f"hierarchy must begin with the key parameter {d.key!r}")
            if not h.params or h.params[-1] != ALL_LEVEL:
                err(hloc, f"hierarchy must end with `{ALL_LEVEL}`")
            for p in h.params:
                if p not in d.attributes:
                    err(hloc, f"parameter {p!r} is not an attribute of {d.dname}")

    for f in schema.facts:
        loc = f"fact {f.fname}"
        linked = schema.param.get(f.fname)
        if linked is None:
            err(loc, "fact has no dimension linkage entry")
            continue
        if len(set(linked)) != len(linked):
            err(loc, "a dimension is linked twice to the same fact")
        if len(linked) < 2:
            err(loc, "fact needs two current dimensions; link at least two")
        linked_attrs: set[str] = set()
        for dn in linked:
            d = schema.dimension(dn)
            if d is None:
                err(loc, f"linked dimension {dn!r} is not declared")
            else:
                linked_attrs |= d.attributes
        for m in f.measures:
            if m.name in linked_attrs:
                err(loc, f"measure {m.name!r} collides with an attribute of a linked dimension")

    for name in schema.param:
        if schema.fact(name) is None:
            err(f"schema {schema.sname}", f"linkage entry for undeclared fact {name!r}")

    linked_anywhere = {dn for linked in schema.param.values() for dn in linked}
    for d in schema.dims:
        if d.dname not in linked_anywhere:
            warn(f"dimension {d.dname}", "dimension is not linked to any fact")

    return ValidationReport.from_issues(issues)


def current_elements(schema: ConstellationSchema) -> tuple[str, str, str, str, str]:
    """Return (fact, column dimension, row dimension, and their current hierarchies).

    Requires a valid schema; the answer is forced by list ordering.
    """
    fact = schema.facts[0]
    d1_name, d2_name = schema.param_of(fact.fname)[:2]
    d1 = schema.dimension(d1_name)
    d2 = schema.dimension(d2_name)
    assert d1 is not None and d2 is not None
    return (fact.fname, d1_name, d2_name, d1.current_hierarchy.hname, d2.current_hierarchy.hname)


def default_display_level(dim: Dimension) -> str:
    """The parameter shown by default: the one immediately below `all`."""
    return dim.current_hierarchy.params[-2]
