"""Loading: schema documents (JSON) and data files (CSV) into an InstanceStore.

File-set layout: ``<schema>.json`` next to a ``data/`` directory holding one
``<name>.csv`` per dimension and per fact.  Dimension files carry one column
per attribute (matched by header, any order); fact files carry one
``<dimension>_id`` column per linked dimension plus one column per measure.

The reserved level ``all`` is never written in files; it is appended to every
hierarchy and attribute set at load time.  Empty cells are rejected: roll-up
functions must be total, so there is no null semantics.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import LoadError
from .model import (
    ALL_LEVEL,
    AGGREGATIONS,
    KINDS,
    NUMERIC,
    TEXT,
    ConstellationSchema,
    Dimension,
    Fact,
    Hierarchy,
    MeasureDef,
    default_aggregation,
    validate_schema,
)
from .store import AttrColumn, DimensionInstance, FactInstance, InstanceStore, TextColumn


def _require(condition: bool, message: str, location: str) -> None:
    if not condition:
        raise LoadError(message, location)


def _measure_from_doc(doc: object, location: str) -> MeasureDef:
    if isinstance(doc, str):
        doc = {"name": doc}
    _require(isinstance(doc, dict), "measure must be a name or an object", location)
    assert isinstance(doc, dict)
    name = doc.get("name")
    _require(isinstance(name, str) and bool(name), "measure needs a name", location)
    kind = doc.get("kind", NUMERIC)
    _require(kind in KINDS, f"unknown measure kind {kind!r}", f"{location}.{name}")
    agg = doc.get("agg", default_aggregation(kind))
    _require(agg in AGGREGATIONS, f"unknown aggregation {agg!r}", f"{location}.{name}")
    unknown = set(doc) - {"name", "kind", "agg"}
    _require(not unknown, f"unknown measure fields {sorted(unknown)}", f"{location}.{name}")
    return MeasureDef(name=name, kind=kind, agg=agg)


def load_schema(document: Mapping | str | Path) -> ConstellationSchema:
    """Build and validate a schema from a parsed document or a JSON file path."""
    if isinstance(document, (str, Path)):
        path = Path(document)
        try:
            document = json.loads(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise LoadError(str(exc), str(path)) from exc
        except json.JSONDecodeError as exc:
            raise LoadError(f"invalid JSON: {exc}", str(path)) from exc
    _require(isinstance(document, Mapping), "schema document must be an object", "$")

    name = document.get("name")
    _require(isinstance(name, str) and bool(name), "schema needs a name", "$.name")

    dims: list[Dimension] = []
    for i, ddoc in enumerate(document.get("dimensions", [])):
        loc = f"$.dimensions[{i}]"
        _require(isinstance(ddoc, dict), "dimension must be an object", loc)
        dname = ddoc.get("name")
        _require(isinstance(dname, str) and bool(dname), "dimension needs a name", loc)
        loc = f"$.dimensions[{i}] ({dname})"
        key = ddoc.get("key")
        _require(isinstance(key, str) and bool(key), "dimension needs a key", loc)
        attributes = ddoc.get("attributes")
        _require(
            isinstance(attributes, list) and all(isinstance(a, str) for a in attributes),
            "attributes must be a list of names",
            loc,
        )
        _require(ALL_LEVEL not in attributes, f"`{ALL_LEVEL}` is a reserved parameter", loc)
        _require(key != ALL_LEVEL, f"`{ALL_LEVEL}` is a reserved parameter", loc)
        _require(len(set(attributes)) == len(attributes), "duplicate attribute", loc)
        hierarchies: list[Hierarchy] = []
        for j, hdoc in enumerate(ddoc.get("hierarchies", [])):
            hloc = f"{loc}.hierarchies[{j}]"
            _require(isinstance(hdoc, dict), "hierarchy must be an object", hloc)
            hname = hdoc.get("name")
            _require(isinstance(hname, str) and bool(hname), "hierarchy needs a name", hloc)
            params = hdoc.get("params")
            _require(
                isinstance(params, list) and all(isinstance(p, str) for p in params),
                "params must be a list of names",
                hloc,
            )
            _require(ALL_LEVEL not in params, f"`{ALL_LEVEL}` is a reserved parameter", hloc)
            hierarchies.append(Hierarchy(hname, tuple(params) + (ALL_LEVEL,)))
        dims.append(
            Dimension(
                dname=dname,
                attributes=frozenset(attributes) | {ALL_LEVEL},
                key=key,
                hierarchies=tuple(hierarchies),
            )
        )

    facts: list[Fact] = []
    param: dict[str, tuple[str, ...]] = {}
    for i, fdoc in enumerate(document.get("facts", [])):
        loc = f"$.facts[{i}]"
        _require(isinstance(fdoc, dict), "fact must be an object", loc)
        fname = fdoc.get("name")
        _require(isinstance(fname, str) and bool(fname), "fact needs a name", loc)
        loc = f"$.facts[{i}] ({fname})"
        measures = tuple(
            _measure_from_doc(m, f"{loc}.measures") for m in fdoc.get("measures", [])
        )
        linked = fdoc.get("dimensions")
        _require(
            isinstance(linked, list) and all(isinstance(d, str) for d in linked),
            "fact dimensions must be a list of names",
            loc,
        )
        _require(fname not in param, f"duplicate fact {fname!r}", loc)
        facts.append(Fact(fname=fname, measures=measures))
        param[fname] = tuple(linked)

    schema = ConstellationSchema(sname=name, facts=tuple(facts), dims=tuple(dims), param=param)
    report = validate_schema(schema)
    if not report.ok:
        first = next(i for i in report.issues if i.severity == "error")
        raise LoadError(first.message, first.location)
    return schema


# ---- data loading --------------------------------------------------------


Rows = list[dict[str, str]]


def _read_csv(source: str | Path, location: str) -> Rows:
    if isinstance(source, Path) or (isinstance(source, str) and "\n" not in source):
        path = Path(source)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise LoadError(str(exc), location) from exc
    else:
        text = source
    reader = csv.DictReader(io.StringIO(text))
    _require(reader.fieldnames is not None, "missing header row", location)
    rows = []
    for i, row in enumerate(reader):
        if None in row or any(v is None for v in row.values()):
            raise LoadError(f"row {i + 2}: wrong number of fields", location)
        rows.append(row)
    return rows


def _check_columns(present: Iterable[str], expected: set[str], location: str) -> None:
    present = set(present)
    missing = expected - present
    extra = present - expected
    _require(not missing, f"missing columns {sorted(missing)}", location)
    _require(not extra, f"unexpected columns {sorted(extra)}", location)


def _dimension_from_rows(dim: Dimension, rows: Rows, location: str) -> DimensionInstance:
    attr_names = sorted(dim.attributes - {ALL_LEVEL})
    if rows:
        _check_columns(rows[0].keys(), set(attr_names), location)
    columns: dict[str, list[str]] = {a: [] for a in attr_names}
    seen_keys: set[str] = set()
    for i, row in enumerate(rows):
        for a in attr_names:
            value = row.get(a, "")
            _require(value != "", f"row {i + 2}: missing value for {a!r}", location)
            columns[a].append(value)
        k = row[dim.key]
        _require(k not in seen_keys, f"row {i + 2}: duplicate key {k!r}", location)
        seen_keys.add(k)
    attrs = {a: AttrColumn.from_strings(columns[a]) for a in attr_names}
    return DimensionInstance(dim.dname, dim.key, attrs)


def _fact_from_rows(
    schema: ConstellationSchema,
    fact: Fact,
    dimensions: dict[str, DimensionInstance],
    rows: Rows,
    location: str,
) -> FactInstance:
    linked = schema.param_of(fact.fname)
    ref_cols = {d: f"{d}_id" for d in linked}
    expected = set(ref_cols.values()) | set(fact.measure_names())
    if rows:
        _check_columns(rows[0].keys(), expected, location)
    refs: dict[str, list[int]] = {d: [] for d in linked}
    numeric: dict[str, list[float]] = {
        m.name: [] for m in fact.measures if m.kind == NUMERIC
    }
    text: dict[str, list[str]] = {m.name: [] for m in fact.measures if m.kind == TEXT}
    for i, row in enumerate(rows):
        for d in linked:
            key = row.get(ref_cols[d], "")
            _require(key != "", f"row {i + 2}: missing value for {ref_cols[d]!r}", location)
            member = dimensions[d].key_index.get(key)
            if member is None:
                raise LoadError(f"row {i + 2}: unknown {d} key {key!r}", location)
            refs[d].append(member)
        for m in fact.measures:
            value = row.get(m.name, "")
            _require(value != "", f"row {i + 2}: missing value for measure {m.name!r}", location)
            if m.kind == NUMERIC:
                try:
                    x = float(value)
                except ValueError:
                    raise LoadError(
                        f"row {i + 2}: non-numeric value {value!r} for measure {m.name!r}",
                        location,
                    ) from None
                _require(
                    np.isfinite(x), f"row {i + 2}: non-finite value for {m.name!r}", location
                )
                numeric[m.name].append(x)
            else:
                text[m.name].append(value)
    return FactInstance(
        fact.fname,
        len(rows),
        {d: np.asarray(v, dtype=np.int32) for d, v in refs.items()},
        {m: np.asarray(v, dtype=np.float64) for m, v in numeric.items()},
        {m: TextColumn.from_strings(v) for m, v in text.items()},
    )


def load_records(
    schema: ConstellationSchema, tables: Mapping[str, Rows]
) -> InstanceStore:
    """Build a store from in-memory row dicts (all values as strings)."""
    dimensions: dict[str, DimensionInstance] = {}
    for dim in schema.dims:
        rows = tables.get(dim.dname)
        _require(rows is not None, f"no data for dimension {dim.dname!r}", dim.dname)
        assert rows is not None
        dimensions[dim.dname] = _dimension_from_rows(dim, rows, dim.dname)
    facts: dict[str, FactInstance] = {}
    for fact in schema.facts:
        rows = tables.get(fact.fname)
        _require(rows is not None, f"no data for fact {fact.fname!r}", fact.fname)
        assert rows is not None
        facts[fact.fname] = _fact_from_rows(schema, fact, dimensions, rows, fact.fname)
    try:
        return InstanceStore.assemble(schema, dimensions, facts)
    except ValueError as exc:
        raise LoadError(str(exc)) from None


def load_data(
    schema: ConstellationSchema, files: Mapping[str, str | Path]
) -> InstanceStore:
    """Load one delimited file (path or CSV text) per dimension and per fact."""
    tables: dict[str, Rows] = {}
    for name, source in files.items():
        location = str(source) if isinstance(source, (str, Path)) and "\n" not in str(source) else name
        tables[name] = _read_csv(source, location)
    return load_records(schema, tables)


def load_dataset(schema_path: str | Path) -> tuple[ConstellationSchema, InstanceStore]:
    """Resolve the ``<schema>.json`` + ``data/<name>.csv`` layout and load it."""
    schema_path = Path(schema_path)
    schema = load_schema(schema_path)
    data_dir = schema_path.parent / "data"
    _require(data_dir.is_dir(), f"no data directory at {data_dir}", str(schema_path))
    files: dict[str, Path] = {}
    for dim in schema.dims:
        files[dim.dname] = data_dir / f"{dim.dname}.csv"
    for fact in schema.facts:
        files[fact.fname] = data_dir / f"{fact.fname}.csv"
    return schema, load_data(schema, files)


def find_schema_file(directory: str | Path) -> Path:
    """The single ``*.json`` schema file of a dataset directory."""
    directory = Path(directory)
    candidates = sorted(directory.glob("*.json"))
    _require(bool(candidates), "no schema .json file found", str(directory))
    _require(len(candidates) == 1, f"ambiguous schema files: {[c.name for c in candidates]}", str(directory))
    return candidates[0]
