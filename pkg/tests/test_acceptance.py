"""Acceptance gate: the eight required behaviors, one pass/fail line each.

Every test prints `PASS <name>: <evidence>` (or FAIL) so a `pytest -s` run
reads as a checklist.  Tolerances: integer measures compare exactly, float
measures at 1e-9 relative; timed items must stay under one second.
"""

from __future__ import annotations

import random
import time

import numpy as np
import pytest
from fastapi.testclient import TestClient

import generators
import oracle
import properties
from constel import mdql, ntable
from constel.algebra import initial_context, slice_ctx
from constel.ingest import load_dataset, load_records, load_schema
from constel.restrictions import Predicate
from constel.service import create_app
from constel.sql import emit_query
from constel.store import FactInstance, InstanceStore
from conftest import FIXTURE_DIR, FIXTURE_SCHEMA
from reference import COLS, GRID, ROWS, SLICES
from test_sql import assert_agrees

ROTATION_SCRIPT = """
DROTATE sale: payment WITH product
DROTATE sale: shop WITH date
SLICE person WHERE position = "manager"
SLICE payment WHERE pay_class = "PC1"
SLICE shop WHERE branch_desc = "BR1"
"""

GRAMMAR_EXAMPLES = (
    "DISPLAY sale",
    "DISPLAY purchase ON stock, date",
    "DROTATE sale: shop WITH date",
    "HROTATE shop TO h_shop_zone",
    "FROTATE sale WITH purchase",
    'SWITCH shop.branch_desc VALUES "BR1", "BR4"',
    "DRILLDOWN shop TO channel_class",
    "ROLLUP date TO year",
    "PUSH product.categ INTO sale",
    "PULL sale.total_sales INTO person",
    "SLICE date WHERE yeer = 2000",
    'SLICE shop WHERE city IN ("Lyon", "Paris")',
    'SLICE person WHERE position = "manager" AND age >= 30',
    "TSPLIT",
    "SPLIT product.categ",
    "COMBINE UNION C1, C2",
    "COMBINE INTERSECT current, current",
    "COMBINE DIFFERENCE current, C3",
    "SHOW",
    'EXPORT "out.json"',
    "UNDO",
)


def report(name: str, ok: bool, evidence: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} {name}: {evidence}")
    assert ok, f"{name}: {evidence}"


def matches_oracle(ctx) -> bool:
    nt = ntable.build(ctx)
    want = oracle.oracle_ntable(ctx)
    if nt.col.values != want.col_values or nt.row.values != want.row_values:
        return False
    if set(nt.cells) != set(want.cells):
        return False
    for key, got in nt.cells.items():
        expected = want.cells[key]
        if len(got) != len(expected):
            return False
        if not all(oracle.values_close(x, y) for x, y in zip(got, expected)):
            return False
    return True


def test_reference_grid_reproduction():
    start = time.perf_counter()
    schema, store = load_dataset(FIXTURE_SCHEMA)
    ctx = initial_context(schema, store)
    for p in SLICES:
        ctx = slice_ctx(ctx, p.dim, p)
    nt = ntable.build(ctx)
    elapsed = time.perf_counter() - start
    exact = sum(
        nt.cells[key] == value and all(float(v).is_integer() for v in value)
        for key, value in GRID.items()
    )
    ok = (
        exact == 12
        and set(nt.cells) == set(GRID)
        and nt.col.values == COLS
        and nt.row.values == ROWS
        and elapsed < 1.0
    )
    report("reference grid reproduction", ok, f"{exact}/12 cells exact, {elapsed:.3f}s")


def test_rotation_script_structure(channalyse):
    schema, store = channalyse
    start = time.perf_counter()
    session = mdql.replay(
        initial_context(schema, store), mdql.parse_script(ROTATION_SCRIPT)
    )
    nt = ntable.build(session.current)
    elapsed = time.perf_counter() - start
    footer = [(p.dim, p.param, p.op, p.literal) for p in nt.footer]
    ok = (
        nt.col.values == ("1998", "1999", "2000")
        and nt.row.values == ("C1", "C2", "C3")
        and footer
        == [
            ("person", "position", "=", "manager"),
            ("payment", "pay_class", "=", "PC1"),
            ("shop", "branch_desc", "=", "BR1"),
        ]
        and elapsed < 1.0
    )
    report(
        "rotation script structure",
        ok,
        f"columns {nt.col.values}, rows {nt.row.values}, "
        f"{len(nt.footer)} footer lines, {elapsed:.3f}s",
    )


def test_oracle_equivalence_on_random_constellations():
    agreed = 0
    states = 0
    for case in range(200):
        rng = random.Random(777_000 + case)
        ctx = generators.random_context(rng, max_rows=rng.randint(1, 1000))
        walked = [ctx] + [c for _, c in generators.random_walk(rng, ctx, rng.randint(0, 10))]
        case_ok = True
        for state in walked:
            if not state.schema.current_fact.measures:
                continue
            states += 1
            if not matches_oracle(state):
                case_ok = False
        agreed += case_ok
    ok = agreed == 200
    report(
        "oracle equivalence",
        ok,
        f"{agreed}/200 random constellations, {states} states compared",
    )


def test_property_suites():
    suites = (
        ("involutions", properties.check_involutions),
        ("locality", properties.check_locality),
        ("drill/roll inverse", properties.check_drill_roll_inverse),
        ("push/pull round trip", properties.check_push_pull_round_trip),
        ("fact split count", properties.check_t_split),
        ("value split partitions", properties.check_split_partitions),
        ("slice tautology", properties.check_slice_tautology),
        ("sum conservation", properties.check_sum_conservation),
        ("purity", properties.check_purity),
    )
    counts = {name: runner(1000) for name, runner in suites}
    ok = all(count >= 1000 for count in counts.values())
    detail = ", ".join(f"{name} {count}" for name, count in counts.items())
    report("property suites", ok, detail)


def test_parser_round_trip():
    trips = 0
    for case in range(1000):
        rng = random.Random(555_000 + case)
        cmd = generators.random_command(rng)
        if mdql.parse(mdql.print_command(cmd)) == cmd:
            trips += 1
    parsed = sum(1 for text in GRAMMAR_EXAMPLES if mdql.parse(text) is not None)
    ok = trips == 1000 and parsed == len(GRAMMAR_EXAMPLES)
    report(
        "parser round trip",
        ok,
        f"{trips}/1000 ASTs, {parsed}/{len(GRAMMAR_EXAMPLES)} grammar examples",
    )


def test_sql_emission_agreement(channalyse):
    from constel.algebra import (
        combine,
        d_rotate,
        drill_down,
        f_rotate,
        h_rotate,
        pull,
        push,
        roll_up,
        split,
        switch,
        t_split,
    )

    schema, store = channalyse
    ctx0 = initial_context(schema, store)
    table1 = ctx0
    for p in SLICES:
        table1 = slice_ctx(table1, p.dim, p)
    golden = (FIXTURE_DIR / "table1.sql").read_text(encoding="utf-8")
    golden_ok = emit_query(table1) == golden

    states = [
        ctx0,
        table1,
        d_rotate(ctx0, "sale", "payment", "product"),
        f_rotate(ctx0, "sale", "purchase"),
        h_rotate(ctx0, "shop", "h_shop_channel", "h_shop_zone"),
        drill_down(ctx0, "shop", "shopID"),
        roll_up(ctx0, "payment", "all"),
        switch(table1, "shop", "branch_desc", "BR1", "BR4"),
        slice_ctx(ctx0, "shop", Predicate("shop", "branch_desc", "in", ("BR1", "BR3"))),
        slice_ctx(ctx0, "date", Predicate("date", "year", ">=", 1999)),
        push(ctx0, "product", "categ", "sale"),
        pull(ctx0, "sale", "quantity", "person"),
    ]
    states += t_split(ctx0)
    pieces = split(t_split(ctx0)[0], "product", "categ")
    states += pieces
    states.append(combine("union", pieces[0], pieces[1]))
    for state in states:
        assert_agrees(state)
    report(
        "sql emission",
        golden_ok,
        f"golden file equal, relational evaluator agrees on {len(states)} states",
    )


def test_million_row_build_performance():
    doc = {
        "name": "perf",
        "dimensions": [
            {
                "name": "left",
                "key": "lID",
                "attributes": ["lID", "lgrp"],
                "hierarchies": [{"name": "hl", "params": ["lID", "lgrp"]}],
            },
            {
                "name": "right",
                "key": "rID",
                "attributes": ["rID", "rgrp"],
                "hierarchies": [{"name": "hr", "params": ["rID", "rgrp"]}],
            },
        ],
        "facts": [{"name": "flow", "measures": ["m1", "m2"], "dimensions": ["left", "right"]}],
    }
    schema = load_schema(doc)
    members = 200
    dim_rows = lambda key, grp: [
        {key: f"{key}{i}", grp: f"G{i % 20}"} for i in range(members)
    ]
    seed_store = load_records(
        schema,
        {
            "left": dim_rows("lID", "lgrp"),
            "right": dim_rows("rID", "rgrp"),
            "flow": [{"left_id": "lID0", "right_id": "rID0", "m1": "1", "m2": "1"}],
        },
    )
    rng = np.random.default_rng(42)
    nrows = 1_000_000
    fact = FactInstance(
        "flow",
        nrows,
        {
            "left": rng.integers(0, members, nrows, dtype=np.int32),
            "right": rng.integers(0, members, nrows, dtype=np.int32),
        },
        {
            "m1": rng.random(nrows),
            "m2": rng.integers(0, 100, nrows).astype(np.float64),
        },
        {},
    )
    store = InstanceStore.assemble(
        schema, dict(seed_store.dimensions), {"flow": fact}
    )
    ctx = initial_context(schema, store)
    ctx = slice_ctx(ctx, "left", Predicate("left", "lgrp", "!=", "G0"))
    ctx = slice_ctx(
        ctx, "right", Predicate("right", "rgrp", "in", ("G1", "G2", "G3", "G4"))
    )
    start = time.perf_counter()
    nt = ntable.build(ctx)
    elapsed = time.perf_counter() - start
    ok = elapsed < 1.0 and len(nt.cells) == 19 * 4
    report(
        "million row build",
        ok,
        f"{nrows} rows, 2 restricted dimensions, {len(nt.cells)} cells, {elapsed:.3f}s",
    )


def test_service_contract(channalyse):
    schema, store = channalyse
    app = create_app(datasets={"perf": (schema, store)})
    with TestClient(app) as client:
        sid = client.post("/sessions", json={"schema": schema.sname}).json()["id"]
        statuses = []
        for line in ROTATION_SCRIPT.strip().splitlines():
            statuses.append(
                client.post(f"/sessions/{sid}/op", json={"text": line}).status_code
            )
        doc = client.get(f"/sessions/{sid}/ntable").json()
        structure_ok = (
            statuses == [200] * 5
            and doc["colAxis"]["values"] == ["1998", "1999", "2000"]
            and doc["rowAxis"]["values"] == ["C1", "C2", "C3"]
            and len(doc["footer"]) == 3
        )
        rejected = client.post(
            f"/sessions/{sid}/op", json={"text": "SLICE date WHERE yeer = 2000"}
        )
        reject_ok = (
            rejected.status_code == 422
            and rejected.json()["code"] == "UnknownParameter"
            and client.get(f"/sessions/{sid}/ntable").json() == doc
        )
    ok = structure_ok and reject_ok
    report(
        "service contract",
        ok,
        f"op statuses {statuses}, rejected op 422 left the n-table unchanged",
    )
