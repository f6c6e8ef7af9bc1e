"""Schema model: validation rules and positional "current" elements."""

from __future__ import annotations

from constel.model import (
    ConstellationSchema,
    Dimension,
    Fact,
    Hierarchy,
    MeasureDef,
    current_elements,
    default_display_level,
    validate_schema,
)


def _dim(name: str, key: str, levels: list[str]) -> Dimension:
    params = tuple([key] + levels + ["all"])
    return Dimension(
        dname=name,
        attributes=frozenset(params),
        key=key,
        hierarchies=(Hierarchy(f"h_{name}", params),),
    )


def _schema(**overrides) -> ConstellationSchema:
    base = dict(
        sname="s",
        facts=(Fact("f", (MeasureDef("m"),)),),
        dims=(_dim("a", "aid", ["alev"]), _dim("b", "bid", ["blev"])),
        param={"f": ("a", "b")},
    )
    base.update(overrides)
    return ConstellationSchema(**base)


def test_fixture_schema_is_valid(schema):
    report = validate_schema(schema)
    assert report.ok
    assert not report.issues


def test_minimal_schema_is_valid():
    assert validate_schema(_schema()).ok


def test_current_elements_follow_list_order(schema):
    assert current_elements(schema) == (
        "sale", "shop", "payment", "h_shop_channel", "h_payment"
    )


def test_default_display_level_is_below_all(schema):
    assert default_display_level(schema.dimension("shop")) == "branch_desc"
    assert default_display_level(schema.dimension("payment")) == "pay_class"
    assert default_display_level(schema.dimension("date")) == "year"


def errors_of(schema) -> list[str]:
    return [i.message for i in validate_schema(schema).issues if i.severity == "error"]


def test_rejects_empty_fact_list():
    assert any("at least one fact" in m for m in errors_of(_schema(facts=(), param={})))


def test_rejects_empty_measures():
    s = _schema(facts=(Fact("f", ()),))
    assert any("measure list" in m for m in errors_of(s))


def test_rejects_duplicate_measures():
    s = _schema(facts=(Fact("f", (MeasureDef("m"), MeasureDef("m"))),))
    assert any("duplicate measure" in m for m in errors_of(s))


def test_rejects_text_measure_with_sum():
    s = _schema(facts=(Fact("f", (MeasureDef("m", kind="text", agg="sum"),)),))
    assert any("text measures" in m for m in errors_of(s))


def test_rejects_hierarchy_not_starting_at_key():
    bad = Dimension(
        dname="a",
        attributes=frozenset({"aid", "alev", "all"}),
        key="aid",
        hierarchies=(Hierarchy("h_a", ("alev", "all")),),
    )
    s = _schema(dims=(bad, _dim("b", "bid", ["blev"])))
    assert any("begin with the key" in m for m in errors_of(s))


def test_rejects_hierarchy_not_ending_at_all():
    bad = Dimension(
        dname="a",
        attributes=frozenset({"aid", "alev", "all"}),
        key="aid",
        hierarchies=(Hierarchy("h_a", ("aid", "alev")),),
    )
    s = _schema(dims=(bad, _dim("b", "bid", ["blev"])))
    assert any("end with" in m for m in errors_of(s))


def test_rejects_parameter_outside_attributes():
    bad = Dimension(
        dname="a",
        attributes=frozenset({"aid", "all"}),
        key="aid",
        hierarchies=(Hierarchy("h_a", ("aid", "ghost", "all")),),
    )
    s = _schema(dims=(bad, _dim("b", "bid", ["blev"])))
    assert any("not an attribute" in m for m in errors_of(s))


def test_rejects_single_dimension_fact():
    s = _schema(param={"f": ("a",)})
    assert any("two current dimensions" in m for m in errors_of(s))


def test_rejects_undeclared_linked_dimension():
    s = _schema(param={"f": ("a", "ghost")})
    assert any("not declared" in m for m in errors_of(s))


def test_rejects_measure_attribute_collision():
    s = _schema(facts=(Fact("f", (MeasureDef("alev"),)),))
    assert any("collides" in m for m in errors_of(s))


def test_rejects_shared_fact_and_dimension_name():
    s = _schema(
        facts=(Fact("a", (MeasureDef("m"),)),),
        param={"a": ("a", "b")},
    )
    assert any("declared twice" in m for m in errors_of(s))


def test_warns_on_unlinked_dimension():
    s = _schema(dims=(_dim("a", "aid", ["alev"]), _dim("b", "bid", ["blev"]), _dim("c", "cid", ["clev"])))
    report = validate_schema(s)
    assert report.ok
    assert any("not linked" in i.message for i in report.issues if i.severity == "warning")


def test_replace_dimension_preserves_order(schema):
    shop = schema.dimension("shop")
    rotated = Dimension(shop.dname, shop.attributes, shop.key, shop.hierarchies[::-1])
    out = schema.replace_dimension(rotated)
    assert [d.dname for d in out.dims] == [d.dname for d in schema.dims]
    assert out.dimension("shop").current_hierarchy.hname == "h_shop_zone"
