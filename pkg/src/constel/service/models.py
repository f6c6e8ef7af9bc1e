"""Request and response bodies of the HTTP API.

The n-table itself travels as the plain interchange document (see
ntable.encode); these models cover everything around it: schema
summaries, session handles, and operation requests.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from ..model import ALL_LEVEL, ConstellationSchema


class MeasureSummary(BaseModel):
    name: str
    kind: str
    agg: str


class HierarchySummary(BaseModel):
    name: str
    params: list[str]


class DimensionSummary(BaseModel):
    name: str
    key: str
    attributes: list[str]
    hierarchies: list[HierarchySummary]


class FactSummary(BaseModel):
    name: str
    measures: list[MeasureSummary]
    dimensions: list[str]


class SchemaSummary(BaseModel):
    """Static shape of one loaded dataset, enough to derive every affordance."""

    name: str
    facts: list[FactSummary]
    dimensions: list[DimensionSummary]


def summarize(schema: ConstellationSchema) -> SchemaSummary:
    """Describe a schema for clients.

    Hierarchy parameter lists keep their trailing ``all`` (a legal roll-up
    target); the attribute list drops it.
    """
    return SchemaSummary(
        name=schema.sname,
        facts=[
            FactSummary(
                name=f.fname,
                measures=[
                    MeasureSummary(name=m.name, kind=m.kind, agg=m.agg)
                    for m in f.measures
                ],
                dimensions=list(schema.param_of(f.fname)),
            )
            for f in schema.facts
        ],
        dimensions=[
            DimensionSummary(
                name=d.dname,
                key=d.key,
                attributes=sorted(d.attributes - {ALL_LEVEL}),
                hierarchies=[
                    HierarchySummary(name=h.hname, params=list(h.params))
                    for h in d.hierarchies
                ],
            )
            for d in schema.dims
        ],
    )


class SchemaUpload(BaseModel):
    """A schema document plus one CSV text per dimension and per fact."""

    document: dict
    data: dict[str, str]


class SessionRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    schema_name: str = Field(alias="schema")


class SessionHandle(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    id: str
    schema_name: str = Field(alias="schema")
    created: str


class OpRequest(BaseModel):
    """One command, either as MDQL text or as an encoded command document."""

    text: str | None = None
    command: dict | None = None


class HistoryCommand(BaseModel):
    text: str
    command: dict


class HistoryResponse(BaseModel):
    commands: list[HistoryCommand]


class SplitsResponse(BaseModel):
    splits: list[str]
