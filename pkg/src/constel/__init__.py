"""In-memory constellation OLAP engine.

Facts over shared multi-hierarchy dimensions, a rotation and navigation
algebra over analysis contexts, n-table display, a textual command
language, SQL emission for a star encoding, and an HTTP service.
"""

from .algebra import (
    PULL_EMPTY,
    AnalysisContext,
    combine,
    d_rotate,
    drill_down,
    f_rotate,
    h_rotate,
    initial_context,
    pull,
    push,
    roll_up,
    slice_ctx,
    split,
    switch,
    t_split,
)
from .errors import EngineError, LoadError, OperatorError, ParseError
from .ingest import load_data, load_dataset, load_records, load_schema
from .mdql import Session, apply, parse, parse_script, print_command, replay
from .model import (
    ALL_LEVEL,
    ALL_VALUE,
    ConstellationSchema,
    Dimension,
    Fact,
    Hierarchy,
    MeasureDef,
    validate_schema,
)
from .ntable import NTable, build, decode, encode, render_text
from .restrictions import Predicate
from .sql import emit_ddl, emit_query
from .store import InstanceStore

__version__ = "0.1.0"

__all__ = [
    "ALL_LEVEL",
    "ALL_VALUE",
    "AnalysisContext",
    "ConstellationSchema",
    "Dimension",
    "EngineError",
    "Fact",
    "Hierarchy",
    "InstanceStore",
    "LoadError",
    "MeasureDef",
    "NTable",
    "OperatorError",
    "PULL_EMPTY",
    "ParseError",
    "Predicate",
    "Session",
    "apply",
    "build",
    "combine",
    "d_rotate",
    "decode",
    "drill_down",
    "emit_ddl",
    "emit_query",
    "encode",
    "f_rotate",
    "h_rotate",
    "initial_context",
    "load_data",
    "load_dataset",
    "load_records",
    "load_schema",
    "parse",
    "parse_script",
    "print_command",
    "pull",
    "push",
    "render_text",
    "replay",
    "roll_up",
    "slice_ctx",
    "split",
    "switch",
    "t_split",
    "validate_schema",
]
