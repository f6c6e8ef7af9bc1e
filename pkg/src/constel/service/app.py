"""HTTP transport over the engine: schemas, sessions, operations.

Datasets (schema + store) are immutable and shared; sessions are in-memory
state local to one process and vanish on restart.  Operations on one session
apply strictly in arrival order: a second writer hitting a busy session gets
409 rather than waiting.  Every error body has the shape
``{code, message, location?}``.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, PlainTextResponse, Response

from .. import mdql, ntable, sql
from ..algebra import AnalysisContext, initial_context
from ..errors import EngineError, LoadError, ParseError
from ..ingest import find_schema_file, load_data, load_dataset, load_schema
from ..model import ConstellationSchema
from ..store import InstanceStore
from .models import (
    HistoryCommand,
    HistoryResponse,
    OpRequest,
    SchemaSummary,
    SchemaUpload,
    SessionHandle,
    SessionRequest,
    SplitsResponse,
    summarize,
)


@dataclass(frozen=True)
class Dataset:
    schema: ConstellationSchema
    store: InstanceStore


@dataclass
class _Slot:
    handle: SessionHandle
    session: mdql.Session
    lock: threading.Lock = field(default_factory=threading.Lock)


class Registry:
    """All server state: loaded datasets and live sessions."""

    def __init__(self) -> None:
        self.datasets: dict[str, Dataset] = {}
        self.sessions: dict[str, _Slot] = {}

    def add_dataset(self, schema: ConstellationSchema, store: InstanceStore) -> None:
        self.datasets[schema.sname] = Dataset(schema, store)


class ApiError(Exception):
    """Carries an HTTP status and the structured error body."""

    def __init__(self, status: int, code: str, message: str):
        self.status = status
        self.code = code
        self.message = message
        super().__init__(message)


def _error_body(code: str, message: str, location: str | None = None) -> dict:
    body = {"code": code, "message": message}
    if location is not None:
        body["location"] = location
    return body


def _engine_error_response(exc: EngineError) -> JSONResponse:
    location: str | None = None
    if isinstance(exc, LoadError):
        location = exc.location
    elif isinstance(exc, ParseError):
        location = f"line {exc.line}, column {exc.column}"
    return JSONResponse(
        status_code=422, content=_error_body(exc.code, str(exc), location)
    )


def load_directory(registry: Registry, directory: str | Path) -> None:
    """Load every dataset under a directory.

    The directory itself, or any immediate subdirectory, counts as a dataset
    when it holds a schema ``*.json`` next to a ``data/`` directory.
    """
    directory = Path(directory)
    candidates = [directory]
    candidates += sorted(p for p in directory.iterdir() if p.is_dir() and p.name != "data")
    found = False
    for cand in candidates:
        if not (cand / "data").is_dir() or not list(cand.glob("*.json")):
            continue
        schema, store = load_dataset(find_schema_file(cand))
        registry.add_dataset(schema, store)
        found = True
    if not found:
        raise LoadError("no dataset (schema .json + data/) found", str(directory))


def create_app(
    data_dir: str | Path | None = None,
    datasets: dict[str, tuple[ConstellationSchema, InstanceStore]] | None = None,
) -> FastAPI:
    """Build the application around a registry of loaded datasets."""
    registry = Registry()
    if datasets:
        for schema, store in datasets.values():
            registry.add_dataset(schema, store)
    if data_dir is not None:
        load_directory(registry, data_dir)

    app = FastAPI(title="constel")
    app.state.registry = registry
    # the pivot page may be opened from disk or a static host, so answer
    # cross-origin requests from anywhere
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(ApiError)
    async def api_error(request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.status, content=_error_body(exc.code, exc.message)
        )

    @app.exception_handler(EngineError)
    async def engine_error(request: Request, exc: EngineError) -> JSONResponse:
        return _engine_error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def invalid_request(
        request: Request, exc: RequestValidationError
    ) -> JSONResponse:
        detail = "; ".join(
            ".".join(str(part) for part in err["loc"]) + ": " + err["msg"]
            for err in exc.errors()
        )
        return JSONResponse(
            status_code=422, content=_error_body("BadRequest", detail)
        )

    def slot_of(sid: str) -> _Slot:
        slot = registry.sessions.get(sid)
        if slot is None:
            raise ApiError(404, "UnknownSession", f"no session {sid!r}")
        return slot

    def context_of(slot: _Slot, ctx: str | None) -> AnalysisContext:
        if ctx is None:
            return slot.session.current
        return mdql.resolve_ref(slot.session, ctx)

    @app.post("/schemas", response_model=SchemaSummary)
    def upload_schema(body: SchemaUpload) -> SchemaSummary:
        schema = load_schema(body.document)
        store = load_data(schema, body.data)
        registry.add_dataset(schema, store)
        return summarize(schema)

    @app.get("/schemas", response_model=list[SchemaSummary])
    def list_schemas() -> list[SchemaSummary]:
        return [summarize(d.schema) for d in registry.datasets.values()]

    @app.post("/sessions", response_model=SessionHandle, status_code=201)
    def create_session(body: SessionRequest) -> SessionHandle:
        dataset = registry.datasets.get(body.schema_name)
        if dataset is None:
            raise ApiError(404, "UnknownSchema", f"no schema {body.schema_name!r}")
        handle = SessionHandle(
            id=uuid.uuid4().hex,
            schema_name=body.schema_name,
            created=datetime.now(timezone.utc).isoformat(),
        )
        initial = initial_context(dataset.schema, dataset.store)
        registry.sessions[handle.id] = _Slot(handle, mdql.Session(initial))
        return handle

    @app.delete("/sessions/{sid}", status_code=204)
    def delete_session(sid: str) -> Response:
        slot_of(sid)
        del registry.sessions[sid]
        return Response(status_code=204)

    @app.get("/sessions/{sid}/ntable")
    def session_ntable(sid: str, ctx: str | None = None) -> dict:
        slot = slot_of(sid)
        return ntable.encode(ntable.build(context_of(slot, ctx)))

    def run_command(slot: _Slot, cmd: mdql.Command) -> dict:
        # build before committing, so a result that cannot render rejects
        # the whole operation and the session stays put
        if not slot.lock.acquire(blocking=False):
            raise ApiError(409, "SessionBusy", "another operation is in flight")
        try:
            session = mdql.apply(slot.session, cmd)
            doc = ntable.encode(ntable.build(session.current))
            slot.session = session
            return doc
        finally:
            slot.lock.release()

    @app.post("/sessions/{sid}/op")
    def session_op(sid: str, body: OpRequest) -> dict:
        slot = slot_of(sid)
        if (body.text is None) == (body.command is None):
            raise ApiError(422, "BadRequest", "provide exactly one of text or command")
        if body.text is not None:
            cmd = mdql.parse(body.text)
        else:
            assert body.command is not None
            cmd = mdql.decode_command(body.command)
        return run_command(slot, cmd)

    @app.post("/sessions/{sid}/undo")
    def session_undo(sid: str) -> dict:
        return run_command(slot_of(sid), mdql.Undo())

    @app.get("/sessions/{sid}/sql", response_class=PlainTextResponse)
    def session_sql(sid: str, ctx: str | None = None) -> str:
        slot = slot_of(sid)
        return sql.emit_query(context_of(slot, ctx))

    @app.get("/sessions/{sid}/history", response_model=HistoryResponse)
    def session_history(sid: str) -> HistoryResponse:
        slot = slot_of(sid)
        return HistoryResponse(
            commands=[
                HistoryCommand(
                    text=mdql.print_command(c), command=mdql.encode_command(c)
                )
                for c in slot.session.commands
            ]
        )

    @app.get("/sessions/{sid}/splits", response_model=SplitsResponse)
    def session_splits(sid: str) -> SplitsResponse:
        slot = slot_of(sid)
        return SplitsResponse(
            splits=[name for name, _ in slot.session.split_results or ()]
        )

    return app
