"""Command line entry points: validate, load, run, repl, sql, serve.

Exit codes: 0 success, 1 load or validation failure, 2 parse error,
3 rejected operation.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import NoReturn

import click

from . import __version__, mdql, ntable
from .algebra import initial_context
from .errors import EngineError, OperatorError, ParseError
from .ingest import find_schema_file, load_data, load_dataset, load_schema
from .sql import emit_ddl, emit_query

EXIT_LOAD = 1
EXIT_PARSE = 2
EXIT_OPERATOR = 3


def _exit_code(exc: EngineError) -> int:
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, OperatorError):
        return EXIT_OPERATOR
    return EXIT_LOAD


def _abort(exc: EngineError) -> NoReturn:
    click.echo(f"error: {exc}", err=True)
    sys.exit(_exit_code(exc))


def _open_dataset(data_dir: str):
    return load_dataset(find_schema_file(data_dir))


data_option = click.option(
    "--data",
    "data_dir",
    envvar="OLAP_DATA_DIR",
    required=True,
    type=click.Path(exists=True, file_okay=False),
    help="Dataset directory: one schema .json next to a data/ directory "
    "(defaults to $OLAP_DATA_DIR).",
)


@click.group()
@click.version_option(__version__, prog_name="constel")
def main() -> None:
    """Constellation analysis from the terminal."""


@main.command()
@click.argument("schema_file", type=click.Path(exists=True, dir_okay=False))
def validate(schema_file: str) -> None:
    """Check a schema document."""
    try:
        schema = load_schema(schema_file)
    except EngineError as exc:
        _abort(exc)
    click.echo(
        f"{schema.sname}: {len(schema.facts)} facts, {len(schema.dims)} dimensions"
    )


@main.command()
@click.argument("schema_file", type=click.Path(exists=True, dir_okay=False))
@click.argument("data_dir", type=click.Path(exists=True, file_okay=False))
def load(schema_file: str, data_dir: str) -> None:
    """Load a schema plus one CSV per dimension and per fact; report sizes."""
    try:
        schema = load_schema(schema_file)
        files = {
            name: Path(data_dir) / f"{name}.csv"
            for name in [d.dname for d in schema.dims] + [f.fname for f in schema.facts]
        }
        store = load_data(schema, files)
    except EngineError as exc:
        _abort(exc)
    for dim in schema.dims:
        click.echo(f"dimension {dim.dname}: {store.dimensions[dim.dname].size} members")
    for fact in schema.facts:
        click.echo(f"fact {fact.fname}: {store.facts[fact.fname].nrows} rows")


def _step(session: mdql.Session, cmd: mdql.Command) -> mdql.Session:
    """Apply one command; show and export do their output here."""
    if isinstance(cmd, mdql.Show):
        click.echo(ntable.render_text(ntable.build(session.current)))
        return session
    if isinstance(cmd, mdql.Export):
        doc = ntable.encode(ntable.build(session.current))
        Path(cmd.path).write_text(
            json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
        )
        return session
    return mdql.apply(session, cmd)


@main.command()
@click.argument("script", type=click.Path(exists=True, dir_okay=False))
@data_option
def run(script: str, data_dir: str) -> None:
    """Replay a command script and print the final n-table."""
    try:
        schema, store = _open_dataset(data_dir)
        commands = mdql.parse_script(Path(script).read_text(encoding="utf-8"))
    except EngineError as exc:
        _abort(exc)
    session = mdql.Session(initial_context(schema, store))
    try:
        for cmd in commands:
            session = _step(session, cmd)
        click.echo(ntable.render_text(ntable.build(session.current)))
    except EngineError as exc:
        _abort(exc)


@main.command()
@data_option
def repl(data_dir: str) -> None:
    """Interactive session; each state-changing command prints the n-table."""
    try:
        schema, store = _open_dataset(data_dir)
    except EngineError as exc:
        _abort(exc)
    session = mdql.Session(initial_context(schema, store))
    click.echo(f"{schema.sname} loaded; one command per line, Ctrl-D quits")
    while True:
        try:
            line = input("mdql> ")
        except (EOFError, KeyboardInterrupt):
            click.echo("")
            return
        if not line.strip():
            continue
        try:
            cmd = mdql.parse(line)
            new = _step(session, cmd)
            if new is not session:
                session = new
                click.echo(ntable.render_text(ntable.build(session.current)))
                if session.split_results:
                    names = ", ".join(name for name, _ in session.split_results)
                    click.echo(f"splits: {names}")
        except EngineError as exc:
            click.echo(f"error: {exc}", err=True)


@main.command()
@click.argument("script", required=False, type=click.Path(exists=True, dir_okay=False))
@data_option
@click.option("--ddl", is_flag=True, help="Emit the CREATE TABLE statements first.")
def sql(script: str | None, data_dir: str, ddl: bool) -> None:
    """Print the SQL query for the state a script reaches (or the initial one)."""
    try:
        schema, store = _open_dataset(data_dir)
        session = mdql.Session(initial_context(schema, store))
        if script is not None:
            for cmd in mdql.parse_script(Path(script).read_text(encoding="utf-8")):
                if not isinstance(cmd, (mdql.Show, mdql.Export)):
                    session = mdql.apply(session, cmd)
        if ddl:
            click.echo(emit_ddl(schema))
        click.echo(emit_query(session.current), nl=False)
    except EngineError as exc:
        _abort(exc)


@main.command()
@click.option("--port", default=8000, show_default=True, type=int)
@click.option("--host", default="127.0.0.1", show_default=True)
@data_option
def serve(port: int, host: str, data_dir: str) -> None:
    """Serve the HTTP API over every dataset found under the data directory."""
    import uvicorn

    from .service import create_app

    try:
        app = create_app(data_dir=data_dir)
    except EngineError as exc:
        _abort(exc)
    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
