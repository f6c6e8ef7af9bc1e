"""Textual command language for driving analysis sessions.

One command per line.  Keywords are case-insensitive, identifiers are
case-sensitive, string literals are double-quoted, numbers are plain
decimal.  ``parse`` builds a Command AST without touching any schema;
name resolution happens in ``apply``, so a well-formed command over
unknown names parses fine and fails later with an operator error.

``print_command`` emits the canonical spelling; ``parse`` of that text
returns an equal AST.  A ``Session`` folds commands over an immutable
context, keeping enough history to undo and to replay.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import ClassVar, Iterable

from . import algebra
from . import restrictions as rst
from .algebra import AnalysisContext
from .errors import NothingToUndo, SameDimension, UnknownContext, ParseError

Span = tuple[int, int, int]  # line, first column, one past last column

KEYWORDS = frozenset(
    """
    DISPLAY ON DROTATE WITH HROTATE TO FROTATE SWITCH VALUES DRILLDOWN
    ROLLUP PUSH INTO PULL SLICE WHERE AND IN TSPLIT SPLIT COMBINE UNION
    INTERSECT DIFFERENCE SHOW EXPORT UNDO
    """.split()
)

COMMAND_KEYWORDS = (
    "DISPLAY", "DROTATE", "HROTATE", "FROTATE", "SWITCH", "DRILLDOWN",
    "ROLLUP", "PUSH", "PULL", "SLICE", "TSPLIT", "SPLIT", "COMBINE",
    "SHOW", "EXPORT", "UNDO",
)


# ---- command AST ---------------------------------------------------------


@dataclass(frozen=True)
class Command:
    """Base of all parsed commands; span is excluded from equality."""

    variant: ClassVar[str] = ""
    span: Span | None = field(default=None, compare=False, repr=False, kw_only=True)


@dataclass(frozen=True)
class Display(Command):
    """Composite: bring a fact to the front, then up to two dimensions."""

    variant: ClassVar[str] = "display"
    fact: str
    dims: tuple[str, ...] = ()


@dataclass(frozen=True)
class DRotate(Command):
    variant: ClassVar[str] = "drotate"
    fact: str
    d_a: str
    d_b: str


@dataclass(frozen=True)
class HRotate(Command):
    variant: ClassVar[str] = "hrotate"
    dim: str
    hier: str


@dataclass(frozen=True)
class FRotate(Command):
    variant: ClassVar[str] = "frotate"
    f_a: str
    f_b: str


@dataclass(frozen=True)
class Switch(Command):
    variant: ClassVar[str] = "switch"
    dim: str
    p: str
    v1: rst.Literal
    v2: rst.Literal


@dataclass(frozen=True)
class DrillDown(Command):
    variant: ClassVar[str] = "drilldown"
    dim: str
    p: str


@dataclass(frozen=True)
class RollUp(Command):
    variant: ClassVar[str] = "rollup"
    dim: str
    p: str


@dataclass(frozen=True)
class Push(Command):
    variant: ClassVar[str] = "push"
    dim: str
    p: str
    fact: str


@dataclass(frozen=True)
class Pull(Command):
    variant: ClassVar[str] = "pull"
    fact: str
    m: str
    dim: str


@dataclass(frozen=True)
class Slice(Command):
    variant: ClassVar[str] = "slice"
    dim: str
    preds: tuple[rst.Predicate, ...]


@dataclass(frozen=True)
class TSplit(Command):
    variant: ClassVar[str] = "tsplit"


@dataclass(frozen=True)
class Split(Command):
    variant: ClassVar[str] = "split"
    dim: str
    p: str


@dataclass(frozen=True)
class Combine(Command):
    """kind is union, intersect, or difference; refs name split results."""

    variant: ClassVar[str] = "combine"
    kind: str
    ref_a: str
    ref_b: str


@dataclass(frozen=True)
class Show(Command):
    variant: ClassVar[str] = "show"


@dataclass(frozen=True)
class Export(Command):
    variant: ClassVar[str] = "export"
    path: str


@dataclass(frozen=True)
class Undo(Command):
    variant: ClassVar[str] = "undo"


_VARIANTS = {
    cls.variant: cls
    for cls in (
        Display, DRotate, HRotate, FRotate, Switch, DrillDown, RollUp,
        Push, Pull, Slice, TSplit, Split, Combine, Show, Export, Undo,
    )
}


# ---- lexer ---------------------------------------------------------------


@dataclass(frozen=True)
class _Token:
    kind: str  # kw | ident | string | number | op | punct | eof
    value: object
    line: int
    col: int  # 1-based
    text: str

    @property
    def end(self) -> int:
        return self.col + len(self.text)


_PUNCT = ":.,()"
_OPS = ("!=", "<=", ">=", "=", "<", ">", "≠", "≤", "≥")


def _lex(text: str, line: int) -> list[_Token]:
    toks: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r":
            i += 1
            continue
        if c == "#":
            break
        col = i + 1
        if c == '"':
            j, out = i + 1, []
            while j < n and text[j] != '"':
                if text[j] == "\\":
                    if j + 1 >= n or text[j + 1] not in '\\"':
                        raise ParseError("bad escape in string literal", line, j + 1)
                    j += 1
                out.append(text[j])
                j += 1
            if j >= n:
                raise ParseError("unterminated string literal", line, col)
            toks.append(_Token("string", "".join(out), line, col, text[i : j + 1]))
            i = j + 1
            continue
        if c.isdigit() or (c == "-" and i + 1 < n and text[i + 1].isdigit()):
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            if j < n and text[j] == "." and j + 1 < n and text[j + 1].isdigit():
                j += 1
                while j < n and text[j].isdigit():
                    j += 1
                value: object = float(text[i:j])
            else:
                value = int(text[i:j])
            toks.append(_Token("number", value, line, col, text[i:j]))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i + 1
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            if word.upper() in KEYWORDS:
                toks.append(_Token("kw", word.upper(), line, col, word))
            else:
                toks.append(_Token("ident", word, line, col, word))
            i = j
            continue
        for op in _OPS:
            if text.startswith(op, i):
                toks.append(_Token("op", rst.canonical_op(op), line, col, op))
                i += len(op)
                break
        else:
            if c in _PUNCT:
                toks.append(_Token("punct", c, line, col, c))
                i += 1
            else:
                raise ParseError(f"unexpected character {c!r}", line, col)
    toks.append(_Token("eof", None, line, n + 1, ""))
    return toks


# ---- parser --------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[_Token]):
        self.toks = tokens
        self.i = 0

    def peek(self) -> _Token:
        return self.toks[self.i]

    def take(self) -> _Token:
        tok = self.toks[self.i]
        if tok.kind != "eof":
            self.i += 1
        return tok

    def fail(self, expected: tuple[str, ...]) -> ParseError:
        tok = self.peek()
        got = "end of line" if tok.kind == "eof" else repr(tok.text)
        want = " or ".join(expected)
        return ParseError(f"expected {want}, got {got}", tok.line, tok.col, expected)

    def keyword(self, *words: str) -> str:
        tok = self.peek()
        if tok.kind == "kw" and tok.value in words:
            self.take()
            return str(tok.value)
        raise self.fail(words)

    def punct(self, ch: str) -> None:
        tok = self.peek()
        if tok.kind == "punct" and tok.value == ch:
            self.take()
            return
        raise self.fail((repr(ch),))

    def ident(self, what: str = "identifier") -> str:
        tok = self.peek()
        if tok.kind == "ident":
            self.take()
            return str(tok.value)
        raise self.fail((what,))

    def literal(self) -> rst.Literal:
        tok = self.peek()
        if tok.kind in ("string", "number"):
            self.take()
            return tok.value  # type: ignore[return-value]
        raise self.fail(("string literal", "number"))

    def ref(self) -> str:
        tok = self.peek()
        if tok.kind in ("ident", "string"):
            self.take()
            return str(tok.value)
        raise self.fail(("context name",))


def _parse_predicate(ps: _Parser, dim: str) -> rst.Predicate:
    param = ps.ident("parameter")
    tok = ps.peek()
    if tok.kind == "kw" and tok.value == "IN":
        ps.take()
        ps.punct("(")
        lits = [ps.literal()]
        while ps.peek().kind == "punct" and ps.peek().value == ",":
            ps.take()
            lits.append(ps.literal())
        ps.punct(")")
        return rst.Predicate(dim, param, "in", tuple(lits))
    if tok.kind == "op":
        ps.take()
        return rst.Predicate(dim, param, str(tok.value), ps.literal())
    raise ps.fail(("comparator", "IN"))


def _parse_command(ps: _Parser) -> Command:
    head = ps.peek()
    kw = ps.keyword(*COMMAND_KEYWORDS)
    if kw == "DISPLAY":
        fact = ps.ident("fact")
        dims: tuple[str, ...] = ()
        if ps.peek().kind == "kw" and ps.peek().value == "ON":
            ps.take()
            dims = (ps.ident("dimension"),)
            if ps.peek().kind == "punct" and ps.peek().value == ",":
                ps.take()
                dims += (ps.ident("dimension"),)
        cmd: Command = Display(fact, dims)
    elif kw == "DROTATE":
        fact = ps.ident("fact")
        ps.punct(":")
        d_a = ps.ident("dimension")
        ps.keyword("WITH")
        cmd = DRotate(fact, d_a, ps.ident("dimension"))
    elif kw == "HROTATE":
        dim = ps.ident("dimension")
        ps.keyword("TO")
        cmd = HRotate(dim, ps.ident("hierarchy"))
    elif kw == "FROTATE":
        f_a = ps.ident("fact")
        ps.keyword("WITH")
        cmd = FRotate(f_a, ps.ident("fact"))
    elif kw == "SWITCH":
        dim = ps.ident("dimension")
        ps.punct(".")
        p = ps.ident("parameter")
        ps.keyword("VALUES")
        v1 = ps.literal()
        ps.punct(",")
        cmd = Switch(dim, p, v1, ps.literal())
    elif kw == "DRILLDOWN":
        dim = ps.ident("dimension")
        ps.keyword("TO")
        cmd = DrillDown(dim, ps.ident("parameter"))
    elif kw == "ROLLUP":
        dim = ps.ident("dimension")
        ps.keyword("TO")
        cmd = RollUp(dim, ps.ident("parameter"))
    elif kw == "PUSH":
        dim = ps.ident("dimension")
        ps.punct(".")
        p = ps.ident("parameter")
        ps.keyword("INTO")
        cmd = Push(dim, p, ps.ident("fact"))
    elif kw == "PULL":
        fact = ps.ident("fact")
        ps.punct(".")
        m = ps.ident("measure")
        ps.keyword("INTO")
        cmd = Pull(fact, m, ps.ident("dimension"))
    elif kw == "SLICE":
        dim = ps.ident("dimension")
        ps.keyword("WHERE")
        preds = [_parse_predicate(ps, dim)]
        while ps.peek().kind == "kw" and ps.peek().value == "AND":
            ps.take()
            preds.append(_parse_predicate(ps, dim))
        cmd = Slice(dim, tuple(preds))
    elif kw == "TSPLIT":
        cmd = TSplit()
    elif kw == "SPLIT":
        dim = ps.ident("dimension")
        ps.punct(".")
        cmd = Split(dim, ps.ident("parameter"))
    elif kw == "COMBINE":
        kind = ps.keyword("UNION", "INTERSECT", "DIFFERENCE").lower()
        ref_a = ps.ref()
        ps.punct(",")
        cmd = Combine(kind, ref_a, ps.ref())
    elif kw == "SHOW":
        cmd = Show()
    elif kw == "EXPORT":
        tok = ps.peek()
        if tok.kind != "string":
            raise ps.fail(("file path string",))
        ps.take()
        cmd = Export(str(tok.value))
    else:  # UNDO
        cmd = Undo()
    end = ps.toks[ps.i - 1].end if ps.i else head.end
    return replace(cmd, span=(head.line, head.col, end))


def parse(text: str, line: int = 1) -> Command:
    """Parse one command; raises ParseError with position and expectations."""
    ps = _Parser(_lex(text, line))
    cmd = _parse_command(ps)
    if ps.peek().kind != "eof":
        raise ps.fail(("end of line",))
    return cmd


def parse_script(text: str) -> list[Command]:
    """Parse a command-per-line script; blank and comment lines are skipped."""
    commands = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        toks = _lex(raw, lineno)
        if toks[0].kind == "eof":
            continue
        ps = _Parser(toks)
        cmd = _parse_command(ps)
        if ps.peek().kind != "eof":
            raise ps.fail(("end of line",))
        commands.append(cmd)
    return commands


# ---- printer -------------------------------------------------------------


_IDENT_OK = frozenset("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_")


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _print_literal(lit: rst.Literal) -> str:
    if isinstance(lit, str):
        return _quote(lit)
    if isinstance(lit, int):
        return str(lit)
    return repr(lit)


def _print_ref(name: str) -> str:
    plain = (
        name
        and not name[0].isdigit()
        and set(name) <= _IDENT_OK
        and name.upper() not in KEYWORDS
    )
    return name if plain else _quote(name)


def _print_predicate(p: rst.Predicate) -> str:
    if p.op == "in":
        lits = p.literal if isinstance(p.literal, tuple) else (p.literal,)
        return f"{p.param} IN ({', '.join(_print_literal(x) for x in lits)})"
    return f"{p.param} {p.op} {_print_literal(p.literal)}"


def print_command(cmd: Command) -> str:
    """Canonical text form; parsing it back yields an equal AST."""
    if isinstance(cmd, Display):
        tail = f" ON {', '.join(cmd.dims)}" if cmd.dims else ""
        return f"DISPLAY {cmd.fact}{tail}"
    if isinstance(cmd, DRotate):
        return f"DROTATE {cmd.fact}: {cmd.d_a} WITH {cmd.d_b}"
    if isinstance(cmd, HRotate):
        return f"HROTATE {cmd.dim} TO {cmd.hier}"
    if isinstance(cmd, FRotate):
        return f"FROTATE {cmd.f_a} WITH {cmd.f_b}"
    if isinstance(cmd, Switch):
        return (
            f"SWITCH {cmd.dim}.{cmd.p} VALUES "
            f"{_print_literal(cmd.v1)}, {_print_literal(cmd.v2)}"
        )
    if isinstance(cmd, DrillDown):
        return f"DRILLDOWN {cmd.dim} TO {cmd.p}"
    if isinstance(cmd, RollUp):
        return f"ROLLUP {cmd.dim} TO {cmd.p}"
    if isinstance(cmd, Push):
        return f"PUSH {cmd.dim}.{cmd.p} INTO {cmd.fact}"
    if isinstance(cmd, Pull):
        return f"PULL {cmd.fact}.{cmd.m} INTO {cmd.dim}"
    if isinstance(cmd, Slice):
        preds = " AND ".join(_print_predicate(p) for p in cmd.preds)
        return f"SLICE {cmd.dim} WHERE {preds}"
    if isinstance(cmd, TSplit):
        return "TSPLIT"
    if isinstance(cmd, Split):
        return f"SPLIT {cmd.dim}.{cmd.p}"
    if isinstance(cmd, Combine):
        return (
            f"COMBINE {cmd.kind.upper()} "
            f"{_print_ref(cmd.ref_a)}, {_print_ref(cmd.ref_b)}"
        )
    if isinstance(cmd, Show):
        return "SHOW"
    if isinstance(cmd, Export):
        return f"EXPORT {_quote(cmd.path)}"
    if isinstance(cmd, Undo):
        return "UNDO"
    raise TypeError(f"not a command: {cmd!r}")


# ---- interchange ---------------------------------------------------------


def encode_command(cmd: Command) -> dict:
    """JSON-ready document; decode_command inverts it."""
    doc: dict = {"variant": cmd.variant}
    for f in fields(cmd):
        if f.name == "span":
            continue
        value = getattr(cmd, f.name)
        if f.name == "preds":
            value = [
                {
                    "dim": p.dim,
                    "param": p.param,
                    "op": p.op,
                    "literal": list(p.literal) if isinstance(p.literal, tuple) else p.literal,
                }
                for p in value
            ]
        elif isinstance(value, tuple):
            value = list(value)
        doc[f.name] = value
    return doc


def decode_command(doc: dict) -> Command:
    if not isinstance(doc, dict):
        raise ParseError("command document must be an object", 0, 0)
    variant = doc.get("variant")
    cls = _VARIANTS.get(variant)
    if cls is None:
        raise ParseError(f"unknown command variant {variant!r}", 0, 0)
    kwargs = {}
    try:
        for f in fields(cls):
            if f.name == "span":
                continue
            if f.name not in doc:
                if f.name == "dims":
                    continue
                raise ParseError(f"{variant}: missing field {f.name!r}", 0, 0)
            value = doc[f.name]
            if f.name == "preds":
                value = tuple(
                    rst.Predicate(
                        p["dim"],
                        p["param"],
                        p["op"],
                        tuple(p["literal"]) if isinstance(p["literal"], list) else p["literal"],
                    )
                    for p in value
                )
            elif isinstance(value, list):
                value = tuple(value)
            kwargs[f.name] = value
        return cls(**kwargs)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"{variant}: malformed command document ({exc})", 0, 0) from None


# ---- session -------------------------------------------------------------


@dataclass(frozen=True)
class HistoryEntry:
    """State after one command: the context and the live split results."""

    command: Command
    context: AnalysisContext
    splits: tuple[tuple[str, AnalysisContext], ...] | None


@dataclass(frozen=True)
class Session:
    """Immutable fold of commands over an initial context.

    ``current`` always equals the result of replaying ``history`` from
    ``initial``; undo pops the last entry, restoring both the context
    and the split results in force before it.
    """

    initial: AnalysisContext
    history: tuple[HistoryEntry, ...] = ()

    @property
    def current(self) -> AnalysisContext:
        return self.history[-1].context if self.history else self.initial

    @property
    def split_results(self) -> tuple[tuple[str, AnalysisContext], ...] | None:
        return self.history[-1].splits if self.history else None

    @property
    def commands(self) -> tuple[Command, ...]:
        return tuple(e.command for e in self.history)


def resolve_ref(session: Session, name: str) -> AnalysisContext:
    """The context a name denotes: a split result, or "current"."""
    for label, ctx in session.split_results or ():
        if label == name:
            return ctx
    if name == "current":
        return session.current
    known = ", ".join(label for label, _ in session.split_results or ())
    raise UnknownContext(
        f"no context named {name!r}" + (f"; split results: {known}" if known else "")
    )


def _apply_display(ctx: AnalysisContext, cmd: Display) -> AnalysisContext:
    if len(cmd.dims) == 2 and cmd.dims[0] == cmd.dims[1]:
        raise SameDimension(f"DISPLAY lists {cmd.dims[0]!r} twice")
    current = ctx.schema.current_fact.fname
    if cmd.fact != current:
        ctx = algebra.f_rotate(ctx, current, cmd.fact)
    for pos, dim in enumerate(cmd.dims):
        linked = ctx.schema.param_of(cmd.fact)
        if dim != linked[pos]:
            ctx = algebra.d_rotate(ctx, cmd.fact, linked[pos], dim)
    return ctx


def apply(session: Session, cmd: Command) -> Session:
    """Dispatch one command; on any error the session is returned untouched.

    show and export have no state effect here: rendering and file output
    belong to the caller.  undo pops one history entry; split commands
    record their pieces and make the first one current.
    """
    if isinstance(cmd, (Show, Export)):
        return session
    if isinstance(cmd, Undo):
        if not session.history:
            raise NothingToUndo("history is empty")
        return replace(session, history=session.history[:-1])

    ctx = session.current
    splits = session.split_results
    if isinstance(cmd, Display):
        ctx = _apply_display(ctx, cmd)
    elif isinstance(cmd, DRotate):
        ctx = algebra.d_rotate(ctx, cmd.fact, cmd.d_a, cmd.d_b)
    elif isinstance(cmd, HRotate):
        d = ctx.schema.dimension(cmd.dim)
        current = d.current_hierarchy.hname if d is not None else cmd.hier
        ctx = algebra.h_rotate(ctx, cmd.dim, current, cmd.hier)
    elif isinstance(cmd, FRotate):
        ctx = algebra.f_rotate(ctx, cmd.f_a, cmd.f_b)
    elif isinstance(cmd, Switch):
        v1 = rst.canonical_literal(cmd.v1)
        v2 = rst.canonical_literal(cmd.v2)
        ctx = algebra.switch(ctx, cmd.dim, cmd.p, v1, v2)
    elif isinstance(cmd, DrillDown):
        ctx = algebra.drill_down(ctx, cmd.dim, cmd.p)
    elif isinstance(cmd, RollUp):
        ctx = algebra.roll_up(ctx, cmd.dim, cmd.p)
    elif isinstance(cmd, Push):
        ctx = algebra.push(ctx, cmd.dim, cmd.p, cmd.fact)
    elif isinstance(cmd, Pull):
        ctx = algebra.pull(ctx, cmd.fact, cmd.m, cmd.dim)
    elif isinstance(cmd, Slice):
        for pred in cmd.preds:
            ctx = algebra.slice_ctx(ctx, cmd.dim, pred)
    elif isinstance(cmd, TSplit):
        parts = algebra.t_split(ctx)
        splits = tuple((p.schema.current_fact.fname, p) for p in parts)
        ctx = parts[0]
    elif isinstance(cmd, Split):
        parts = algebra.split(ctx, cmd.dim, cmd.p)
        values = ctx.store.parameter_domain(cmd.dim, cmd.p)
        splits = tuple(zip(values, parts))
        ctx = parts[0]
    elif isinstance(cmd, Combine):
        ctx_a = resolve_ref(session, cmd.ref_a)
        ctx_b = resolve_ref(session, cmd.ref_b)
        ctx = algebra.combine(cmd.kind, ctx_a, ctx_b)
    else:
        raise TypeError(f"not a command: {cmd!r}")
    entry = HistoryEntry(cmd, ctx, splits)
    return replace(session, history=session.history + (entry,))


def replay(initial: AnalysisContext, commands: Iterable[Command]) -> Session:
    """Fold commands over a fresh session; used to check history integrity."""
    session = Session(initial)
    for cmd in commands:
        session = apply(session, cmd)
    return session
