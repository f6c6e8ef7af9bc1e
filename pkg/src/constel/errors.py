"""Exception types shared across the engine.

Every error carries a stable machine-readable ``code`` (the class name) so the
HTTP service and CLI can report failures without string matching.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine failures."""

    @property
    def code(self) -> str:
        return type(self).__name__


class LoadError(EngineError):
    """Schema or data file could not be loaded; message names the location."""

    def __init__(self, message: str, location: str | None = None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)


class ParseError(EngineError):
    """MDQL text rejected; carries position and the expected-token set."""

    def __init__(self, message: str, line: int, column: int, expected: tuple[str, ...] = ()):
        self.line = line
        self.column = column
        self.expected = expected
        super().__init__(f"line {line}, column {column}: {message}")


# ---- operator errors ----------------------------------------------------


class OperatorError(EngineError):
    """An algebra operation rejected its arguments; session state is unchanged."""


class UnknownFact(OperatorError):
    pass


class UnknownDimension(OperatorError):
    pass


class UnknownHierarchy(OperatorError):
    pass


class UnknownParameter(OperatorError):
    pass


class UnknownMeasure(OperatorError):
    pass


class UnknownValue(OperatorError):
    pass


class UnknownContext(OperatorError):
    pass


class SameDimension(OperatorError):
    pass


class SameHierarchy(OperatorError):
    pass


class SameFact(OperatorError):
    pass


class NotLinked(OperatorError):
    pass


class NotAnAncestor(OperatorError):
    pass


class NotInCurrentHierarchy(OperatorError):
    pass


class NotFiner(OperatorError):
    pass


class NotCoarser(OperatorError):
    pass


class FunctionalDependencyViolated(OperatorError):
    pass


class CannotPushKey(OperatorError):
    pass


class CannotPushAll(OperatorError):
    pass


class NotStarSchema(OperatorError):
    pass


class TypeMismatch(OperatorError):
    pass


class SchemaMismatch(OperatorError):
    pass


class MeasureConflict(OperatorError):
    pass


class EmptyMeasureSet(OperatorError):
    pass


class NothingToUndo(OperatorError):
    pass
