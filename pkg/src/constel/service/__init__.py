"""HTTP service exposing sessions, n-tables, and SQL emission."""

from .app import Registry, create_app, load_directory
from .models import SchemaSummary, SessionHandle, summarize

__all__ = [
    "Registry",
    "SchemaSummary",
    "SessionHandle",
    "create_app",
    "load_directory",
    "summarize",
]
