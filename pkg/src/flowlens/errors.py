"""Exception hierarchy for the flowlens pipeline.

Every error that can be traced to a place in the chart specification
carries the offending ``path`` (a tuple of object keys / array indices)
and, when known, the ``span`` of that path in the source text, so that
callers can surface precise locations.
"""

from __future__ import annotations

from typing import Optional, Tuple, Union

PathTuple = Tuple[Union[str, int], ...]


def format_path(path: PathTuple) -> str:
    """Render a path tuple like ``("marks", 0, "from")`` as ``marks[0].from``."""
    out = "$"
    for seg in path:
        out += f"[{seg}]" if isinstance(seg, int) else f".{seg}"
    return out


class FlowlensError(Exception):
    """Base class for all flowlens errors."""

    def __init__(self, message: str, *, path: Optional[PathTuple] = None, span=None):
        self.message = message
        self.path = tuple(path) if path is not None else None
        self.span = span
        super().__init__(self._render())

    def _render(self) -> str:
        if self.path is not None:
            return f"{self.message} (at {format_path(self.path)})"
        return self.message


class SpecSyntaxError(FlowlensError):
    """Malformed specification text. Points at the first offending token."""

    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{message} at line {line}, col {col}")


class ValidationError(FlowlensError):
    """Structurally invalid chart spec (unknown key, bad enum, dangling or
    cyclic reference)."""


class PathNotFound(FlowlensError):
    """A spec path does not resolve to a node in the document."""


class ExpressionError(FlowlensError):
    """A filter/formula expression failed to parse or references an
    unknown name."""


class LoweringError(FlowlensError):
    """Unsupported parameter combination encountered while lowering."""


class DataLoadError(FlowlensError):
    """A url-backed dataset could not be loaded."""


class EvalError(FlowlensError):
    """An operator failed during pulse evaluation."""

    def __init__(self, message: str, *, node_id: Optional[int] = None,
                 path: Optional[PathTuple] = None, span=None):
        self.node_id = node_id
        if node_id is not None:
            message = f"node {node_id}: {message}"
        super().__init__(message, path=path, span=span)


class UnknownSignal(FlowlensError):
    """Signal update names a signal that does not exist."""


class UnknownNode(FlowlensError):
    """Node id not present in the profiling map."""


class UnknownPulse(FlowlensError):
    """Pulse id not present in a report."""


class SchemaError(FlowlensError):
    """A serialized profile report does not match the documented schema."""

    def __init__(self, message: str, *, location: str = ""):
        self.location = location
        super().__init__(f"{message} (at {location})" if location else message)
