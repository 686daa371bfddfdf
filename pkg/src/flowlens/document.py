"""Span-annotated parsing of chart specification text.

The spec format is a strict JSON subset (no comments, no trailing
commas). Parsing produces a tree in which every node remembers exactly
where it came from: 1-based line/column coordinates plus byte offsets
into the UTF-8 encoding of the source. Spans include the node's own
delimiters (``{…}``, ``[…]``, ``"…"``) so a highlight covers the whole
block.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

from .errors import PathNotFound, SpecSyntaxError

PathSegment = Union[str, int]
SpecPath = Tuple[PathSegment, ...]


def as_path(path: Sequence[PathSegment]) -> SpecPath:
    """Canonicalize any key/index sequence into a path tuple."""
    return tuple(path)


@dataclass(frozen=True)
class SpecSpan:
    """Closed-open region of the source text.

    Lines and columns are 1-based and count characters; ``end_line`` /
    ``end_col`` point one past the last character. Byte offsets index the
    UTF-8 encoding, ``byte_end`` exclusive.
    """

    start_line: int
    start_col: int
    end_line: int
    end_col: int
    byte_start: int
    byte_end: int

    def contains(self, other: "SpecSpan") -> bool:
        return self.byte_start <= other.byte_start and other.byte_end <= self.byte_end

    def to_json(self) -> dict:
        return {
            "start_line": self.start_line,
            "start_col": self.start_col,
            "end_line": self.end_line,
            "end_col": self.end_col,
            "byte_start": self.byte_start,
            "byte_end": self.byte_end,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SpecSpan":
        return cls(**{k: obj[k] for k in (
            "start_line", "start_col", "end_line", "end_col", "byte_start", "byte_end")})


@dataclass
class SpecNode:
    """One parsed value plus its span.

    ``entries`` is a key-ordered dict for objects, a list for arrays and
    None for scalars; ``value`` holds the Python value of scalars.
    """

    kind: str  # object | array | string | number | boolean | null
    span: SpecSpan
    value: object = None
    entries: Union[Dict[str, "SpecNode"], List["SpecNode"], None] = None

    def to_py(self) -> object:
        if self.kind == "object":
            return {k: v.to_py() for k, v in self.entries.items()}
        if self.kind == "array":
            return [v.to_py() for v in self.entries]
        return self.value


@dataclass
class SpecDocument:
    """Source text plus its span-annotated parse tree."""

    root: SpecNode
    source_text: str

    def resolve(self, path: Sequence[PathSegment]) -> SpecNode:
        """Follow object keys / array indices from the root; raises
        PathNotFound if any step fails."""
        node = self.root
        for depth, seg in enumerate(path):
            if isinstance(seg, int) and not isinstance(seg, bool) and node.kind == "array":
                if 0 <= seg < len(node.entries):
                    node = node.entries[seg]
                    continue
            elif isinstance(seg, str) and node.kind == "object":
                if seg in node.entries:
                    node = node.entries[seg]
                    continue
            raise PathNotFound(
                f"path does not resolve at segment {seg!r}",
                path=as_path(path[: depth + 1]),
            )
        return node

    def walk(self) -> Iterator[Tuple[SpecPath, SpecNode]]:
        """Yield every (path, node) pair in document order, root first."""

        def rec(path: SpecPath, node: SpecNode):
            yield path, node
            if node.kind == "object":
                for key, child in node.entries.items():
                    yield from rec(path + (key,), child)
            elif node.kind == "array":
                for idx, child in enumerate(node.entries):
                    yield from rec(path + (idx,), child)

        yield from rec((), self.root)


def span_of(doc: SpecDocument, path: Sequence[PathSegment]) -> SpecSpan:
    """Span of the node addressed by ``path``, delimiters included."""
    return doc.resolve(path).span


_NUMBER_RE = re.compile(r"-?(?:0|[1-9][0-9]*)(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?")
_WS = " \t\n\r"
_ESCAPES = {'"': '"', "\\": "\\", "/": "/", "b": "\b", "f": "\f",
            "n": "\n", "r": "\r", "t": "\t"}


class _Cursor:
    """Character cursor tracking line/column and UTF-8 byte offset."""

    def __init__(self, text: str):
        self.text = text
        self.n = len(text)
        self.i = 0
        self.line = 1
        self.col = 1
        self.byte = 0

    def pos(self) -> Tuple[int, int, int]:
        return self.line, self.col, self.byte

    def peek(self) -> str:
        return self.text[self.i] if self.i < self.n else ""

    def advance(self) -> str:
        ch = self.text[self.i]
        self.i += 1
        self.byte += len(ch.encode("utf-8"))
        if ch == "\n":
            self.line += 1
            self.col = 1
        else:
            self.col += 1
        return ch

    def skip_ws(self):
        while self.i < self.n and self.text[self.i] in _WS:
            self.advance()

    def fail(self, message: str):
        raise SpecSyntaxError(message, self.line, self.col)


def parse_spec(text: Union[str, bytes]) -> SpecDocument:
    """Parse specification text into a span-annotated document.

    The returned tree mirrors the JSON structure exactly; parsing is a
    pure function of the text.
    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise SpecSyntaxError(f"invalid UTF-8: {exc.reason}", 1, 1) from None
    cur = _Cursor(text)
    cur.skip_ws()
    if cur.i >= cur.n:
        cur.fail("empty specification")
    root = _parse_value(cur)
    cur.skip_ws()
    if cur.i < cur.n:
        cur.fail(f"unexpected trailing content {cur.peek()!r}")
    return SpecDocument(root=root, source_text=text)


def _parse_value(cur: _Cursor) -> SpecNode:
    ch = cur.peek()
    if ch == "{":
        return _parse_object(cur)
    if ch == "[":
        return _parse_array(cur)
    if ch == '"':
        return _parse_string(cur)
    if ch == "-" or ch.isdigit():
        return _parse_number(cur)
    for word, kind, value in (("true", "boolean", True), ("false", "boolean", False),
                              ("null", "null", None)):
        if cur.text.startswith(word, cur.i):
            start = cur.pos()
            for _ in word:
                cur.advance()
            return SpecNode(kind=kind, span=_mk_span(start, cur), value=value)
    cur.fail("expected a value" if ch else "unexpected end of input")


def _mk_span(start: Tuple[int, int, int], cur: _Cursor) -> SpecSpan:
    line, col, byte = start
    return SpecSpan(start_line=line, start_col=col, end_line=cur.line,
                    end_col=cur.col, byte_start=byte, byte_end=cur.byte)


def _parse_object(cur: _Cursor) -> SpecNode:
    start = cur.pos()
    cur.advance()  # {
    entries: Dict[str, SpecNode] = {}
    cur.skip_ws()
    if cur.peek() == "}":
        cur.advance()
        return SpecNode(kind="object", span=_mk_span(start, cur), entries=entries)
    while True:
        cur.skip_ws()
        if cur.peek() != '"':
            cur.fail("expected a string key")
        key_node = _parse_string(cur)
        key = key_node.value
        if key in entries:
            cur.fail(f"duplicate key {key!r}")
        cur.skip_ws()
        if cur.peek() != ":":
            cur.fail("expected ':'")
        cur.advance()
        cur.skip_ws()
        entries[key] = _parse_value(cur)
        cur.skip_ws()
        ch = cur.peek()
        if ch == ",":
            cur.advance()
            continue
        if ch == "}":
            cur.advance()
            return SpecNode(kind="object", span=_mk_span(start, cur), entries=entries)
        cur.fail("expected ',' or '}'")


def _parse_array(cur: _Cursor) -> SpecNode:
    start = cur.pos()
    cur.advance()  # [
    entries: List[SpecNode] = []
    cur.skip_ws()
    if cur.peek() == "]":
        cur.advance()
        return SpecNode(kind="array", span=_mk_span(start, cur), entries=entries)
    while True:
        cur.skip_ws()
        entries.append(_parse_value(cur))
        cur.skip_ws()
        ch = cur.peek()
        if ch == ",":
            cur.advance()
            continue
        if ch == "]":
            cur.advance()
            return SpecNode(kind="array", span=_mk_span(start, cur), entries=entries)
        cur.fail("expected ',' or ']'")


def _parse_string(cur: _Cursor) -> SpecNode:
    start = cur.pos()
    cur.advance()  # opening quote
    out: List[str] = []
    while True:
        if cur.i >= cur.n:
            cur.fail("unterminated string")
        ch = cur.advance()
        if ch == '"':
            break
        if ch == "\\":
            if cur.i >= cur.n:
                cur.fail("unterminated escape")
            esc = cur.advance()
            if esc in _ESCAPES:
                out.append(_ESCAPES[esc])
            elif esc == "u":
                out.append(_parse_unicode_escape(cur))
            else:
                cur.fail(f"invalid escape '\\{esc}'")
        elif ord(ch) < 0x20:
            cur.fail("unescaped control character in string")
        else:
            out.append(ch)
    return SpecNode(kind="string", span=_mk_span(start, cur), value="".join(out))


def _parse_unicode_escape(cur: _Cursor) -> str:
    def hex4() -> int:
        if cur.i + 4 > cur.n:
            cur.fail("truncated \\u escape")
        digits = cur.text[cur.i: cur.i + 4]
        try:
            code = int(digits, 16)
        except ValueError:
            cur.fail(f"invalid \\u escape {digits!r}")
        for _ in range(4):
            cur.advance()
        return code

    code = hex4()
    if 0xD800 <= code <= 0xDBFF and cur.text.startswith("\\u", cur.i):
        # high surrogate: try to pair with a following low surrogate
        save = (cur.i, cur.line, cur.col, cur.byte)
        cur.advance(), cur.advance()
        low = hex4()
        if 0xDC00 <= low <= 0xDFFF:
            return chr(0x10000 + ((code - 0xD800) << 10) + (low - 0xDC00))
        cur.i, cur.line, cur.col, cur.byte = save
    return chr(code)


def _parse_number(cur: _Cursor) -> SpecNode:
    start = cur.pos()
    m = _NUMBER_RE.match(cur.text, cur.i)
    if not m:
        cur.fail("invalid number")
    literal = m.group(0)
    for _ in literal:
        cur.advance()
    value = int(literal) if re.fullmatch(r"-?[0-9]+", literal) else float(literal)
    return SpecNode(kind="number", span=_mk_span(start, cur), value=value)
