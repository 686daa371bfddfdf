"""The tiny expression language used in filter and formula transforms.

Supported surface: ``datum.<field>`` accessors, signal names, number /
single-quoted-string / true / false / null literals, ``+ - * / %``,
comparisons, ``&& || !``, parentheses, and the ternary operator.
Evaluation is JS-flavored: ``&&``/``||`` short-circuit and return the
deciding operand, arithmetic is numbers-only and fails loudly otherwise.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Set, Tuple

from .errors import EvalError, ExpressionError

Expr = Tuple  # ("num", v) | ("str", v) | ("bool", v) | ("null",) |
#               ("datum", field) | ("name", ident) |
#               ("unary", op, e) | ("binary", op, l, r) | ("ternary", c, t, f)

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<num>[0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)
  | (?P<str>'(?:[^'\\]|\\.)*')
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>&&|\|\||==|!=|<=|>=|[-+*/%<>!?:().])
""", re.VERBOSE)

_STRING_ESCAPES = {"\\": "\\", "'": "'", "n": "\n", "t": "\t", "r": "\r"}


def _tokenize(text: str, path) -> List[Tuple[str, str]]:
    tokens: List[Tuple[str, str]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ExpressionError(f"bad character {text[pos]!r} in expression {text!r}",
                                  path=path)
        pos = m.end()
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(0)))
    tokens.append(("end", ""))
    return tokens


class _Parser:
    """Precedence-climbing parser; produces a plain tuple AST."""

    BINARY = [("||",), ("&&",), ("==", "!="), ("<", "<=", ">", ">="),
              ("+", "-"), ("*", "/", "%")]

    def __init__(self, text: str, path):
        self.text = text
        self.path = path
        self.tokens = _tokenize(text, path)
        self.i = 0

    def peek(self) -> Tuple[str, str]:
        return self.tokens[self.i]

    def take(self) -> Tuple[str, str]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def fail(self, message: str):
        raise ExpressionError(f"{message} in expression {self.text!r}", path=self.path)

    def parse(self) -> Expr:
        expr = self.ternary()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return expr

    def ternary(self) -> Expr:
        cond = self.binary(0)
        if self.peek() == ("op", "?"):
            self.take()
            then = self.ternary()
            if self.peek() != ("op", ":"):
                self.fail("expected ':'")
            self.take()
            return ("ternary", cond, then, self.ternary())
        return cond

    def binary(self, level: int) -> Expr:
        if level >= len(self.BINARY):
            return self.unary()
        left = self.binary(level + 1)
        while self.peek()[0] == "op" and self.peek()[1] in self.BINARY[level]:
            op = self.take()[1]
            right = self.binary(level + 1)
            left = ("binary", op, left, right)
        return left

    def unary(self) -> Expr:
        tok = self.peek()
        if tok == ("op", "!") or tok == ("op", "-"):
            self.take()
            return ("unary", tok[1], self.unary())
        return self.primary()

    def primary(self) -> Expr:
        kind, text = self.take()
        if kind == "num":
            return ("num", int(text) if re.fullmatch(r"[0-9]+", text) else float(text))
        if kind == "str":
            return ("str", self._unescape(text[1:-1]))
        if kind == "name":
            if text == "true":
                return ("bool", True)
            if text == "false":
                return ("bool", False)
            if text == "null":
                return ("null",)
            if self.peek() == ("op", "."):
                if text != "datum":
                    self.fail("only datum supports field access")
                self.take()
                fkind, fname = self.take()
                if fkind != "name":
                    self.fail("expected a field name after 'datum.'")
                return ("datum", fname)
            if text == "datum":
                self.fail("datum must be followed by a field access")
            return ("name", text)
        if (kind, text) == ("op", "("):
            inner = self.ternary()
            if self.peek() != ("op", ")"):
                self.fail("expected ')'")
            self.take()
            return inner
        self.fail(f"unexpected {text!r}" if text else "unexpected end")

    def _unescape(self, body: str) -> str:
        out = []
        i = 0
        while i < len(body):
            ch = body[i]
            if ch == "\\" and i + 1 < len(body):
                out.append(_STRING_ESCAPES.get(body[i + 1], body[i + 1]))
                i += 2
            else:
                out.append(ch)
                i += 1
        return "".join(out)


def parse_expression(text: str, path=None) -> Expr:
    """Parse an expression string; raises ExpressionError (annotated with
    ``path`` when given) on any malformed input."""
    return _Parser(text, path).parse()


def expression_names(expr: Expr) -> Set[str]:
    """Free signal names referenced by the expression (datum fields excluded)."""
    names: Set[str] = set()

    def walk(node: Expr):
        tag = node[0]
        if tag == "name":
            names.add(node[1])
        elif tag == "unary":
            walk(node[2])
        elif tag == "binary":
            walk(node[2])
            walk(node[3])
        elif tag == "ternary":
            walk(node[1])
            walk(node[2])
            walk(node[3])

    walk(expr)
    return names


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def evaluate(expr: Expr, datum: Optional[dict], env: Dict[str, object]):
    """Evaluate against one row (``datum``, may be None) and the signal
    environment. Raises EvalError on type misuse."""
    tag = expr[0]
    if tag in ("num", "str", "bool"):
        return expr[1]
    if tag == "null":
        return None
    if tag == "datum":
        if datum is None:
            raise EvalError("datum is not available in this context")
        return datum.get(expr[1])
    if tag == "name":
        if expr[1] not in env:
            raise EvalError(f"unknown name {expr[1]!r}")
        return env[expr[1]]
    if tag == "unary":
        val = evaluate(expr[2], datum, env)
        if expr[1] == "!":
            return not val
        if not _is_number(val):
            raise EvalError(f"unary '-' needs a number, got {type(val).__name__}")
        return -val
    if tag == "ternary":
        return (evaluate(expr[2], datum, env) if evaluate(expr[1], datum, env)
                else evaluate(expr[3], datum, env))

    op = expr[1]
    if op == "&&":
        left = evaluate(expr[2], datum, env)
        return evaluate(expr[3], datum, env) if left else left
    if op == "||":
        left = evaluate(expr[2], datum, env)
        return left if left else evaluate(expr[3], datum, env)

    left = evaluate(expr[2], datum, env)
    right = evaluate(expr[3], datum, env)
    if op == "==":
        return left == right
    if op == "!=":
        return left != right
    if op in ("<", "<=", ">", ">="):
        both_numbers = _is_number(left) and _is_number(right)
        both_strings = isinstance(left, str) and isinstance(right, str)
        if not (both_numbers or both_strings):
            raise EvalError(
                f"cannot compare {type(left).__name__} with {type(right).__name__}")
        if op == "<":
            return left < right
        if op == "<=":
            return left <= right
        if op == ">":
            return left > right
        return left >= right
    # arithmetic
    if not (_is_number(left) and _is_number(right)):
        raise EvalError(
            f"arithmetic '{op}' needs numbers, got "
            f"{type(left).__name__} and {type(right).__name__}")
    if op == "+":
        return left + right
    if op == "-":
        return left - right
    if op == "*":
        return left * right
    if op == "/":
        if right == 0:
            raise EvalError("division by zero")
        return left / right
    if right == 0:
        raise EvalError("modulo by zero")
    return left % right
