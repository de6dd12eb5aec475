"""Recursive-descent parser for coefficient expressions in one variable ``x``.

Grammar (EBNF)::

    expr    = term { ("+" | "-") term } ;
    term    = unary { ("*" | "/") unary } ;
    unary   = "-" unary | power ;
    power   = atom [ "^" unary ] ;              (* right associative *)
    atom    = number | "x" | func "(" expr ")" | "(" expr ")" ;
    func    = "exp" | "cos" | "sin" | "abs" | "sqrt" ;
    number  = ( digits [ "." [ digits ] ] | "." digits ) [ exponent ] ;
    exponent = ("e" | "E") [ "+" | "-" ] digits ;

``-x^2`` parses as ``-(x^2)``.  Whitespace is ignored.  Positions in
:class:`~corsol.errors.ExpressionSyntaxError` are 0-based offsets into the
original text.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import ExpressionSyntaxError

FUNCTIONS = {
    "exp": np.exp,
    "cos": np.cos,
    "sin": np.sin,
    "abs": np.abs,
    "sqrt": np.sqrt,
}

_NUMBER = re.compile(r"(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")
_NAME = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    pass


@dataclass(frozen=True)
class Neg:
    arg: "Node"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Node"


Node = Union[Num, Var, Neg, BinOp, Call]


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self):
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _fail(self, *expected):
        self._skip()
        raise ExpressionSyntaxError(self.pos, expected, self.text)

    def parse(self) -> Node:
        node = self.expr()
        if self._peek():
            self._fail("+", "-", "*", "/", "^", "end of input")
        return node

    def expr(self):
        node = self.term()
        while self._peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self._peek() in ("*", "/"):
            op = self.text[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self._peek() == "-":
            self.pos += 1
            return Neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self._peek() == "^":
            self.pos += 1
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        c = self._peek()
        if c == "(":
            self.pos += 1
            node = self.expr()
            self._expect(")")
            return node
        m = _NUMBER.match(self.text, self.pos)
        if m:
            self.pos = m.end()
            return Num(float(m.group(0)))
        m = _NAME.match(self.text, self.pos)
        if m:
            name = m.group(0)
            if name == "x":
                self.pos = m.end()
                return Var()
            if name in FUNCTIONS:
                self.pos = m.end()
                self._expect("(")
                arg = self.expr()
                self._expect(")")
                return Call(name, arg)
            raise ExpressionSyntaxError(self.pos, ("x", "number", *FUNCTIONS), self.text)
        self._fail("number", "x", "(", *FUNCTIONS)

    def _expect(self, ch):
        if self._peek() != ch:
            self._fail(ch)
        self.pos += 1


def parse(text: str) -> Node:
    """Parse ``text`` into an expression tree."""
    return _Parser(text).parse()


def compile_node(node: Node) -> Callable[[np.ndarray], np.ndarray]:
    """Vectorised evaluator for a parsed tree."""
    if isinstance(node, Num):
        v = node.value
        return lambda x: np.full(np.shape(x), v, dtype=float)
    if isinstance(node, Var):
        return lambda x: np.asarray(x, dtype=float)
    if isinstance(node, Neg):
        f = compile_node(node.arg)
        return lambda x: -f(x)
    if isinstance(node, Call):
        fn = FUNCTIONS[node.name]
        f = compile_node(node.arg)
        return lambda x: fn(f(x))
    f, g = compile_node(node.left), compile_node(node.right)
    op = node.op
    if op == "+":
        return lambda x: f(x) + g(x)
    if op == "-":
        return lambda x: f(x) - g(x)
    if op == "*":
        return lambda x: f(x) * g(x)
    if op == "/":
        return lambda x: f(x) / g(x)
    return lambda x: np.power(f(x), g(x))


def to_text(node: Node) -> str:
    """Fully parenthesised rendering that re-parses to the same tree."""
    if isinstance(node, Num):
        return repr(node.value) if node.value >= 0 else f"(-{repr(-node.value)})"
    if isinstance(node, Var):
        return "x"
    if isinstance(node, Neg):
        return f"(-{to_text(node.arg)})"
    if isinstance(node, Call):
        return f"{node.name}({to_text(node.arg)})"
    return f"({to_text(node.left)} {node.op} {to_text(node.right)})"


class Expression:
    """A parsed expression: callable on floats or arrays."""

    vectorized = True

    def __init__(self, text: str):
        self.text = text
        self.tree = parse(text)
        self._fn = compile_node(self.tree)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(self._fn(x), dtype=float)
        return out if out.shape == x.shape else np.broadcast_to(out, x.shape).copy()

    def __repr__(self):
        return f"Expression({self.text!r})"

    def pretty(self) -> str:
        return to_text(self.tree)
