"""A tiny expression language for potentials on the shift space.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | number | 'euler' | 'sym' '(' int ')'
            | 'eq' '(' expr ',' expr ')' | 'exp' '(' expr ')'
            | 'log' '(' expr ')' | 'pow' '(' expr ',' expr ')' | '(' expr ')'

``sym(i)`` is the (i+1)-th coordinate of the point, read as a real number.
Expressions are evaluated over many points at once: ``evaluate`` takes a
2-D integer array whose rows are (truncated) points.
"""
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError, PotentialSyntaxError


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Sym:
    index: int


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


EULER = Num(math.e)
_FUNCS = {"eq": 2, "exp": 1, "log": 1, "pow": 2}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/(),])
""", re.VERBOSE)


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise PotentialSyntaxError(pos, "a number, name, operator or parenthesis", text)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), pos))
        pos = m.end()
    out.append(("eof", "", len(text)))
    return out


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def fail(self, expected):
        raise PotentialSyntaxError(self.tok[2], expected, self.text)

    def take(self, value, expected=None):
        if self.tok[1] != value or self.tok[0] == "eof":
            self.fail(expected or repr(value))
        self.i += 1

    def expr(self):
        node = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.tok[1]
            self.i += 1
            node = BinOp(op, node, self.factor())
        return node

    def factor(self):
        kind, text, _ = self.tok
        if kind == "op" and text == "-":
            self.i += 1
            return Neg(self.factor())
        if kind == "number":
            self.i += 1
            return Num(float(text))
        if kind == "op" and text == "(":
            self.i += 1
            node = self.expr()
            self.take(")")
            return node
        if kind == "name":
            if text == "euler":
                self.i += 1
                return EULER
            if text == "sym":
                self.i += 1
                self.take("(")
                if self.tok[0] != "number" or not self.tok[1].isdigit():
                    self.fail("a non-negative integer coordinate index")
                idx = int(self.tok[1])
                self.i += 1
                self.take(")")
                return Sym(idx)
            if text in _FUNCS:
                self.i += 1
                self.take("(")
                args = [self.expr()]
                for _ in range(_FUNCS[text] - 1):
                    self.take(",")
                    args.append(self.expr())
                self.take(")")
                return Call(text, tuple(args))
            self.fail("euler, sym, eq, exp, log or pow")
        self.fail("an operand")


def parse_potential(text):
    """Parse ``text`` into an expression tree; raises PotentialSyntaxError."""
    p = _Parser(text)
    node = p.expr()
    if p.tok[0] != "eof":
        p.fail("end of input")
    return node


def depth(node):
    """1 + largest coordinate index used (0 for constants)."""
    if isinstance(node, Sym):
        return node.index + 1
    if isinstance(node, Num):
        return 0
    if isinstance(node, Neg):
        return depth(node.arg)
    if isinstance(node, BinOp):
        return max(depth(node.left), depth(node.right))
    return max(depth(a) for a in node.args)


def to_text(node):
    """Unambiguous (fully parenthesized) source form; reparses to ``node``."""
    if node is EULER or node == EULER:
        return "euler"
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Sym):
        return f"sym({node.index})"
    if isinstance(node, Neg):
        return f"-({to_text(node.arg)})"
    if isinstance(node, BinOp):
        return f"({to_text(node.left)} {node.op} {to_text(node.right)})"
    return f"{node.name}({', '.join(to_text(a) for a in node.args)})"


def _fail_row(mask, points, message):
    row = int(np.flatnonzero(mask)[0])
    raise EvaluationError(message, tuple(int(s) for s in points[row]))


def evaluate(node, points):
    """Evaluate on every row of ``points`` (1-based symbols); float64 result."""
    points = np.asarray(points, dtype=np.int64)
    if points.ndim == 1:
        points = points[None, :]
    need = depth(node)
    if points.shape[1] < need:
        raise EvaluationError(f"points of length {points.shape[1]} but expression needs {need}")
    with np.errstate(all="ignore"):
        out = _eval(node, points)
    out = np.broadcast_to(np.asarray(out, dtype=np.float64), (points.shape[0],)).copy()
    bad = ~np.isfinite(out)
    if bad.any():
        _fail_row(bad, points, "non-finite value")
    return out


def _eval(node, P):
    if isinstance(node, Num):
        return np.float64(node.value)
    if isinstance(node, Sym):
        return P[:, node.index].astype(np.float64)
    if isinstance(node, Neg):
        return -_eval(node.arg, P)
    if isinstance(node, BinOp):
        a = _eval(node.left, P)
        b = _eval(node.right, P)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        zero = np.broadcast_to(b == 0, (P.shape[0],))
        if zero.any():
            _fail_row(zero, P, "division by zero")
        return a / b
    args = [_eval(a, P) for a in node.args]
    if node.name == "eq":
        return np.where(args[0] == args[1], 1.0, 0.0)
    if node.name == "exp":
        return np.exp(args[0])
    if node.name == "log":
        bad = np.broadcast_to(args[0] <= 0, (P.shape[0],))
        if bad.any():
            _fail_row(bad, P, "log of a non-positive value")
        return np.log(args[0])
    base, expo = args
    val = np.power(base, expo)
    bad = np.broadcast_to(~np.isfinite(val) & np.isfinite(base) & np.isfinite(expo), (P.shape[0],))
    if bad.any():
        _fail_row(bad, P, "pow outside its domain")
    return val
