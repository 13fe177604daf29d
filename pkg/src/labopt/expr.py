"""A small arithmetic expression language for config-defined problems.

Grammar (lowest to highest precedence)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right associative
    atom   := NUMBER | 'pi' | VAR | NAME '(' args ')' | '(' expr ')'

Variables are written ``x1 .. xN``.  Evaluation accepts either a single
point of shape ``(N,)`` or a batch of points of shape ``(m, N)``.
"""

import math
import re
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    EvaluationError,
    ExpressionSyntaxError,
    UnknownIdentifierError,
    VariableIndexError,
)

__all__ = [
    "Num",
    "Var",
    "Neg",
    "BinOp",
    "Call",
    "parse_expression",
    "eval_expression",
    "format_expression",
    "max_variable",
    "parse_constraint",
]


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    index: int  # zero-based


@dataclass(frozen=True)
class Neg:
    operand: object


@dataclass(frozen=True)
class BinOp:
    op: str
    left: object
    right: object


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


# name -> (min args, max args); None means unbounded
FUNCTIONS = {
    "sin": (1, 1),
    "cos": (1, 1),
    "tan": (1, 1),
    "sqrt": (1, 1),
    "abs": (1, 1),
    "exp": (1, 1),
    "log": (1, 1),
    "min": (2, None),
    "max": (2, None),
}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),]))"
)
_VAR = re.compile(r"x([0-9]+)$")


def _tokenize(text):
    tokens = []
    pos = 0
    raw = text.encode()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            rest = text[pos:]
            if rest.strip() == "":
                break
            # report the offset of the offending character, not the whitespace
            bad = pos + (len(rest) - len(rest.lstrip()))
            raise ExpressionSyntaxError(
                f"unexpected character {text[bad]!r}", text, len(text[:bad].encode())
            )
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), len(text[:start].encode())))
        pos = m.end()
    tokens.append(("end", "", len(raw)))
    return tokens


class _Parser:
    def __init__(self, text, n_vars):
        self.text = text
        self.n_vars = n_vars
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def error(self, msg, cls=ExpressionSyntaxError):
        raise cls(msg, self.text, self.tok[2])

    def take(self, value=None):
        kind, val, off = self.tok
        if value is not None and val != value:
            self.error(f"expected {value!r}, found {val or 'end of input'!r}")
        self.i += 1
        return kind, val, off

    def parse(self):
        node = self.expr()
        if self.tok[0] != "end":
            self.error(f"unexpected token {self.tok[1]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.tok[1] in ("+", "-") and self.tok[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.tok[1] in ("*", "/") and self.tok[0] == "op":
            op = self.take()[1]
            node = BinOp(op, node, self.unary())
        return node

    def unary(self):
        if self.tok == ("op", "-", self.tok[2]):
            self.take()
            return Neg(self.unary())
        if self.tok == ("op", "+", self.tok[2]):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.tok[0] == "op" and self.tok[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self):
        kind, val, off = self.tok
        if kind == "num":
            self.take()
            return Num(float(val))
        if kind == "name":
            self.take()
            if self.tok[1] == "(" and self.tok[0] == "op":
                return self.call(val, off)
            if val == "pi":
                return Num(math.pi)
            m = _VAR.match(val)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.n_vars:
                    raise VariableIndexError(
                        f"variable {val} out of range for {self.n_vars} variables",
                        self.text, off,
                    )
                return Var(idx - 1)
            raise UnknownIdentifierError(f"unknown identifier {val!r}", self.text, off)
        if kind == "op" and val == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        self.error(f"unexpected token {val or 'end of input'!r}")

    def call(self, name, off):
        if name not in FUNCTIONS:
            raise UnknownIdentifierError(f"unknown function {name!r}", self.text, off)
        self.take("(")
        args = [self.expr()]
        while self.tok[1] == ",":
            self.take()
            args.append(self.expr())
        self.take(")")
        lo, hi = FUNCTIONS[name]
        if len(args) < lo or (hi is not None and len(args) > hi):
            raise ExpressionSyntaxError(
                f"{name}() takes {lo if lo == hi else f'at least {lo}'} argument(s), "
                f"got {len(args)}", self.text, off,
            )
        return Call(name, tuple(args))


def parse_expression(text, n_vars):
    """Parse ``text`` into an expression tree over variables ``x1..x{n_vars}``."""
    if not isinstance(text, str) or not text.strip():
        raise ExpressionSyntaxError("empty expression", text or "", 0)
    return _Parser(text, n_vars).parse()


def max_variable(node):
    """Largest one-based variable index referenced by ``node`` (0 if none)."""
    if isinstance(node, Var):
        return node.index + 1
    if isinstance(node, Neg):
        return max_variable(node.operand)
    if isinstance(node, BinOp):
        return max(max_variable(node.left), max_variable(node.right))
    if isinstance(node, Call):
        return max((max_variable(a) for a in node.args), default=0)
    return 0


def _domain(cond, msg):
    if np.any(cond):
        raise EvaluationError(msg)


def _eval(node, X):
    if isinstance(node, Num):
        return node.value
    if isinstance(node, Var):
        return X[..., node.index]
    if isinstance(node, Neg):
        return -_eval(node.operand, X)
    if isinstance(node, BinOp):
        a = _eval(node.left, X)
        b = _eval(node.right, X)
        if node.op == "+":
            return a + b
        if node.op == "-":
            return a - b
        if node.op == "*":
            return a * b
        if node.op == "/":
            _domain(np.asarray(b) == 0, "division by zero")
            return a / b
        with np.errstate(all="ignore"):
            out = np.power(np.asarray(a, dtype=float), b)
        _domain(~np.isfinite(out) & np.isfinite(a) & np.isfinite(b),
                "invalid power (negative base with fractional exponent, or 0 to a negative power)")
        return out
    if isinstance(node, Call):
        args = [_eval(a, X) for a in node.args]
        name = node.name
        if name == "sqrt":
            _domain(np.asarray(args[0]) < 0, "sqrt of a negative number")
            return np.sqrt(args[0])
        if name == "log":
            _domain(np.asarray(args[0]) <= 0, "log of a non-positive number")
            return np.log(args[0])
        if name == "min":
            out = args[0]
            for a in args[1:]:
                out = np.minimum(out, a)
            return out
        if name == "max":
            out = args[0]
            for a in args[1:]:
                out = np.maximum(out, a)
            return out
        return getattr(np, name)(args[0])
    raise TypeError(f"not an expression node: {node!r}")


def eval_expression(node, x):
    """Evaluate ``node`` at one point ``(N,)`` or a batch ``(m, N)``.

    Returns a float for a single point and an array of shape ``(m,)``
    for a batch.  Division by zero and domain errors raise
    :class:`EvaluationError` instead of producing NaN.
    """
    X = np.asarray(x, dtype=float)
    need = max_variable(node)
    width = X.shape[-1] if X.ndim else 0
    if width < need:
        raise VariableIndexError(
            f"expression uses x{need} but the point has {width} entries"
        )
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = _eval(node, X)
    if X.ndim <= 1:
        return float(out)
    return np.broadcast_to(np.asarray(out, dtype=float), X.shape[:-1]).copy()


def format_expression(node):
    """Render a tree back to source text (fully parenthesised binary ops)."""
    if isinstance(node, Num):
        return repr(node.value)
    if isinstance(node, Var):
        return f"x{node.index + 1}"
    if isinstance(node, Neg):
        return f"(-{format_expression(node.operand)})"
    if isinstance(node, BinOp):
        return f"({format_expression(node.left)} {node.op} {format_expression(node.right)})"
    if isinstance(node, Call):
        return f"{node.name}({', '.join(format_expression(a) for a in node.args)})"
    raise TypeError(f"not an expression node: {node!r}")


_CMP = re.compile(r"(<=|>=|<|>)")


def _split_top_level(text, sep):
    parts, depth, start = [], 0, 0
    i = 0
    while i < len(text):
        c = text[i]
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif depth == 0 and text.startswith(sep, i):
            parts.append(text[start:i])
            start = i + len(sep)
            i = start
            continue
        i += 1
    parts.append(text[start:])
    return parts


def _one_inequality(text, n_vars):
    pieces = _CMP.split(text)
    if len(pieces) == 1:
        return parse_expression(text, n_vars)
    if len(pieces) != 3:
        raise ExpressionSyntaxError("a constraint may contain only one comparison", text, 0)
    lhs, op, rhs = pieces
    left = parse_expression(lhs, n_vars)
    right = parse_expression(rhs, n_vars)
    if op.startswith("<"):
        g = left if right == Num(0.0) else BinOp("-", left, right)
    else:
        g = Neg(left) if right == Num(0.0) else BinOp("-", right, left)
    return g


def parse_constraint(text, n_vars):
    """Parse ``"lhs <= rhs"`` (or ``>=``) into a tree ``g`` with ``g(x) <= 0``.

    A bare expression means ``expr <= 0``.  Alternatives joined by a
    top-level ``or`` become ``min(g_1, g_2, ...)``.
    """
    alternatives = [a.strip() for a in _split_top_level(text, " or ")]
    trees = [_one_inequality(a, n_vars) for a in alternatives]
    if len(trees) == 1:
        return trees[0]
    return Call("min", tuple(trees))
