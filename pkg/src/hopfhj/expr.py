"""Scalar arithmetic expressions for Hamiltonians and initial data.

Grammar (standard precedence, ``^`` binds tightest and is right-associative)::

    expression := term (('+' | '-') term)*
    term       := factor (('*' | '/') factor)*
    factor     := '-' factor | power
    power      := atom ('^' factor)?
    atom       := NUMBER | VARIABLE | FUNC '(' expression ')' | '(' expression ')'

Variables are ``t`` and the indexed families ``x1..xn``, ``p1..pn``,
``q1..qn`` where ``n`` is the dimension passed to :func:`parse`.
Functions: ``ln, exp, sin, cos, sqrt, abs``.

Evaluation accepts plain floats or numpy arrays in the bindings and is pure;
derivatives are forward-mode dual numbers, exact to rounding.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    EvalDomainError,
    NonDifferentiableError,
    ParseError,
    UnboundVariableError,
)

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Unary",
    "Binary",
    "parse",
    "evaluate",
    "derivative",
    "directional_derivative",
    "variables",
    "to_string",
]

FUNCTIONS = ("ln", "exp", "sin", "cos", "sqrt", "abs")


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str  # "neg" or one of FUNCTIONS
    arg: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str  # one of "+-*/^"
    left: "Expr"
    right: "Expr"


Expr = Union[Const, Var, Unary, Binary]


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)

_VAR_RE = re.compile(r"^([xpq])([1-9][0-9]*)$")


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            # skip over whitespace-only tails
            if text[pos:].strip() == "":
                break
            raise ParseError(f"unexpected character {text[pos:].lstrip()[0]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, dim):
        self.text = text
        self.dim = dim
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)
        return self.advance()

    def expression(self):
        node = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                node = Binary(val, node, self.term())
            else:
                return node

    def term(self):
        node = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                node = Binary(val, node, self.factor())
            else:
                return node

    def factor(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return Unary("neg", self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            return Binary("^", base, self.factor())
        return base

    def atom(self):
        kind, val, pos = self.advance()
        if kind == "num":
            return Const(float(val))
        if kind == "ident":
            nxt_kind, nxt_val, _ = self.peek()
            if nxt_kind == "op" and nxt_val == "(":
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", pos)
                self.advance()
                arg = self.expression()
                self.expect_op(")")
                return Unary(val, arg)
            return Var(self._check_var(val, pos))
        if kind == "op" and val == "(":
            node = self.expression()
            self.expect_op(")")
            return node
        raise ParseError(f"expected a value, found {val!r}" if val else "unexpected end of input", pos)

    def _check_var(self, name, pos):
        if name == "t":
            return name
        m = _VAR_RE.match(name)
        if m is None:
            raise ParseError(f"unknown identifier {name!r}", pos)
        index = int(m.group(2))
        if index > self.dim:
            raise ParseError(
                f"variable {name!r} exceeds problem dimension {self.dim}", pos
            )
        return name


def parse(text: str, dim: int) -> Expr:
    """Parse ``text`` into an expression tree for a problem of dimension ``dim``."""
    if not isinstance(text, str) or text.strip() == "":
        raise ParseError("empty expression", 0)
    if dim < 1:
        raise ValueError("dim must be a positive integer")
    parser = _Parser(text, dim)
    node = parser.expression()
    kind, val, pos = parser.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing input {val!r}", pos)
    return node


# ---------------------------------------------------------------------------
# evaluation

def _is_scalar(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_positive(a, what):
    if _is_scalar(a):
        if a <= 0.0:
            raise EvalDomainError(f"{what} of non-positive argument")
    elif np.any(a <= 0.0):
        raise EvalDomainError(f"{what} of non-positive argument")


def _check_nonnegative(a, what):
    if _is_scalar(a):
        if a < 0.0:
            raise EvalDomainError(f"{what} of negative argument")
    elif np.any(a < 0.0):
        raise EvalDomainError(f"{what} of negative argument")


def _is_integral(c):
    return float(c).is_integer() and abs(c) < 2.0**53


def _pow(a, c):
    """a**c with explicit domain rules (negative base needs integer exponent)."""
    if _is_scalar(a) and _is_scalar(c):
        try:
            if a > 0.0:
                return math.pow(a, c)
            if a == 0.0:
                if c > 0.0:
                    return 0.0
                if c == 0.0:
                    return 1.0
                raise EvalDomainError("zero raised to a negative power")
            if _is_integral(c):
                return math.pow(a, c)
        except OverflowError:
            raise EvalDomainError("power overflow") from None
        raise EvalDomainError("negative base with non-integer exponent")
    if _is_scalar(c):
        # array base, constant exponent: the overwhelmingly common case
        if c == 2.0:
            return a * a
        if _is_integral(c):
            if c < 0.0 and np.any(np.asarray(a) == 0.0):
                raise EvalDomainError("zero raised to a negative power")
            with np.errstate(over="ignore"):
                return np.power(a, c)
        a_arr = np.asarray(a)
        if np.any(a_arr < 0.0):
            raise EvalDomainError("negative base with non-integer exponent")
        if c < 0.0 and np.any(a_arr == 0.0):
            raise EvalDomainError("zero raised to a negative power")
        with np.errstate(over="ignore"):
            return np.power(a_arr, c)
    a_arr = np.asarray(a, dtype=float)
    c_arr = np.asarray(c, dtype=float)
    shape = np.broadcast_shapes(a_arr.shape, c_arr.shape)
    neg = a_arr < 0.0
    if np.any(neg):
        c_at = np.broadcast_to(c_arr, shape)
        bad = np.broadcast_to(neg, shape) & ~(
            (np.floor(c_at) == c_at) & (np.abs(c_at) < 2.0**53)
        )
        if np.any(bad):
            raise EvalDomainError("negative base with non-integer exponent")
    if np.any((np.broadcast_to(a_arr, shape) == 0.0) & (np.broadcast_to(c_arr, shape) < 0.0)):
        raise EvalDomainError("zero raised to a negative power")
    with np.errstate(over="ignore", invalid="ignore"):
        return np.power(a_arr, c_arr)


def _div(a, c):
    if _is_scalar(c):
        if c == 0.0:
            raise EvalDomainError("division by zero")
        return a / c
    if np.any(np.asarray(c) == 0.0):
        raise EvalDomainError("division by zero")
    return a / c


def _ev(node, bindings):
    if type(node) is Const:
        return node.value
    if type(node) is Var:
        try:
            return bindings[node.name]
        except KeyError:
            raise UnboundVariableError(f"unbound variable {node.name!r}") from None
    if type(node) is Binary:
        a = _ev(node.left, bindings)
        op = node.op
        if op == "^":
            return _pow(a, _ev(node.right, bindings))
        b = _ev(node.right, bindings)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        return _div(a, b)
    # Unary
    a = _ev(node.arg, bindings)
    op = node.op
    if op == "neg":
        return -a
    if op == "ln":
        _check_positive(a, "ln")
        return math.log(a) if _is_scalar(a) else np.log(a)
    if op == "exp":
        if _is_scalar(a):
            try:
                return math.exp(a)
            except OverflowError:
                raise EvalDomainError("exp overflow") from None
        with np.errstate(over="ignore"):
            return np.exp(a)
    if op == "sin":
        return math.sin(a) if _is_scalar(a) else np.sin(a)
    if op == "cos":
        return math.cos(a) if _is_scalar(a) else np.cos(a)
    if op == "sqrt":
        _check_nonnegative(a, "sqrt")
        return math.sqrt(a) if _is_scalar(a) else np.sqrt(a)
    # abs
    return abs(a) if _is_scalar(a) else np.abs(a)


def evaluate(e: Expr, bindings: dict):
    """Evaluate ``e`` with the given variable bindings (floats or numpy arrays).

    Non-finite results surface as :class:`EvalDomainError`.
    """
    out = _ev(e, bindings)
    if _is_scalar(out):
        if not math.isfinite(out):
            raise EvalDomainError("non-finite result")
        return float(out)
    out = np.asarray(out, dtype=float)
    if not np.all(np.isfinite(out)):
        raise EvalDomainError("non-finite result")
    return out


# ---------------------------------------------------------------------------
# forward-mode derivatives (dual numbers as (value, tangent) pairs)

def _ev_dual(node, bindings, seeds):
    if type(node) is Const:
        return node.value, 0.0
    if type(node) is Var:
        try:
            return bindings[node.name], seeds.get(node.name, 0.0)
        except KeyError:
            raise UnboundVariableError(f"unbound variable {node.name!r}") from None
    if type(node) is Binary:
        a, da = _ev_dual(node.left, bindings, seeds)
        b, db = _ev_dual(node.right, bindings, seeds)
        op = node.op
        if op == "+":
            return a + b, da + db
        if op == "-":
            return a - b, da - db
        if op == "*":
            return a * b, da * b + a * db
        if op == "/":
            v = _div(a, b)
            return v, _div(da * b - a * db, b * b)
        # power
        db_zero = db == 0.0 if _is_scalar(db) else bool(np.all(db == 0.0))
        if db_zero and _is_scalar(b):
            v = _pow(a, b)
            if b == 0.0:
                return v, 0.0 * da
            dv = b * _pow(a, b - 1.0) * da
            return v, dv
        _check_positive(a, "power with varying exponent: base")
        v = _pow(a, b)
        log_a = math.log(a) if _is_scalar(a) else np.log(a)
        return v, v * (db * log_a + _div(b * da, a))
    a, da = _ev_dual(node.arg, bindings, seeds)
    op = node.op
    if op == "neg":
        return -a, -da
    if op == "ln":
        _check_positive(a, "ln")
        v = math.log(a) if _is_scalar(a) else np.log(a)
        return v, _div(da, a)
    if op == "exp":
        if _is_scalar(a):
            try:
                v = math.exp(a)
            except OverflowError:
                raise EvalDomainError("exp overflow") from None
        else:
            with np.errstate(over="ignore"):
                v = np.exp(a)
        return v, v * da
    if op == "sin":
        if _is_scalar(a):
            return math.sin(a), math.cos(a) * da
        return np.sin(a), np.cos(a) * da
    if op == "cos":
        if _is_scalar(a):
            return math.cos(a), -math.sin(a) * da
        return np.cos(a), -np.sin(a) * da
    if op == "sqrt":
        _check_nonnegative(a, "sqrt")
        if _is_scalar(a):
            if a == 0.0 and da != 0.0:
                raise NonDifferentiableError("sqrt not differentiable at 0")
            v = math.sqrt(a)
            return v, (0.0 if da == 0.0 else da / (2.0 * v))
        if np.any((a == 0.0) & (np.asarray(da) != 0.0)):
            raise NonDifferentiableError("sqrt not differentiable at 0")
        v = np.sqrt(a)
        with np.errstate(divide="ignore", invalid="ignore"):
            dv = np.where(np.asarray(da) == 0.0, 0.0, da / (2.0 * v))
        return v, dv
    # abs
    if _is_scalar(a):
        if a == 0.0:
            if da != 0.0:
                raise NonDifferentiableError("abs not differentiable at 0")
            return 0.0, 0.0
        return abs(a), (da if a > 0.0 else -da)
    if np.any((a == 0.0) & (np.asarray(da) != 0.0)):
        raise NonDifferentiableError("abs not differentiable at 0")
    return np.abs(a), np.sign(a) * da


def directional_derivative(e: Expr, seeds: dict, bindings: dict):
    """Tangent of ``e`` when each variable ``v`` moves with rate ``seeds[v]``."""
    value, tangent = _ev_dual(e, bindings, seeds)
    bad = (
        not math.isfinite(value) if _is_scalar(value) else not np.all(np.isfinite(value))
    )
    if bad:
        raise EvalDomainError("non-finite result")
    if _is_scalar(tangent):
        if not math.isfinite(tangent):
            raise EvalDomainError("non-finite derivative")
        return float(tangent)
    tangent = np.asarray(tangent, dtype=float)
    if not np.all(np.isfinite(tangent)):
        raise EvalDomainError("non-finite derivative")
    return tangent


def derivative(e: Expr, var: str, bindings: dict):
    """First derivative of ``e`` with respect to ``var`` at the bound point."""
    return directional_derivative(e, {var: 1.0}, bindings)


# ---------------------------------------------------------------------------
# utilities

def variables(e: Expr) -> frozenset:
    """Free variable names appearing in the tree."""
    if type(e) is Const:
        return frozenset()
    if type(e) is Var:
        return frozenset((e.name,))
    if type(e) is Unary:
        return variables(e.arg)
    return variables(e.left) | variables(e.right)


_PRECEDENCE = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _fmt(e, parent_prec, right_side=False):
    if type(e) is Const:
        text = repr(e.value)
        return f"({text})" if e.value < 0 else text
    if type(e) is Var:
        return e.name
    if type(e) is Unary:
        if e.op == "neg":
            inner = _fmt(e.arg, _PRECEDENCE["neg"])
            text = f"-{inner}"
            return f"({text})" if parent_prec > _PRECEDENCE["neg"] or right_side else text
        return f"{e.op}({_fmt(e.arg, 0)})"
    prec = _PRECEDENCE[e.op]
    if e.op == "^":
        text = f"{_fmt(e.left, prec + 1)}^{_fmt(e.right, prec)}"
    else:
        text = f"{_fmt(e.left, prec)}{e.op}{_fmt(e.right, prec, right_side=True)}"
    if prec < parent_prec or (right_side and prec == parent_prec):
        return f"({text})"
    return text


def to_string(e: Expr) -> str:
    """Render the tree back to parseable text (round-trips through :func:`parse`)."""
    return _fmt(e, 0)
