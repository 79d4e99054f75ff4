"""Scalar expressions for premise variables and membership functions.

Grammar (lowest to highest precedence)::

    sum     := product (("+" | "-") product)*
    product := unary (("*" | "/") unary)*
    unary   := "-" unary | power
    power   := atom ("^" unary)?
    atom    := NUMBER | NAME | NAME "(" sum ("," sum)* ")" | "(" sum ")"

Names are ``z`` and ``x1``, ``x2``, ... (1-based state indices). Functions
are ``sin``, ``cos``, ``abs``, ``min`` and ``max``; angles are in radians.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union


class ExprError(ValueError):
    pass


class ExprSyntaxError(ExprError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class ExprEvalError(ExprError):
    pass


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str  # "z" or "x<k>"


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]


Expr = Union[Num, Var, Neg, BinOp, Call]

FUNCTIONS = {
    "sin": (1, 1),
    "cos": (1, 1),
    "abs": (1, 1),
    "min": (2, None),
    "max": (2, None),
}

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^(),]))"
)
_STATE_VAR = re.compile(r"x([1-9]\d*)\Z")


def _tokenize(src: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(src):
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if m is None:
            # skip whitespace so the offset points at the bad character
            bad = pos + len(src[pos:]) - len(src[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {src[bad]!r}", bad)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(src)))
    return tokens


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, value, offset = self.take()
        if value != text or kind != "op":
            what = "end of input" if kind == "end" else repr(value)
            raise ExprSyntaxError(f"expected {text!r}, found {what}", offset)

    def parse(self) -> Expr:
        e = self.sum()
        kind, value, offset = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected {value!r}", offset)
        return e

    def sum(self) -> Expr:
        left = self.product()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            left = BinOp(op, left, self.product())
        return left

    def product(self) -> Expr:
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, value, offset = self.take()
        if kind == "num":
            return Num(float(value))
        if kind == "name":
            if self.peek()[:2] == ("op", "("):
                if value not in FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function {value!r}", offset)
                self.take()
                args = [self.sum()]
                while self.peek()[:2] == ("op", ","):
                    self.take()
                    args.append(self.sum())
                self.expect(")")
                lo, hi = FUNCTIONS[value]
                if len(args) < lo or (hi is not None and len(args) > hi):
                    raise ExprSyntaxError(f"{value}() takes {lo}{'' if hi == lo else '+'} argument(s)", offset)
                return Call(value, tuple(args))
            if value == "z" or _STATE_VAR.match(value):
                return Var(value)
            raise ExprSyntaxError(f"unknown identifier {value!r}", offset)
        if (kind, value) == ("op", "("):
            e = self.sum()
            self.expect(")")
            return e
        what = "end of input" if kind == "end" else repr(value)
        raise ExprSyntaxError(f"unexpected {what}", offset)


def parse(src: str) -> Expr:
    if not src or not src.strip():
        raise ExprSyntaxError("empty expression", 0)
    return _Parser(src).parse()


def variables(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Num):
        return set()
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    return set().union(*(variables(a) for a in e.args))


def max_state_index(e: Expr) -> int:
    """Largest ``k`` among the ``xk`` variables in ``e`` (0 if none)."""
    return max((int(v[1:]) for v in variables(e) if v != "z"), default=0)


def _check(value: float) -> float:
    if not math.isfinite(value):
        raise ExprEvalError("non-finite result")
    return value


def evaluate(e: Expr, state=(), z: float = 0.0) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        if e.name == "z":
            return float(z)
        k = int(e.name[1:])
        if k > len(state):
            raise ExprEvalError(f"{e.name} referenced but state has dimension {len(state)}")
        return float(state[k - 1])
    if isinstance(e, Neg):
        return -evaluate(e.operand, state, z)
    if isinstance(e, BinOp):
        a = evaluate(e.left, state, z)
        b = evaluate(e.right, state, z)
        if e.op == "+":
            return _check(a + b)
        if e.op == "-":
            return _check(a - b)
        if e.op == "*":
            return _check(a * b)
        if e.op == "/":
            if b == 0.0:
                raise ExprEvalError("division by zero")
            return _check(a / b)
        try:
            return _check(float(a**b))
        except (OverflowError, ZeroDivisionError) as exc:
            raise ExprEvalError(str(exc)) from None
        except TypeError:
            raise ExprEvalError("complex result from '^'") from None
    args = [evaluate(a, state, z) for a in e.args]
    if e.func == "sin":
        return math.sin(args[0])
    if e.func == "cos":
        return math.cos(args[0])
    if e.func == "abs":
        return abs(args[0])
    if e.func == "min":
        return min(args)
    return max(args)


def to_string(e: Expr) -> str:
    """Fully parenthesized text that parses back to the same tree."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        return f"(-{to_string(e.operand)})"
    if isinstance(e, BinOp):
        return f"({to_string(e.left)} {e.op} {to_string(e.right)})"
    return f"{e.func}({', '.join(to_string(a) for a in e.args)})"
