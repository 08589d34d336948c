"""Closed-form integer-indexed sequences and bounded lag tables.

Coefficient and forcing streams are written in a small expression language:

    numbers, the index variable ``n``, operators ``+ - * / ^`` with the
    usual precedence (``^`` is right associative and binds tightest),
    parentheses, the functions ``sin``, ``cos``, ``abs``,
    ``alt(n)`` for (-1)^n, and ``per(v0, ..., vp-1)`` for a table
    indexed by ``n mod p``.

``splice(n1, before, after)`` is accepted as an extension so that
equations whose coefficients were rewritten on a finite prefix still
print to parseable text; ``before`` applies for n < n1, ``after`` after.

Evaluation is double precision and vectorized; every printed expression
re-parses to an evaluation-equivalent tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

__all__ = [
    "SeqExpr",
    "SeqClass",
    "DelaySpec",
    "SeqSyntaxError",
    "SeqEvalError",
    "parse",
    "evaluate",
    "eval_range",
    "classify",
    "bounds_on_window",
    "constant",
    "periodic_table",
    "spliced",
    "added",
]


class SeqSyntaxError(ValueError):
    """Malformed expression text; carries the character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class SeqEvalError(ArithmeticError):
    """Evaluation produced a non-finite value; carries the offending index."""

    def __init__(self, message: str, index: int):
        super().__init__(f"{message} (at n={index})")
        self.index = index


# ---------------------------------------------------------------------------
# AST


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
class Bin:
    op: str  # one of + - * / ^
    left: "Node"
    right: "Node"


@dataclass(frozen=True)
class Call:
    func: str  # sin | cos | abs | alt
    arg: "Node"


@dataclass(frozen=True)
class Per:
    values: tuple[float, ...]


@dataclass(frozen=True)
class Splice:
    cutoff: int
    before: "Node"
    after: "Node"


Node = Union[Num, Var, Neg, Bin, Call, Per, Splice]

_FUNCS = ("sin", "cos", "abs", "alt")


@dataclass(frozen=True)
class SeqExpr:
    """An immutable sequence expression: an AST plus its source text."""

    ast: Node
    source_text: str

    def __str__(self) -> str:
        return self.source_text


@dataclass(frozen=True)
class SeqClass:
    """Structural classification: 'constant', 'periodic' or 'general'."""

    tag: str
    period: Optional[int] = None


# ---------------------------------------------------------------------------
# Parsing


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str) -> SeqSyntaxError:
        return SeqSyntaxError(msg, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, ch: str) -> None:
        self.skip_ws()
        if self.peek() != ch:
            raise self.error(f"expected '{ch}'")
        self.pos += 1

    def parse(self) -> Node:
        node = self.parse_sum()
        self.skip_ws()
        if self.pos != len(self.text):
            raise self.error(f"unexpected character {self.peek()!r}")
        return node

    def parse_sum(self) -> Node:
        node = self.parse_product()
        while True:
            self.skip_ws()
            ch = self.peek()
            if ch in ("+", "-"):
                self.pos += 1
                node = Bin(ch, node, self.parse_product())
            else:
                return node

    def parse_product(self) -> Node:
        node = self.parse_unary()
        while True:
            self.skip_ws()
            ch = self.peek()
            if ch in ("*", "/"):
                self.pos += 1
                node = Bin(ch, node, self.parse_unary())
            else:
                return node

    def parse_unary(self) -> Node:
        self.skip_ws()
        if self.peek() == "-":
            self.pos += 1
            return Neg(self.parse_unary())
        if self.peek() == "+":
            self.pos += 1
            return self.parse_unary()
        return self.parse_power()

    def parse_power(self) -> Node:
        base = self.parse_atom()
        self.skip_ws()
        if self.peek() == "^":
            self.pos += 1
            # right associative; exponent may carry a sign
            return Bin("^", base, self.parse_unary())
        return base

    def parse_atom(self) -> Node:
        self.skip_ws()
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            node = self.parse_sum()
            self.expect(")")
            return node
        if ch.isdigit() or ch == ".":
            return self.parse_number()
        if ch.isalpha() or ch == "_":
            return self.parse_name()
        raise self.error("expected a number, name or '('")

    def parse_number(self) -> Num:
        start = self.pos
        text = self.text
        while self.pos < len(text) and (text[self.pos].isdigit() or text[self.pos] == "."):
            self.pos += 1
        if self.pos < len(text) and text[self.pos] in "eE":
            probe = self.pos + 1
            if probe < len(text) and text[probe] in "+-":
                probe += 1
            if probe < len(text) and text[probe].isdigit():
                self.pos = probe
                while self.pos < len(text) and text[self.pos].isdigit():
                    self.pos += 1
        try:
            return Num(float(text[start:self.pos]))
        except ValueError:
            self.pos = start
            raise self.error("bad numeric literal") from None

    def parse_name(self) -> Node:
        start = self.pos
        text = self.text
        while self.pos < len(text) and (text[self.pos].isalnum() or text[self.pos] == "_"):
            self.pos += 1
        name = text[start:self.pos]
        if name == "n":
            return Var()
        if name in _FUNCS:
            self.expect("(")
            arg = self.parse_sum()
            self.expect(")")
            return Call(name, arg)
        if name == "per":
            self.expect("(")
            values = [self.parse_const()]
            self.skip_ws()
            while self.peek() == ",":
                self.pos += 1
                values.append(self.parse_const())
                self.skip_ws()
            self.expect(")")
            return Per(tuple(values))
        if name == "splice":
            self.expect("(")
            cutoff = self.parse_const()
            if cutoff != int(cutoff):
                raise self.error("splice cutoff must be an integer")
            self.expect(",")
            before = self.parse_sum()
            self.expect(",")
            after = self.parse_sum()
            self.expect(")")
            return Splice(int(cutoff), before, after)
        self.pos = start
        raise self.error(f"unknown name {name!r}")

    def parse_const(self) -> float:
        # constant subexpression (no free n), folded at parse time
        node = self.parse_sum()
        if _contains_var(node):
            raise self.error("expected a constant expression")
        return float(_eval(node, np.zeros(1, dtype=np.int64))[0])


def _contains_var(node: Node) -> bool:
    if isinstance(node, Var):
        return True
    if isinstance(node, Neg):
        return _contains_var(node.arg)
    if isinstance(node, Bin):
        return _contains_var(node.left) or _contains_var(node.right)
    if isinstance(node, Call):
        return _contains_var(node.arg)
    if isinstance(node, Splice):
        return _contains_var(node.before) or _contains_var(node.after)
    return False


def parse(text: str) -> SeqExpr:
    """Parse expression text; raises SeqSyntaxError with a position."""
    ast = _Parser(text).parse()
    return SeqExpr(ast, _print(ast))


# ---------------------------------------------------------------------------
# Printing (canonical form; re-parses to an equivalent tree)

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _print(node: Node, parent_prec: int = 0) -> str:
    if isinstance(node, Num):
        text = repr(node.value)
        if node.value < 0 and parent_prec > _PREC["-"]:
            return f"({text})"
        return text
    if isinstance(node, Var):
        return "n"
    if isinstance(node, Neg):
        inner = _print(node.arg, _PREC["neg"])
        text = f"-{inner}"
        return f"({text})" if parent_prec > _PREC["+"] else text
    if isinstance(node, Bin):
        prec = _PREC[node.op]
        if node.op == "^":
            left = _print(node.left, prec + 1)
            right = _print(node.right, prec)
        else:
            left = _print(node.left, prec)
            right = _print(node.right, prec + 1)
        text = f"{left} {node.op} {right}" if node.op in "+-" else f"{left}{node.op}{right}"
        return f"({text})" if prec < parent_prec else text
    if isinstance(node, Call):
        return f"{node.func}({_print(node.arg)})"
    if isinstance(node, Per):
        return "per(" + ", ".join(repr(v) for v in node.values) + ")"
    if isinstance(node, Splice):
        return (
            f"splice({node.cutoff}, {_print(node.before)}, {_print(node.after)})"
        )
    raise TypeError(f"unknown node {node!r}")


# ---------------------------------------------------------------------------
# Evaluation (vectorized over int64 index arrays)


def _first_bad(values: np.ndarray, n: np.ndarray) -> int:
    bad = ~np.isfinite(values)
    return int(n[np.argmax(bad)])


def _eval(node: Node, n: np.ndarray) -> np.ndarray:
    if isinstance(node, Num):
        return np.full(n.shape, node.value)
    if isinstance(node, Var):
        return n.astype(np.float64)
    if isinstance(node, Neg):
        return -_eval(node.arg, n)
    if isinstance(node, Bin):
        left = _eval(node.left, n)
        right = _eval(node.right, n)
        if node.op == "+":
            return left + right
        if node.op == "-":
            return left - right
        if node.op == "*":
            return left * right
        if node.op == "/":
            zero = right == 0.0
            if zero.any():
                raise SeqEvalError("division by zero", int(n[np.argmax(zero)]))
            return left / right
        # power: negative base with integral exponent is fine, otherwise a
        # domain error; overflow is reported as non-finite below
        with np.errstate(all="ignore"):
            out = np.power(left, right)
        if not np.isfinite(out).all():
            raise SeqEvalError("power out of domain or overflow", _first_bad(out, n))
        return out
    if isinstance(node, Call):
        if node.func == "alt":
            arg = _eval(node.arg, n)
            rounded = np.rint(arg)
            if not np.allclose(arg, rounded, atol=1e-9):
                raise SeqEvalError(
                    "alt() needs an integer argument", int(n[np.argmax(np.abs(arg - rounded) > 1e-9)])
                )
            return np.where(rounded.astype(np.int64) % 2 == 0, 1.0, -1.0)
        arg = _eval(node.arg, n)
        if node.func == "sin":
            return np.sin(arg)
        if node.func == "cos":
            return np.cos(arg)
        if node.func == "abs":
            return np.abs(arg)
        raise TypeError(f"unknown function {node.func}")
    if isinstance(node, Per):
        if (n < 0).any():
            raise SeqEvalError("negative index", int(n[np.argmax(n < 0)]))
        table = np.asarray(node.values)
        return table[n % len(node.values)]
    if isinstance(node, Splice):
        out = np.empty(n.shape)
        mask = n < node.cutoff
        if mask.any():
            out[mask] = _eval(node.before, n[mask])
        if (~mask).any():
            out[~mask] = _eval(node.after, n[~mask])
        return out
    raise TypeError(f"unknown node {node!r}")


def eval_range(expr: SeqExpr, n0: int, n1: int) -> np.ndarray:
    """Evaluate on the inclusive integer window [n0, n1]."""
    if n1 < n0:
        return np.empty(0)
    n = np.arange(n0, n1 + 1, dtype=np.int64)
    values = _eval(expr.ast, n)
    if not np.isfinite(values).all():
        raise SeqEvalError("non-finite value", _first_bad(values, n))
    return values


def evaluate(expr: SeqExpr, n: int) -> float:
    """Evaluate at a single index n >= 0."""
    if n < 0:
        raise SeqEvalError("negative index", n)
    return float(eval_range(expr, n, n)[0])


# ---------------------------------------------------------------------------
# Classification


def _structural_period(node: Node) -> Optional[int]:
    """Exact period provable from the tree alone; None when unknown."""
    if isinstance(node, Num):
        return 1
    if isinstance(node, Per):
        return len(node.values)
    if isinstance(node, Var):
        return None
    if isinstance(node, Neg):
        return _structural_period(node.arg)
    if isinstance(node, Bin):
        left = _structural_period(node.left)
        right = _structural_period(node.right)
        if left is None or right is None:
            return None
        return math.lcm(left, right)
    if isinstance(node, Call):
        if node.func == "alt" and isinstance(node.arg, Var):
            return 2
        # a pointwise function of an exactly periodic sequence is periodic
        return _structural_period(node.arg)
    if isinstance(node, Splice):
        if node.cutoff <= 0:
            return _structural_period(node.after)
        return None
    raise TypeError(f"unknown node {node!r}")


def _minimal_period(expr: SeqExpr, period: int) -> int:
    values = eval_range(expr, 0, period - 1)
    for d in range(1, period + 1):
        if period % d:
            continue
        if all(values[i] == values[i % d] for i in range(period)):
            return d
    return period


def classify(expr: SeqExpr, probe_len: int = 64) -> SeqClass:
    """Classify as constant / periodic(p) / general.

    Periodicity is only ever declared structurally (constants, ``alt``,
    ``per`` and pointwise combinations), never inferred by probing, so
    integer-sampled transcendentals stay 'general'.  Probing is used to
    spot constants among the remaining expressions.
    """
    if probe_len < 4:
        raise ValueError("probe_len must be >= 4")
    period = _structural_period(expr.ast)
    if period is not None:
        period = _minimal_period(expr, period)
        if period == 1:
            return SeqClass("constant")
        return SeqClass("periodic", period)
    probe = eval_range(expr, 0, probe_len - 1)
    if (probe == probe[0]).all():
        return SeqClass("constant")
    return SeqClass("general")


def bounds_on_window(expr: SeqExpr, n0: int, n1: int) -> tuple[float, float]:
    """Exact (min, max) of the expression over the window [n0, n1]."""
    if n1 < n0:
        raise ValueError("empty window")
    values = eval_range(expr, n0, n1)
    return float(values.min()), float(values.max())


# ---------------------------------------------------------------------------
# Constructors used by generators and equation surgery


def constant(value: float) -> SeqExpr:
    ast = Num(float(value))
    return SeqExpr(ast, _print(ast))


def periodic_table(values) -> SeqExpr:
    ast = Per(tuple(float(v) for v in values))
    return SeqExpr(ast, _print(ast))


def spliced(cutoff: int, before: SeqExpr, after: SeqExpr) -> SeqExpr:
    """Expression equal to ``before`` for n < cutoff and ``after`` beyond."""
    if cutoff <= 0:
        return after
    ast = Splice(int(cutoff), before.ast, after.ast)
    return SeqExpr(ast, _print(ast))


def added(a: SeqExpr, b: SeqExpr) -> SeqExpr:
    """Pointwise sum of two expressions."""
    ast = Bin("+", a.ast, b.ast)
    return SeqExpr(ast, _print(ast))


# ---------------------------------------------------------------------------
# Delay specifications


@dataclass(frozen=True)
class DelaySpec:
    """Bounded integer lags; h(n) = n - lags[n mod period] <= n."""

    lags: tuple[int, ...]

    def __post_init__(self):
        if not self.lags:
            raise ValueError("empty lag table")
        for lag in self.lags:
            if not isinstance(lag, int) or lag < 0:
                raise ValueError(f"lags must be nonnegative integers, got {lag!r}")

    @staticmethod
    def constant(lag: int) -> "DelaySpec":
        return DelaySpec((int(lag),))

    @staticmethod
    def periodic(lags) -> "DelaySpec":
        return DelaySpec(tuple(int(x) for x in lags))

    @property
    def kind(self) -> str:
        return "constant" if len(set(self.lags)) == 1 else "periodic"

    @property
    def period(self) -> int:
        return len(self.lags)

    @property
    def max_lag(self) -> int:
        return max(self.lags)

    def lag_at(self, n: int) -> int:
        return self.lags[n % len(self.lags)]

    def h(self, n: int) -> int:
        return n - self.lag_at(n)

    def lag_range(self, n0: int, n1: int) -> np.ndarray:
        """Lag table on the inclusive window [n0, n1] as int64."""
        n = np.arange(n0, n1 + 1, dtype=np.int64)
        table = np.asarray(self.lags, dtype=np.int64)
        return table[n % len(self.lags)]
