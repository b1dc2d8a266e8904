"""Parser and evaluator for the expression language used to define candidate functions.

Functions are written over the variables ``x`` (1D) or ``x`` and ``y`` (2D)
with the operators ``+ - * / ^``, parentheses, and the calls ``abs``, ``sqrt``,
``exp``, ``log``, ``sin``, ``cos``, ``floor``, ``min`` and ``max``.  ``^``
binds tighter than unary minus, which binds tighter than ``*`` and ``/``.
The full EBNF lives in the README.

Parsed expressions are immutable trees.  Evaluation is pure IEEE double
arithmetic: the same tree at the same point always produces bit-identical
results, which the witness machinery in :mod:`quasiconv.classifiers` relies on.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Iterator, Optional, Union

import numpy as np

__all__ = [
    "Axis",
    "ArityError",
    "DomainError",
    "Expr",
    "ExprSyntaxError",
    "FunctionSpec",
    "evaluate",
    "eval_array",
    "parse",
    "restrict",
]


class ExprSyntaxError(ValueError):
    """Raised when expression text cannot be parsed; carries the 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"SyntaxError at offset {position}: {message}")
        self.message = message
        self.position = position


class ArityError(ValueError):
    """Raised when an expression uses variables its declared arity does not allow."""

    def __init__(self, message: str, position: Optional[int] = None):
        if position is not None:
            message = f"{message} (offset {position})"
        super().__init__(message)
        self.position = position


class DomainError(ArithmeticError):
    """Evaluation left the real domain (log/sqrt of a negative, division by zero,
    overflow).  Carries the point at which the function is undefined."""

    def __init__(self, reason: str, point: Optional[tuple] = None):
        self.reason = reason
        self.point = point
        where = "" if point is None else f" at {point}"
        super().__init__(f"{reason}{where}")


class Axis(Enum):
    """Names the co-ordinate a 2D expression is frozen along."""

    X = "x"
    Y = "y"


# ---------------------------------------------------------------------------
# Tree nodes


@dataclass(frozen=True)
class _Const:
    value: float


@dataclass(frozen=True)
class _Var:
    name: str  # "x" or "y"


@dataclass(frozen=True)
class _Unary:
    op: str  # neg abs sqrt exp log sin cos floor
    arg: "_Node"


@dataclass(frozen=True)
class _Binary:
    op: str  # + - * / ^ min max
    left: "_Node"
    right: "_Node"


_Node = Union[_Const, _Var, _Unary, _Binary]

_UNARY_FUNCS = ("abs", "sqrt", "exp", "log", "sin", "cos", "floor")
_BINARY_FUNCS = ("min", "max")


@dataclass(frozen=True)
class Expr:
    """An immutable parsed expression together with its declared arity."""

    root: _Node
    arity: int
    text: str

    def variables(self) -> frozenset[str]:
        return frozenset(_collect_vars(self.root))

    def __call__(self, x: float, y: Optional[float] = None) -> float:
        if self.arity == 2 and y is None:
            raise ArityError("2D expression needs both co-ordinates")
        if self.arity == 1 and y is not None:
            raise ArityError("1D expression takes a single co-ordinate")
        point = (float(x),) if y is None else (float(x), float(y))
        try:
            return float(_eval_node(self.root, point[0], point[1] if y is not None else 0.0))
        except DomainError as err:
            raise DomainError(err.reason, point) from None

    def restrict(self, axis: Axis, value: float) -> "Expr":
        return restrict(self, axis, value)

    def __str__(self) -> str:
        return self.text


# The checker modules take a "function spec" as their universal input;
# it is exactly a parsed expression.
FunctionSpec = Expr


def _collect_vars(node: _Node) -> Iterator[str]:
    if isinstance(node, _Var):
        yield node.name
    elif isinstance(node, _Unary):
        yield from _collect_vars(node.arg)
    elif isinstance(node, _Binary):
        yield from _collect_vars(node.left)
        yield from _collect_vars(node.right)


# ---------------------------------------------------------------------------
# Tokenizer

_TOKEN_RE = re.compile(
    r"""(?P<num>(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?)
      | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
      | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch in " \t\r\n":
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ExprSyntaxError(f"unexpected character {ch!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


# ---------------------------------------------------------------------------
# Recursive-descent parser
#
#   sum     := product { ("+" | "-") product }
#   product := unary { ("*" | "/") unary }
#   unary   := "-" unary | power
#   power   := atom [ "^" unary ]
#   atom    := NUMBER | VAR | FUNC "(" sum {"," sum} ")" | "(" sum ")"


class _Parser:
    def __init__(self, tokens: list[tuple[str, str, int]], arity: int):
        self.tokens = tokens
        self.arity = arity
        self.i = 0

    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def advance(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        kind, value, pos = self.peek()
        if kind != "op" or value != op:
            raise ExprSyntaxError(f"expected {op!r}", pos)
        self.advance()

    def at_op(self, *ops: str) -> bool:
        kind, value, _ = self.peek()
        return kind == "op" and value in ops

    def parse_sum(self) -> _Node:
        node = self.parse_product()
        while self.at_op("+", "-"):
            _, op, _ = self.advance()
            node = _Binary(op, node, self.parse_product())
        return node

    def parse_product(self) -> _Node:
        node = self.parse_unary()
        while self.at_op("*", "/"):
            _, op, _ = self.advance()
            node = _Binary(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> _Node:
        if self.at_op("-"):
            self.advance()
            return _Unary("neg", self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> _Node:
        node = self.parse_atom()
        if self.at_op("^"):
            self.advance()
            node = _Binary("^", node, self.parse_unary())
        return node

    def parse_atom(self) -> _Node:
        kind, value, pos = self.peek()
        if kind == "num":
            self.advance()
            return _Const(float(value))
        if kind == "name":
            self.advance()
            return self.finish_name(value, pos)
        if kind == "op" and value == "(":
            self.advance()
            node = self.parse_sum()
            self.expect_op(")")
            return node
        raise ExprSyntaxError("expected a number, variable, call or '('", pos)

    def finish_name(self, name: str, pos: int) -> _Node:
        if name in _UNARY_FUNCS:
            self.expect_op("(")
            arg = self.parse_sum()
            self.expect_op(")")
            return _Unary(name, arg)
        if name in _BINARY_FUNCS:
            self.expect_op("(")
            left = self.parse_sum()
            self.expect_op(",")
            right = self.parse_sum()
            self.expect_op(")")
            return _Binary(name, left, right)
        if name == "t":
            raise ExprSyntaxError(
                "variable 't' is reserved for the convexity parameter", pos
            )
        if name == "x":
            return _Var("x")
        if name == "y":
            if self.arity == 1:
                raise ArityError("variable 'y' is not allowed in a 1D expression", pos)
            return _Var("y")
        raise ExprSyntaxError(f"unknown identifier {name!r}", pos)


def parse(text: str, arity: int) -> Expr:
    """Parse ``text`` into an immutable expression of the given arity (1 or 2).

    Raises :class:`ExprSyntaxError` with the failing offset on malformed input
    and :class:`ArityError` when a 1D expression mentions ``y``.
    """
    if arity not in (1, 2):
        raise ValueError("arity must be 1 or 2")
    if not text or not text.strip():
        raise ExprSyntaxError("empty expression", 0)
    tokens = _tokenize(text)
    parser = _Parser(tokens, arity)
    try:
        root = parser.parse_sum()
    except RecursionError:
        raise ExprSyntaxError("expression is nested too deeply", parser.peek()[2]) from None
    kind, _, pos = parser.peek()
    if kind != "end":
        raise ExprSyntaxError("unexpected trailing input", pos)
    return Expr(root, arity, text)


# ---------------------------------------------------------------------------
# Scalar evaluation
#
# Every node checks finiteness so that a transient overflow cannot cancel
# later and silently produce a value the vectorised path would mask out.


def _eval_node(node: _Node, x: float, y: float) -> float:
    if isinstance(node, _Const):
        return node.value
    if isinstance(node, _Var):
        return x if node.name == "x" else y
    if isinstance(node, _Unary):
        v = _eval_node(node.arg, x, y)
        op = node.op
        if op == "neg":
            return -v
        if op == "abs":
            return abs(v)
        if op == "floor":
            return float(math.floor(v))
        if op == "sqrt":
            if v < 0.0:
                raise DomainError(f"sqrt of negative value {v!r}")
            return math.sqrt(v)
        if op == "exp":
            try:
                return math.exp(v)
            except OverflowError:
                raise DomainError(f"exp overflow on {v!r}") from None
        if op == "log":
            if v <= 0.0:
                raise DomainError(f"log of non-positive value {v!r}")
            return math.log(v)
        if op == "sin":
            return math.sin(v)
        if op == "cos":
            return math.cos(v)
        raise AssertionError(f"unknown unary op {op!r}")
    assert isinstance(node, _Binary)
    a = _eval_node(node.left, x, y)
    b = _eval_node(node.right, x, y)
    op = node.op
    if op == "+":
        r = a + b
    elif op == "-":
        r = a - b
    elif op == "*":
        r = a * b
    elif op == "/":
        if b == 0.0:
            raise DomainError("division by zero")
        r = a / b
    elif op == "^":
        try:
            r = math.pow(a, b)
        except (ValueError, OverflowError):
            raise DomainError(f"{a!r} ^ {b!r} is not a finite real") from None
    elif op == "min":
        r = min(a, b)
    elif op == "max":
        r = max(a, b)
    else:
        raise AssertionError(f"unknown binary op {op!r}")
    if not math.isfinite(r):
        raise DomainError(f"overflow in {op!r}")
    return r


def evaluate(expr: Expr, x: float, y: Optional[float] = None) -> float:
    """Evaluate ``expr`` at a point in IEEE double precision.

    Raises :class:`DomainError` carrying the offending point when the function
    is undefined there; callers must treat that as "f undefined here" rather
    than skip it.
    """
    return expr(x, y)


# ---------------------------------------------------------------------------
# Vectorised evaluation (screening engine)
#
# Returns values plus a validity mask.  A lane is invalid as soon as any node
# evaluation leaves the finite reals, matching where the scalar walk raises.


def eval_array(
    expr: Expr, xs: np.ndarray, ys: Optional[np.ndarray] = None
) -> tuple[np.ndarray, np.ndarray]:
    if expr.arity == 2 and ys is None:
        raise ArityError("2D expression needs both co-ordinate arrays")
    xs = np.asarray(xs, dtype=float)
    ys_arr = xs if ys is None else np.asarray(ys, dtype=float)
    bad = np.zeros(xs.shape, dtype=bool)
    with np.errstate(all="ignore"):
        vals = _eval_vec(expr.root, xs, ys_arr, bad)
    vals = np.broadcast_to(np.asarray(vals, dtype=float), xs.shape)
    return vals, ~bad


def _eval_vec(node: _Node, xs: np.ndarray, ys: np.ndarray, bad: np.ndarray):
    if isinstance(node, _Const):
        return node.value
    if isinstance(node, _Var):
        return xs if node.name == "x" else ys
    if isinstance(node, _Unary):
        v = _eval_vec(node.arg, xs, ys, bad)
        op = node.op
        if op == "neg":
            return np.negative(v)
        if op == "abs":
            return np.abs(v)
        if op == "floor":
            return np.floor(v)
        if op == "sqrt":
            r = np.sqrt(v)
        elif op == "exp":
            r = np.exp(v)
        elif op == "log":
            r = np.log(v)
        elif op == "sin":
            return np.sin(v)
        elif op == "cos":
            return np.cos(v)
        else:
            raise AssertionError(f"unknown unary op {op!r}")
        bad |= ~np.isfinite(r)
        return r
    assert isinstance(node, _Binary)
    a = _eval_vec(node.left, xs, ys, bad)
    b = _eval_vec(node.right, xs, ys, bad)
    op = node.op
    if op == "+":
        r = np.add(a, b)
    elif op == "-":
        r = np.subtract(a, b)
    elif op == "*":
        r = np.multiply(a, b)
    elif op == "/":
        r = np.divide(a, b)
    elif op == "^":
        r = np.power(a, b)
    elif op == "min":
        return np.minimum(a, b)
    elif op == "max":
        return np.maximum(a, b)
    else:
        raise AssertionError(f"unknown binary op {op!r}")
    bad |= ~np.isfinite(r)
    return r


# ---------------------------------------------------------------------------
# Restriction to a partial mapping


def restrict(expr: Expr, axis: Axis, value: float) -> Expr:
    """Freeze one co-ordinate of a 2D expression, returning the 1D slice.

    Evaluating the result at ``v`` is bit-identical to evaluating the original
    at the corresponding 2D point: the frozen variable is replaced by a
    constant node and the remaining variable renamed, leaving every arithmetic
    operation untouched.
    """
    if expr.arity != 2:
        raise ArityError("restrict needs a 2D expression")
    frozen = axis.value
    value = float(value)

    def subst(node: _Node) -> _Node:
        if isinstance(node, _Const):
            return node
        if isinstance(node, _Var):
            if node.name == frozen:
                return _Const(value)
            return _Var("x")
        if isinstance(node, _Unary):
            return _Unary(node.op, subst(node.arg))
        return _Binary(node.op, subst(node.left), subst(node.right))

    root = subst(expr.root)
    return Expr(root, 1, unparse(root))


# ---------------------------------------------------------------------------
# Chord parameterisations and small combinators
#
# The substituted trees compute t*a + (1-t)*b and (1-t)*a + t*b with exactly
# the arithmetic the class templates use, so chord integrands agree with
# pointwise template evaluations.


def chord_substitution(expr: Expr, axis: Axis, a: float, b: float, reverse: bool = False) -> Expr:
    """Replace the ``axis`` variable with the chord point ``t*a + (1-t)*b``
    (or ``(1-t)*a + t*b`` when ``reverse``), the parameter t being read from
    that same variable slot."""
    a, b = float(a), float(b)
    var = _Var(axis.value)
    if reverse:
        chord: _Node = _Binary(
            "+",
            _Binary("*", _Binary("-", _Const(1.0), var), _Const(a)),
            _Binary("*", var, _Const(b)),
        )
    else:
        chord = _Binary(
            "+",
            _Binary("*", var, _Const(a)),
            _Binary("*", _Binary("-", _Const(1.0), var), _Const(b)),
        )

    def subst(node: _Node) -> _Node:
        if isinstance(node, _Const):
            return node
        if isinstance(node, _Var):
            return chord if node.name == axis.value else node
        if isinstance(node, _Unary):
            return _Unary(node.op, subst(node.arg))
        return _Binary(node.op, subst(node.left), subst(node.right))

    root = subst(expr.root)
    return Expr(root, expr.arity, unparse(root))


def difference(g: Expr, h: Expr) -> Expr:
    """The expression ``g - h`` (same arity)."""
    if g.arity != h.arity:
        raise ArityError("difference needs matching arities")
    root = _Binary("-", g.root, h.root)
    return Expr(root, g.arity, unparse(root))


def absolute(e: Expr) -> Expr:
    root = _Unary("abs", e.root)
    return Expr(root, e.arity, unparse(root))


# ---------------------------------------------------------------------------
# Unparser (used for slices, search families and reports)

_LEVEL_SUM, _LEVEL_PRODUCT, _LEVEL_UNARY, _LEVEL_POWER, _LEVEL_ATOM = 1, 2, 3, 4, 5


def unparse(node: _Node) -> str:
    """Render a tree as text that reparses to a bit-identically evaluating tree.

    The only structural difference a round trip can introduce is a negative
    constant coming back as a negation node, which evaluates to the same
    double exactly.
    """
    text, _ = _unparse(node)
    return text


def _wrap(child: _Node, min_level: int) -> str:
    text, level = _unparse(child)
    if level < min_level:
        return f"({text})"
    return text


def _unparse(node: _Node) -> tuple[str, int]:
    if isinstance(node, _Const):
        v = node.value
        if v < 0 or math.copysign(1.0, v) < 0:
            return f"-{-v!r}", _LEVEL_UNARY
        return repr(v), _LEVEL_ATOM
    if isinstance(node, _Var):
        return node.name, _LEVEL_ATOM
    if isinstance(node, _Unary):
        if node.op == "neg":
            return f"-{_wrap(node.arg, _LEVEL_UNARY)}", _LEVEL_UNARY
        inner, _ = _unparse(node.arg)
        return f"{node.op}({inner})", _LEVEL_ATOM
    assert isinstance(node, _Binary)
    op = node.op
    if op in ("min", "max"):
        left, _ = _unparse(node.left)
        right, _ = _unparse(node.right)
        return f"{op}({left}, {right})", _LEVEL_ATOM
    if op in ("+", "-"):
        left = _wrap(node.left, _LEVEL_SUM)
        right = _wrap(node.right, _LEVEL_PRODUCT)
        return f"{left} {op} {right}", _LEVEL_SUM
    if op in ("*", "/"):
        left = _wrap(node.left, _LEVEL_PRODUCT)
        right = _wrap(node.right, _LEVEL_UNARY)
        return f"{left}{op}{right}", _LEVEL_PRODUCT
    # '^' is right-associative and parses its exponent as a unary
    left = _wrap(node.left, _LEVEL_ATOM)
    right = _wrap(node.right, _LEVEL_UNARY)
    return f"{left}^{right}", _LEVEL_POWER
