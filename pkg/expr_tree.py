"""
Univariate expression trees over the time index t.

Nodes are immutable dataclasses. Evaluation is vectorized over numpy arrays
and raises DomainError instead of ever returning a NaN or infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple, Union

import numpy as np

from errors import DomainError, DomainReason, InvalidExpression

UNARY_OPS: Tuple[str, ...] = ("cos", "sin", "log", "exp")
BINARY_OPS: Tuple[str, ...] = ("add", "sub", "mul", "div")
MIN_EXPONENT = 2
MAX_EXPONENT = 8


@dataclass(frozen=True)
class Const:
    value: float

    def __post_init__(self) -> None:
        value = float(self.value)
        if not math.isfinite(value):
            raise InvalidExpression(f"constant must be finite, got {self.value!r}")
        object.__setattr__(self, "value", value)


@dataclass(frozen=True)
class TimeVar:
    pass


@dataclass(frozen=True)
class Unary:
    op: str
    child: "Expr"

    def __post_init__(self) -> None:
        if self.op not in UNARY_OPS:
            raise InvalidExpression(f"unknown unary operator '{self.op}'")


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"

    def __post_init__(self) -> None:
        if self.op not in BINARY_OPS:
            raise InvalidExpression(f"unknown binary operator '{self.op}'")


@dataclass(frozen=True)
class PowInt:
    base: "Expr"
    exponent: int

    def __post_init__(self) -> None:
        if isinstance(self.exponent, bool) or int(self.exponent) != self.exponent:
            raise InvalidExpression(f"exponent must be an integer, got {self.exponent!r}")
        if not MIN_EXPONENT <= self.exponent <= MAX_EXPONENT:
            raise InvalidExpression(
                f"exponent {self.exponent} outside [{MIN_EXPONENT}, {MAX_EXPONENT}]"
            )
        object.__setattr__(self, "exponent", int(self.exponent))


Expr = Union[Const, TimeVar, Unary, Binary, PowInt]
Path = Tuple[int, ...]

T = TimeVar()


@dataclass(frozen=True)
class ComplexityWeights:
    const: int = 1
    time_var: int = 1
    unary: int = 1
    binary: int = 1
    pow_int: int = 1
    exponent: int = 1

    def __post_init__(self) -> None:
        for name in ("const", "time_var", "unary", "binary", "pow_int", "exponent"):
            if getattr(self, name) < 0:
                raise InvalidExpression(f"complexity weight '{name}' must be >= 0")
        if self.const < 1 or self.time_var < 1:
            raise InvalidExpression("leaf complexity weights must be >= 1")


DEFAULT_WEIGHTS = ComplexityWeights()


# ---- evaluation ---- #

def _checked(values: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise DomainError(DomainReason.OVERFLOW)
    return values


def _eval(node: Expr, ts: np.ndarray) -> np.ndarray:
    if isinstance(node, Const):
        return np.full(ts.shape, node.value)
    if isinstance(node, TimeVar):
        return ts
    if isinstance(node, Unary):
        x = _eval(node.child, ts)
        with np.errstate(all="ignore"):
            if node.op == "cos":
                out = np.cos(x)
            elif node.op == "sin":
                out = np.sin(x)
            elif node.op == "exp":
                out = np.exp(x)
            else:
                if np.any(x <= 0.0):
                    raise DomainError(DomainReason.LOG_NON_POSITIVE)
                out = np.log(x)
        return _checked(out)
    if isinstance(node, Binary):
        a = _eval(node.left, ts)
        b = _eval(node.right, ts)
        with np.errstate(all="ignore"):
            if node.op == "add":
                out = a + b
            elif node.op == "sub":
                out = a - b
            elif node.op == "mul":
                out = a * b
            else:
                if np.any(b == 0.0):
                    raise DomainError(DomainReason.DIV_BY_ZERO)
                out = a / b
        return _checked(out)
    if isinstance(node, PowInt):
        x = _eval(node.base, ts)
        with np.errstate(all="ignore"):
            out = np.power(x, node.exponent)
        return _checked(out)
    raise InvalidExpression(f"not an expression node: {node!r}")


def evaluate_many(e: Expr, ts: Sequence[float]) -> np.ndarray:
    """Evaluate at every t; DomainError if any point fails."""
    arr = np.asarray(ts, dtype=float).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise InvalidExpression("t must be finite")
    return np.array(_eval(e, arr), dtype=float, copy=True)


def evaluate(e: Expr, t: float) -> float:
    return float(evaluate_many(e, [t])[0])


# ---- structure ---- #

def children(node: Expr) -> Tuple[Expr, ...]:
    if isinstance(node, Unary):
        return (node.child,)
    if isinstance(node, Binary):
        return (node.left, node.right)
    if isinstance(node, PowInt):
        return (node.base,)
    return ()


def with_children(node: Expr, kids: Sequence[Expr]) -> Expr:
    if isinstance(node, Unary):
        return Unary(node.op, kids[0])
    if isinstance(node, Binary):
        return Binary(node.op, kids[0], kids[1])
    if isinstance(node, PowInt):
        return PowInt(kids[0], node.exponent)
    return node


def depth(e: Expr) -> int:
    """Leaf depth is 1."""
    kids = children(e)
    return 1 + (max(depth(k) for k in kids) if kids else 0)


def iter_paths(e: Expr, prefix: Path = ()) -> Iterator[Tuple[Path, Expr]]:
    """Pre-order (path, node) pairs; a path is the child-index sequence from the root."""
    yield prefix, e
    for i, kid in enumerate(children(e)):
        yield from iter_paths(kid, prefix + (i,))


def replace_subtree(e: Expr, path: Path, new: Expr) -> Expr:
    if not path:
        return new
    kids = list(children(e))
    kids[path[0]] = replace_subtree(kids[path[0]], path[1:], new)
    return with_children(e, kids)


def constants(e: Expr) -> List[float]:
    return [node.value for _, node in iter_paths(e) if isinstance(node, Const)]


def with_constants(e: Expr, values: Sequence[float]) -> Expr:
    """Replace the Const nodes of e, in pre-order, with the given values."""
    it = iter(values)

    def rebuild(node: Expr) -> Expr:
        if isinstance(node, Const):
            return Const(next(it))
        kids = children(node)
        if not kids:
            return node
        return with_children(node, [rebuild(k) for k in kids])

    return rebuild(e)


def complexity(e: Expr, w: ComplexityWeights = DEFAULT_WEIGHTS) -> int:
    if isinstance(e, Const):
        own = w.const
    elif isinstance(e, TimeVar):
        own = w.time_var
    elif isinstance(e, Unary):
        own = w.unary
    elif isinstance(e, Binary):
        own = w.binary
    else:
        own = w.pow_int + w.exponent
    return own + sum(complexity(k, w) for k in children(e))


# ---- simplification ---- #

def _is_const(node: Expr, value: float) -> bool:
    return isinstance(node, Const) and node.value == value


def _identities(node: Expr) -> Expr:
    if not isinstance(node, Binary):
        return node
    a, b = node.left, node.right
    if node.op == "add":
        if _is_const(b, 0.0):
            return a
        if _is_const(a, 0.0):
            return b
    elif node.op == "sub":
        if _is_const(b, 0.0):
            return a
    elif node.op == "mul":
        if _is_const(a, 0.0) or _is_const(b, 0.0):
            return Const(0.0)
        if _is_const(b, 1.0):
            return a
        if _is_const(a, 1.0):
            return b
    elif node.op == "div":
        if _is_const(b, 1.0):
            return a
    return node


def simplify(e: Expr) -> Expr:
    """
    Fold t-free subtrees into constants, then apply x+0, x-0, x*1, x*0 and x/1.

    A subtree whose folding raises DomainError is left as it is.
    """
    return _simplify(e)[0]


def _simplify(e: Expr) -> Tuple[Expr, bool]:
    # (simplified node, whether it still depends on t), one pass bottom-up
    kids = children(e)
    if not kids:
        return e, isinstance(e, TimeVar)
    parts = [_simplify(k) for k in kids]
    node = with_children(e, [p for p, _ in parts])
    if not any(timed for _, timed in parts):
        try:
            return Const(float(_eval(node, np.zeros(1))[0])), False
        except DomainError:
            return node, False
    out = _identities(node)
    if isinstance(out, Const):
        return out, False
    for p, timed in parts:
        if out is p:
            return p, timed
    return out, True
