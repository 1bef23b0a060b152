"""Syntax tree for OpenQASM 2.0 programs. Expressions stay unevaluated."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

from ..ir import SourceSpan


class QasmError(ValueError):
    def __init__(self, message: str, span: Optional[SourceSpan] = None):
        super().__init__(f"{span}: {message}" if span else message)
        self.message = message
        self.span = span


# -- expressions --------------------------------------------------------------


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Ident:
    name: str
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Expr"
    span: SourceSpan = field(compare=False)


Expr = Union[Number, Ident, Pi, Neg, BinOp, Func]

_FUNCS = {"sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp, "ln": math.log, "sqrt": math.sqrt}
FUNCTION_NAMES = frozenset(_FUNCS)


def evaluate(expr: Expr, env: dict[str, float]) -> float:
    if isinstance(expr, Number):
        return expr.value
    if isinstance(expr, Pi):
        return math.pi
    if isinstance(expr, Ident):
        if expr.name not in env:
            raise QasmError(f"unknown parameter '{expr.name}'", expr.span)
        return env[expr.name]
    if isinstance(expr, Neg):
        return -evaluate(expr.operand, env)
    if isinstance(expr, Func):
        x = evaluate(expr.arg, env)
        try:
            return _FUNCS[expr.name](x)
        except (ValueError, OverflowError) as exc:
            raise QasmError(f"{expr.name}({x!r}) is not a real number: {exc}", expr.span) from None
    if isinstance(expr, BinOp):
        a, b = evaluate(expr.left, env), evaluate(expr.right, env)
        try:
            if expr.op == "+":
                return a + b
            if expr.op == "-":
                return a - b
            if expr.op == "*":
                return a * b
            if expr.op == "/":
                return a / b
            r = a**b
        except (ZeroDivisionError, OverflowError) as exc:
            raise QasmError(f"cannot evaluate '{expr.op}': {exc}") from None
        if isinstance(r, complex):
            raise QasmError(f"{a!r}^{b!r} is not a real number")
        return r
    raise TypeError(f"not an expression: {expr!r}")


# -- statements ---------------------------------------------------------------


@dataclass(frozen=True)
class Argument:
    """``reg`` or ``reg[index]``; inside gate bodies ``reg`` names a formal qubit."""

    reg: str
    index: Optional[int]
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class GateCall:
    name: str
    params: tuple
    args: tuple[Argument, ...]
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class MeasureStmt:
    src: Argument
    dst: Argument
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class BarrierStmt:
    args: tuple[Argument, ...]
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class ResetStmt:
    arg: Argument
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class IfStmt:
    creg: str
    value: int
    body: Union[GateCall, MeasureStmt, ResetStmt]
    span: SourceSpan = field(compare=False)


Statement = Union[GateCall, MeasureStmt, BarrierStmt, ResetStmt, IfStmt]


@dataclass(frozen=True)
class GateDef:
    name: str
    params: tuple[str, ...]
    qargs: tuple[str, ...]
    body: Optional[tuple]  # None for opaque
    span: SourceSpan = field(compare=False)

    @property
    def opaque(self) -> bool:
        return self.body is None

    @property
    def arity(self) -> int:
        return len(self.qargs)


@dataclass
class QasmProgram:
    version: str = "2.0"
    includes: list[str] = field(default_factory=list)
    qregs: dict[str, int] = field(default_factory=dict)
    cregs: dict[str, int] = field(default_factory=dict)
    gatedefs: dict[str, GateDef] = field(default_factory=dict)
    body: list = field(default_factory=list)

    def opaque_gates(self) -> dict[str, GateDef]:
        return {n: g for n, g in self.gatedefs.items() if g.opaque}
