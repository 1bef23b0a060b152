"""Qubit circuit IR shared by the frontend, the rewrite engine and the lowering step."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(frozen=True)
class SourceSpan:
    file: str
    line: int
    column: int

    def __str__(self) -> str:
        return f"{self.file}:{self.line}:{self.column}"


@dataclass(frozen=True)
class Gate:
    name: str
    params: tuple[float, ...]
    qubits: tuple[int, ...]

    def __str__(self) -> str:
        args = ",".join(f"q[{q}]" for q in self.qubits)
        if self.params:
            return f"{self.name}({','.join(_fmt(p) for p in self.params)}) {args};"
        return f"{self.name} {args};"


@dataclass(frozen=True)
class Barrier:
    qubits: tuple[int, ...]

    def __str__(self) -> str:
        return "barrier " + ",".join(f"q[{q}]" for q in self.qubits) + ";"


@dataclass(frozen=True)
class Measure:
    qubit: int
    clbit: int

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    def __str__(self) -> str:
        return f"measure q[{self.qubit}] -> c[{self.clbit}];"


@dataclass(frozen=True)
class Reset:
    qubit: int
    span: Optional[SourceSpan] = field(default=None, compare=False)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.qubit,)

    def __str__(self) -> str:
        return f"reset q[{self.qubit}];"


@dataclass(frozen=True)
class Conditional:
    """``if (creg == value) body`` with the creg given as its flat clbit indices."""

    clbits: tuple[int, ...]
    value: int
    body: tuple
    span: Optional[SourceSpan] = field(default=None, compare=False)

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(sorted({q for op in self.body for q in op.qubits}))


Op = Union[Gate, Barrier, Measure, Reset, Conditional]


@dataclass
class QubitCircuitIR:
    n_qubits: int
    n_clbits: int = 0
    ops: list = field(default_factory=list)

    def gates(self) -> list[Gate]:
        return [op for op in self.ops if isinstance(op, Gate)]

    def validate(self, natives=None) -> None:
        for op in self.ops:
            if any(not 0 <= q < self.n_qubits for q in op.qubits):
                raise ValueError(f"{op}: qubit index out of range")
            if len(set(op.qubits)) != len(op.qubits) and not isinstance(op, Conditional):
                raise ValueError(f"{op}: repeated qubit")
            if isinstance(op, Gate):
                if natives is not None and op.name not in natives:
                    raise ValueError(f"{op}: '{op.name}' is not native")
                if any(not math.isfinite(p) for p in op.params):
                    raise ValueError(f"{op}: non-finite parameter")

    def to_qasm(self) -> str:
        lines = ["OPENQASM 2.0;", 'include "qelib1.inc";', f"qreg q[{self.n_qubits}];"]
        if self.n_clbits:
            lines.append(f"creg c[{self.n_clbits}];")
        for op in self.ops:
            if isinstance(op, Conditional):
                raise ValueError("conditional statements cannot be printed from a flat IR")
            lines.append(str(op))
        return "\n".join(lines) + "\n"


def _fmt(x: float) -> str:
    return repr(float(x))
