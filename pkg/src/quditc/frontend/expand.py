"""Flatten registers and expand gate calls down to a native gate set."""

from __future__ import annotations

import math
from typing import Iterable

from ..ir import Barrier, Conditional, Gate, Measure, QubitCircuitIR, Reset
from .ast import (
    Argument,
    BarrierStmt,
    GateCall,
    IfStmt,
    MeasureStmt,
    QasmError,
    QasmProgram,
    ResetStmt,
    evaluate,
)


def _offsets(regs: dict[str, int]) -> dict[str, int]:
    out, k = {}, 0
    for name, size in regs.items():
        out[name] = k
        k += size
    return out


class _Expander:
    def __init__(self, program: QasmProgram, natives: Iterable[str]):
        self.prog = program
        self.natives = set(natives)
        self.qoff = _offsets(program.qregs)
        self.coff = _offsets(program.cregs)

    def qubits(self, arg: Argument) -> list[int]:
        base = self.qoff[arg.reg]
        if arg.index is not None:
            return [base + arg.index]
        return [base + k for k in range(self.prog.qregs[arg.reg])]

    def clbits(self, arg: Argument) -> list[int]:
        base = self.coff[arg.reg]
        if arg.index is not None:
            return [base + arg.index]
        return [base + k for k in range(self.prog.cregs[arg.reg])]

    def call(self, name: str, params: tuple[float, ...], qubits: tuple[int, ...], span, stack: tuple) -> list:
        gdef = self.prog.gatedefs.get(name)
        if name in self.natives:
            if gdef is not None and (len(params) != len(gdef.params) or len(qubits) != gdef.arity):
                raise QasmError(f"gate '{name}' called with wrong signature", span)
            return [Gate(name, params, qubits)]
        if gdef is None:
            raise QasmError(f"unknown gate '{name}'", span)
        if gdef.opaque:
            raise QasmError(f"opaque gate '{name}' is not native in this runtime", span)
        if name in stack:
            cycle = " -> ".join(stack[stack.index(name):] + (name,))
            raise QasmError(f"recursive gate definition: {cycle}", span)
        if len(params) != len(gdef.params) or len(qubits) != gdef.arity:
            raise QasmError(f"gate '{name}' called with wrong signature", span)
        env = dict(zip(gdef.params, params))
        wires = dict(zip(gdef.qargs, qubits))
        out: list = []
        for st in gdef.body:
            if isinstance(st, BarrierStmt):
                out.append(Barrier(tuple(wires[a.reg] for a in st.args)))
                continue
            vals = tuple(_number(evaluate(e, env), st.span) for e in st.params)
            out += self.call(st.name, vals, tuple(wires[a.reg] for a in st.args), st.span, stack + (name,))
        return out

    def gate_stmt(self, st: GateCall) -> list:
        vals = tuple(_number(evaluate(e, {}), st.span) for e in st.params)
        lists = [self.qubits(a) for a in st.args]
        width = max(len(x) for x in lists)
        out: list = []
        for k in range(width):
            qs = tuple(x[k] if len(x) > 1 else x[0] for x in lists)
            out += self.call(st.name, vals, qs, st.span, ())
        return out

    def statement(self, st) -> list:
        if isinstance(st, GateCall):
            return self.gate_stmt(st)
        if isinstance(st, MeasureStmt):
            return [Measure(q, c) for q, c in zip(self.qubits(st.src), self.clbits(st.dst))]
        if isinstance(st, BarrierStmt):
            qs: list[int] = []
            for a in st.args:
                qs += [q for q in self.qubits(a) if q not in qs]
            return [Barrier(tuple(qs))]
        if isinstance(st, ResetStmt):
            return [Reset(q, st.span) for q in self.qubits(st.arg)]
        if isinstance(st, IfStmt):
            size = self.prog.cregs[st.creg]
            clbits = tuple(self.coff[st.creg] + k for k in range(size))
            return [Conditional(clbits, st.value, tuple(self.statement(st.body)), st.span)]
        raise TypeError(f"unexpected statement {st!r}")


def _number(x: float, span) -> float:
    if not isinstance(x, (int, float)) or not math.isfinite(x):
        raise QasmError(f"parameter does not evaluate to a finite real number ({x!r})", span)
    return float(x)


def expand(program: QasmProgram, natives: Iterable[str]) -> QubitCircuitIR:
    """Expand every call recursively into ``natives``; registers are flattened in declaration order."""
    ex = _Expander(program, natives)
    ops: list = []
    for st in program.body:
        ops += ex.statement(st)
    return QubitCircuitIR(sum(program.qregs.values()), sum(program.cregs.values()), ops)


def check_ion_compatible(ir: QubitCircuitIR) -> None:
    """Reject constructs the ion targets cannot run: reset, conditionals, mid-circuit measurement."""
    measured: dict[int, Measure] = {}
    for op in ir.ops:
        if isinstance(op, Reset):
            raise QasmError("reset is not supported on ion targets", op.span)
        if isinstance(op, Conditional):
            raise QasmError("conditional 'if' statements are not supported on ion targets", op.span)
        if isinstance(op, Measure):
            if op.qubit in measured:
                raise QasmError(f"qubit {op.qubit} is measured more than once")
            measured[op.qubit] = op
        elif isinstance(op, Gate):
            hit = [q for q in op.qubits if q in measured]
            if hit:
                raise QasmError(f"gate '{op.name}' acts on qubit {hit[0]} after it was measured; ion targets allow final measurement only")
