"""Qubit IR (rz, r, cz, multicontrolled-Z) to qudit operations (Ph, R, XX)."""

from __future__ import annotations

import math

from .ir import Barrier, Gate, QubitCircuitIR
from .oracle import mcz_arity
from .qudit import Mapping, Ph, QBarrier, QuditCircuit, QuditParams, R, XX, inverse_ops, phase_on_level

PI = math.pi


class LoweringError(ValueError):
    pass


# -- frozen templates ---------------------------------------------------------


def cz_template(a: int, b: int) -> list:
    """Exact CZ between levels {0,1} of qudits a and b using one XX(pi/4).

    exp(-i pi/4 Z(x)Z) is XX(pi/4) conjugated by y-rotations; the remaining
    single-qubit Z phases are Ph^1(-pi/2) on both sides.
    """
    return [
        R(a, 0, 1, -PI / 2, PI / 2),
        R(b, 0, 1, -PI / 2, PI / 2),
        XX(a, b, (0, 1), (0, 1), PI / 4),
        R(a, 0, 1, PI / 2, PI / 2),
        R(b, 0, 1, PI / 2, PI / 2),
        Ph(a, 1, -PI / 2),
        Ph(b, 1, -PI / 2),
    ]


def controlled_flip(control: int, active: int, target: int, pair: tuple[int, int]) -> list:
    """Flip levels ``pair`` of ``target`` when ``control`` sits on level ``active``.

    Uses one XX(pi/2) between the two remaining control levels and the target
    pair. The result is monomial on levels {0,1,2}: inactive control levels pick
    up a +-1 phase, the active branch picks up -i.
    """
    p, q = [lv for lv in range(3) if lv != active]
    return [
        R(control, p, q, -PI / 2, PI / 2),
        XX(control, target, (p, q), pair, PI / 2),
        R(control, p, q, PI / 2, PI / 2),
        R(target, pair[0], pair[1], PI, 0.0),
    ]


def controlled_z_level2(control: int, target: int, d: int) -> list:
    """Exact CZ^{2|1}: phase -1 on |control=2, target=1>, for target in {0,1}."""
    hadamard = [R(target, 0, 1, PI / 2, -PI / 2), Ph(target, 1, PI)]
    flip = controlled_flip(control, 2, target, (0, 1))
    # inactive levels 0/1 carry +1/-1 and the active branch -i
    fix = phase_on_level(control, 1, PI, d) + phase_on_level(control, 2, PI / 2, d)
    return hadamard + flip + fix + hadamard


def mcz_ladder(controls: list[int], target: int, d: int) -> list:
    """Multicontrolled Z on qutrit-or-larger qudits with 2N-3 XX gates.

    Control k+1 is lifted to level 2 when all controls up to k are |1>; the last
    control then drives a CZ^{2|1} onto the target and the ladder is undone.
    """
    if d < 3:
        raise LoweringError("the ancilla-level ladder needs d >= 3")
    if not controls:
        raise LoweringError("mcz needs at least one control")
    if len(controls) == 1:
        return cz_template(controls[0], target)
    forward = controlled_flip(controls[0], 1, controls[1], (1, 2))
    for prev, nxt in zip(controls[1:], controls[2:]):
        forward += controlled_flip(prev, 2, nxt, (1, 2))
    return forward + controlled_z_level2(controls[-1], target, d) + inverse_ops(forward)


def mcz_network(qubits) -> list[Gate]:
    """Ancilla-free multicontrolled Z over rz/r/cz (2**n - 2 CNOTs, Gray-code order).

    Uses x1...xn = 2**(1-n) * sum_S (-1)**(|S|-1) parity(S) and accumulates each
    parity on the highest qubit of S.
    """
    n = len(qubits)
    if n < 2:
        raise LoweringError("mcz needs at least two qubits")
    if n == 2:
        return [Gate("cz", (), tuple(qubits))]
    ops: list[Gate] = []

    def phase(size: int) -> float:
        return (-1) ** (size - 1) * PI / 2 ** (n - 1)

    def cx(c: int, t: int) -> list[Gate]:
        h = [Gate("r", (PI / 2, -PI / 2), (t,)), Gate("rz", (PI,), (t,))]
        return h + [Gate("cz", (), (c, t))] + h

    ops.append(Gate("rz", (phase(1),), (qubits[0],)))
    for h in range(1, n):
        acc = qubits[h]
        ops.append(Gate("rz", (phase(1),), (acc,)))
        prev = 0
        for k in range(1, 2**h):
            g = k ^ (k >> 1)
            bit = (g ^ prev).bit_length() - 1
            ops += cx(qubits[bit], acc)
            ops.append(Gate("rz", (phase(bin(g).count("1") + 1),), (acc,)))
            prev = g
        ops += cx(qubits[prev.bit_length() - 1], acc)
    return ops


def expand_mcz_networks(ir: QubitCircuitIR) -> QubitCircuitIR:
    """Replace every mcz of arity >= 3 by its rz/r/cz network (for d = 2**b)."""
    ops: list = []
    for op in ir.ops:
        if isinstance(op, Gate) and mcz_arity(op.name) >= 3:
            ops += mcz_network(op.qubits)
        else:
            ops.append(op)
    return QubitCircuitIR(ir.n_qubits, ir.n_clbits, ops)


# -- per-gate lowering ---------------------------------------------------------


def _slot_pairs(slot: int, b: int) -> list[tuple[int, int]]:
    bit = 1 << slot
    return [(lv, lv | bit) for lv in range(2**b) if not lv & bit]


def _slot_levels(slot: int, b: int) -> list[int]:
    return [lv for lv in range(2**b) if lv & (1 << slot)]


def lower_gate(gate: Gate, params: QuditParams, mapping: Mapping) -> list:
    d, b = params.d, params.b
    qd = [mapping.qudits[q] for q in gate.qubits]
    sl = [mapping.slots[q] for q in gate.qubits]
    if gate.name == "r":
        theta, phi = gate.params
        return [R(qd[0], i, j, theta, phi) for i, j in _slot_pairs(sl[0], b)]
    if gate.name == "rz":
        return [Ph(qd[0], lv, gate.params[0]) for lv in _slot_levels(sl[0], b)]
    arity = mcz_arity(gate.name)
    if arity == 2:
        return _lower_cz(qd, sl, params)
    if arity >= 3:
        if b == 1 and d >= 3:
            return mcz_ladder(qd[:-1], qd[-1], d)
        if d == 2**b:
            out = []
            for g in mcz_network(gate.qubits):
                out += lower_gate(g, params, mapping)
            return out
        raise LoweringError(f"{gate.name}: no decomposition for d={d}, b={b}")
    raise LoweringError(f"gate '{gate.name}' is not part of the ion intermediate representation")


def _lower_cz(qd, sl, params: QuditParams) -> list:
    d, b = params.d, params.b
    if b == 1:
        return cz_template(qd[0], qd[1])
    if qd[0] == qd[1]:
        both = (1 << sl[0]) | (1 << sl[1])
        return [Ph(qd[0], lv, PI) for lv in range(2**b) if lv & both == both]
    if b == 2:
        i, j = 1 << sl[0], 1 << sl[1]
        return [XX(qd[0], qd[1], (i, 3), (j, 3), PI)]
    raise LoweringError(f"cz across qudits is not tabulated for b={b}")


def lower(ir: QubitCircuitIR, params: QuditParams, mapping: Mapping) -> QuditCircuit:
    if mapping.n_qubits < ir.n_qubits:
        raise LoweringError(f"mapping covers {mapping.n_qubits} qubits, circuit has {ir.n_qubits}")
    if mapping.b != params.b:
        raise LoweringError(f"mapping built for b={mapping.b}, parameters say b={params.b}")
    ops: list = []
    for op in ir.ops:
        if isinstance(op, Barrier):
            ops.append(QBarrier(tuple(sorted({mapping.qudits[q] for q in op.qubits}))))
        elif isinstance(op, Gate):
            ops += lower_gate(op, params, mapping)
        else:
            raise LoweringError(f"cannot lower non-gate operation {op}")
    circuit = QuditCircuit(max(mapping.n_qudits, 1), params.d, ops)
    circuit.validate()
    return circuit
