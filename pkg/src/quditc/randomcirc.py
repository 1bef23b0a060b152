"""Seeded random circuits for property checks and experiments."""

from __future__ import annotations

import math

import numpy as np

from .ir import Gate, QubitCircuitIR
from .qudit import Ph, QuditCircuit, R, XX


def random_ion_ir(rng: np.random.Generator, n_qubits: int, n_gates: int, mcz: bool = False) -> QubitCircuitIR:
    """Random circuit over rz, r, cz (and ccz when ``mcz`` and n_qubits >= 3)."""
    kinds = ["rz", "r", "cz"] + (["ccz"] if mcz and n_qubits >= 3 else [])
    ops = []
    for _ in range(n_gates):
        kind = kinds[rng.integers(len(kinds))]
        if kind == "rz":
            ops.append(Gate("rz", (_angle(rng),), (int(rng.integers(n_qubits)),)))
        elif kind == "r":
            ops.append(Gate("r", (_angle(rng), _angle(rng)), (int(rng.integers(n_qubits)),)))
        else:
            k = 2 if kind == "cz" else 3
            if n_qubits < k:
                continue
            qs = tuple(int(q) for q in rng.choice(n_qubits, size=k, replace=False))
            ops.append(Gate(kind, (), qs))
    return QubitCircuitIR(n_qubits, 0, ops)


def _angle(rng: np.random.Generator) -> float:
    # mix generic angles with multiples of pi/2 so merge and identity rules fire
    if rng.random() < 0.3:
        return float(rng.integers(-4, 5)) * math.pi / 2
    return float(rng.uniform(-2 * math.pi, 2 * math.pi))


def random_qudit(rng: np.random.Generator, n_qudits: int, d: int, n_ops: int, star_only: bool = False) -> QuditCircuit:
    """Random Ph/R/XX circuit; with ``star_only`` R uses pairs (0,k) and XX uses (0,1)|(0,1)."""
    ops = []
    for _ in range(n_ops):
        u = rng.random()
        q = int(rng.integers(n_qudits))
        if u < 0.3:
            ops.append(Ph(q, int(rng.integers(1, d)), _angle(rng)))
        elif u < 0.75 or n_qudits < 2:
            if star_only:
                i, j = 0, int(rng.integers(1, d))
            else:
                i, j = (int(x) for x in rng.choice(d, size=2, replace=False))
            ops.append(R(q, i, j, _angle(rng), _angle(rng)))
        else:
            a, b = (int(x) for x in rng.choice(n_qudits, size=2, replace=False))
            if star_only:
                la, lb = (0, 1), (0, 1)
            else:
                la = tuple(sorted(int(x) for x in rng.choice(d, size=2, replace=False)))
                lb = tuple(sorted(int(x) for x in rng.choice(d, size=2, replace=False)))
            ops.append(XX(a, b, la, lb, _angle(rng)))
    return QuditCircuit(n_qudits, d, ops)
