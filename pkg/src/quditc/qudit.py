"""Qudit-side data types: transpilation parameters, qubit placement and qudit operations.

Angle conventions used everywhere in this package:

* ``Ph(q, i, theta)`` is ``exp(i*theta*|i><i|)`` on qudit ``q``.
* ``R(q, i, j, theta, phi)`` is ``exp(-i*theta/2 * sigma_phi^{ij})`` with
  ``sigma_phi^{ij} = e^{i phi}|j><i| + e^{-i phi}|i><j|`` (half-angle form, the
  same convention the ion device uses, so emission copies ``theta`` verbatim).
* ``XX(a, b, (i, j), (k, l), theta)`` is ``exp(-i*theta * sigma_x^{ij} (x) sigma_x^{kl})``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union


class MappingError(ValueError):
    pass


@dataclass(frozen=True)
class QuditParams:
    d: int
    b: int = 1

    def __post_init__(self):
        if self.d < 2 or self.b < 1:
            raise ValueError(f"invalid qudit parameters d={self.d}, b={self.b}")
        if 2**self.b > self.d:
            raise ValueError(f"{self.b} qubits do not fit into a qudit with d={self.d}")

    @property
    def qubit_levels(self) -> int:
        return 2**self.b


REGIMES = {
    "qubit": QuditParams(2, 1),
    "qutrit": QuditParams(3, 1),
    "ququart": QuditParams(4, 2),
}


@dataclass(frozen=True)
class Mapping:
    """Placement of qubit ``n`` into qudit ``qudits[n]`` at slot ``slots[n]``."""

    qudits: tuple[int, ...]
    slots: tuple[int, ...]
    b: int

    def __post_init__(self):
        if len(self.qudits) != len(self.slots):
            raise MappingError("qudit and slot lists differ in length")
        seen = set()
        for n, (q, s) in enumerate(zip(self.qudits, self.slots)):
            if q < 0 or s < 0:
                raise MappingError(f"qubit {n}: negative qudit or slot")
            if s >= self.b:
                raise MappingError(f"qubit {n}: slot {s} >= b={self.b}")
            if (q, s) in seen:
                raise MappingError(f"qubit {n}: duplicate placement (qudit {q}, slot {s})")
            seen.add((q, s))

    @property
    def n_qubits(self) -> int:
        return len(self.qudits)

    @property
    def n_qudits(self) -> int:
        return max(self.qudits) + 1 if self.qudits else 0

    def qubit_at(self, qudit: int, slot: int) -> int | None:
        for n, (q, s) in enumerate(zip(self.qudits, self.slots)):
            if q == qudit and s == slot:
                return n
        return None

    def to_json(self) -> dict:
        return {"qubits": [{"qudit": q, "slot": s} for q, s in zip(self.qudits, self.slots)]}


def default_mapping(n_qubits: int, b: int) -> Mapping:
    if n_qubits < 1 or b < 1:
        raise MappingError("need at least one qubit and b >= 1")
    return Mapping(
        tuple(n // b for n in range(n_qubits)),
        tuple(n % b for n in range(n_qubits)),
        b,
    )


def mapping_from_json(data: dict, b: int) -> Mapping:
    try:
        entries = data["qubits"]
        qudits = tuple(int(e["qudit"]) for e in entries)
        slots = tuple(int(e["slot"]) for e in entries)
    except (KeyError, TypeError, ValueError) as exc:
        raise MappingError(f"malformed mapping: {exc}") from exc
    return Mapping(qudits, slots, b)


def load_mapping(path: str | Path, b: int) -> Mapping:
    with open(path, encoding="utf-8") as fh:
        return mapping_from_json(json.load(fh), b)


# -- qudit operations -------------------------------------------------------


@dataclass(frozen=True)
class Ph:
    qudit: int
    level: int
    theta: float

    virtual = True

    @property
    def qudits(self) -> tuple[int, ...]:
        return (self.qudit,)


@dataclass(frozen=True)
class R:
    qudit: int
    i: int
    j: int
    theta: float
    phi: float

    virtual = False

    @property
    def qudits(self) -> tuple[int, ...]:
        return (self.qudit,)


@dataclass(frozen=True)
class XX:
    a: int
    b: int
    levels_a: tuple[int, int]
    levels_b: tuple[int, int]
    theta: float

    virtual = False

    @property
    def qudits(self) -> tuple[int, ...]:
        return (self.a, self.b)


@dataclass(frozen=True)
class QBarrier:
    qudits: tuple[int, ...]

    virtual = True


QuditOp = Union[Ph, R, XX, QBarrier]


@dataclass
class QuditCircuit:
    n_qudits: int
    d: int
    ops: list = field(default_factory=list)

    def validate(self) -> None:
        for op in self.ops:
            for q in op.qudits:
                if not 0 <= q < self.n_qudits:
                    raise ValueError(f"{op}: qudit index out of range")
            if isinstance(op, Ph):
                levels = (op.level,)
                angles = (op.theta,)
            elif isinstance(op, R):
                levels = (op.i, op.j)
                angles = (op.theta, op.phi)
                if op.i == op.j:
                    raise ValueError(f"{op}: R needs two distinct levels")
            elif isinstance(op, XX):
                levels = op.levels_a + op.levels_b
                angles = (op.theta,)
                if op.a == op.b:
                    raise ValueError(f"{op}: XX needs two distinct qudits")
                if op.levels_a[0] == op.levels_a[1] or op.levels_b[0] == op.levels_b[1]:
                    raise ValueError(f"{op}: XX level pairs must be distinct")
            else:
                continue
            if any(not 0 <= lv < self.d for lv in levels):
                raise ValueError(f"{op}: level index out of range for d={self.d}")
            if any(not math.isfinite(a) for a in angles):
                raise ValueError(f"{op}: non-finite angle")

    def counts(self) -> dict[str, int]:
        return gate_counts(self.ops)


def gate_counts(ops) -> dict[str, int]:
    out = {"Ph": 0, "R": 0, "XX": 0}
    for op in ops:
        if isinstance(op, Ph):
            out["Ph"] += 1
        elif isinstance(op, R):
            out["R"] += 1
        elif isinstance(op, XX):
            out["XX"] += 1
    return out


def inverse_ops(ops) -> list:
    """Exact inverse of an op sequence (reversed, angles negated)."""
    out = []
    for op in reversed(ops):
        if isinstance(op, Ph):
            out.append(Ph(op.qudit, op.level, -op.theta))
        elif isinstance(op, R):
            out.append(R(op.qudit, op.i, op.j, -op.theta, op.phi))
        elif isinstance(op, XX):
            out.append(XX(op.a, op.b, op.levels_a, op.levels_b, -op.theta))
        else:
            out.append(op)
    return out


def phase_on_level(qudit: int, level: int, theta: float, d: int) -> list:
    """``Ph^level(theta)`` without using level 0 (equal up to a global phase)."""
    if level != 0:
        return [Ph(qudit, level, theta)]
    return [Ph(qudit, k, -theta) for k in range(1, d)]
