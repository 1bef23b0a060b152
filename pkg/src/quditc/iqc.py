"""Ion qudit circuit JSON (``.iqc.json``): emission and parsing."""

from __future__ import annotations

import json
import math

from .qudit import Ph, QBarrier, QuditCircuit, R, XX


class IqcError(ValueError):
    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
        self.message = message


def _units(theta: float, period: float = 4.0) -> float:
    """Angle in units of pi, wrapped into (-period/2, period/2]."""
    x = math.remainder(theta / math.pi, period)
    if x <= -period / 2:
        x += period
    return x + 0.0  # no negative zero


def op_to_json(op, k: int = 0) -> dict:
    if isinstance(op, Ph):
        if op.level == 0:
            raise IqcError("phase on level 0 has no ion encoding", f"/sequence/{k}")
        return {"type": "Rz", "angle": _units(op.theta), "upper_state": op.level, "qudit": op.qudit}
    if isinstance(op, R):
        if op.i != 0:
            raise IqcError(f"R on levels ({op.i},{op.j}) violates the selection rules", f"/sequence/{k}")
        return {
            "type": "Rphi",
            "angle": _units(op.theta),
            "axis": _units(op.phi, 2.0),
            "upper_state": op.j,
            "qudit": op.qudit,
        }
    if isinstance(op, XX):
        if tuple(op.levels_a) != (0, 1) or tuple(op.levels_b) != (0, 1):
            raise IqcError("unsupported upper_state: XX acts on levels (0,1) only", f"/sequence/{k}")
        return {"type": "XX", "angle": _units(op.theta), "upper_state": 1, "qudits": [op.a, op.b]}
    raise IqcError(f"cannot serialize {op!r}", f"/sequence/{k}")


def circuit_to_json(circuit: QuditCircuit, repetitions: int) -> dict:
    if repetitions < 1:
        raise IqcError("repetitions must be at least 1", "/repetitions")
    seq = [op_to_json(op, k) for k, op in enumerate(circuit.ops) if not isinstance(op, QBarrier)]
    return {"repetitions": int(repetitions), "levels": circuit.d, "sequence": seq}


def emit(circuits) -> str:
    """Serialize ``[(QuditCircuit, repetitions), ...]``; output is deterministic."""
    return json.dumps([circuit_to_json(c, r) for c, r in circuits], indent=2) + "\n"


# -- parsing ------------------------------------------------------------------


def _get(obj: dict, key: str, kind, ptr: str):
    if key not in obj:
        raise IqcError(f"missing field '{key}'", ptr)
    v = obj[key]
    if kind is int:
        if isinstance(v, bool) or not isinstance(v, int):
            raise IqcError(f"'{key}' must be an integer", f"{ptr}/{key}")
    elif kind is float:
        if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
            raise IqcError(f"'{key}' must be a finite number", f"{ptr}/{key}")
        v = float(v)
    return v


def _op_from_json(obj, d: int, ptr: str):
    if not isinstance(obj, dict):
        raise IqcError("operation must be an object", ptr)
    kind = obj.get("type")
    if kind == "Rz":
        level = _get(obj, "upper_state", int, ptr)
        q = _get(obj, "qudit", int, ptr)
        if not 1 <= level < d:
            raise IqcError(f"upper_state {level} out of range for {d} levels", f"{ptr}/upper_state")
        return Ph(q, level, _get(obj, "angle", float, ptr) * math.pi)
    if kind == "Rphi":
        level = _get(obj, "upper_state", int, ptr)
        q = _get(obj, "qudit", int, ptr)
        if not 1 <= level < d:
            raise IqcError(f"upper_state {level} out of range for {d} levels", f"{ptr}/upper_state")
        return R(q, 0, level, _get(obj, "angle", float, ptr) * math.pi, _get(obj, "axis", float, ptr) * math.pi)
    if kind == "XX":
        if _get(obj, "upper_state", int, ptr) != 1:
            raise IqcError("unsupported upper_state", f"{ptr}/upper_state")
        qs = obj.get("qudits")
        if not (isinstance(qs, list) and len(qs) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in qs)):
            raise IqcError("'qudits' must be a list of two integers", f"{ptr}/qudits")
        if qs[0] == qs[1]:
            raise IqcError("XX needs two distinct qudits", f"{ptr}/qudits")
        return XX(qs[0], qs[1], (0, 1), (0, 1), _get(obj, "angle", float, ptr) * math.pi)
    raise IqcError(f"unknown operation type {kind!r}", f"{ptr}/type")


def parse_iqc(text: str) -> list[tuple[QuditCircuit, int]]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise IqcError(f"invalid JSON: {exc}") from None
    if not isinstance(data, list):
        raise IqcError("top level must be an array", "")
    out = []
    for n, circ in enumerate(data):
        ptr = f"/{n}"
        if not isinstance(circ, dict):
            raise IqcError("circuit must be an object", ptr)
        reps = _get(circ, "repetitions", int, ptr)
        if reps < 1:
            raise IqcError("repetitions must be at least 1", f"{ptr}/repetitions")
        d = _get(circ, "levels", int, ptr)
        if d < 2:
            raise IqcError("levels must be at least 2", f"{ptr}/levels")
        seq = circ.get("sequence")
        if not isinstance(seq, list):
            raise IqcError("'sequence' must be an array", f"{ptr}/sequence")
        ops = [_op_from_json(o, d, f"{ptr}/sequence/{k}") for k, o in enumerate(seq)]
        for k, op in enumerate(ops):
            if any(q < 0 for q in op.qudits):
                raise IqcError("negative qudit index", f"{ptr}/sequence/{k}")
        m = max((q for op in ops for q in op.qudits), default=0) + 1
        out.append((QuditCircuit(m, d, ops), reps))
    return out
