"""Level routing: rewrite R/XX ops onto the device's allowed level transitions.

A level-swap pulse ``P`` on an allowed pair (a, s) is chosen so that
``P|a> = |s>``. Then ``P^-1 G[s] P == G[a]`` for any op ``G`` that does not
touch level ``s`` on that qudit, with no change of rotation axis, and the
emitted sequence is ``P, G[a->s], P^-1``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import lru_cache

from .qudit import Ph, QBarrier, QuditCircuit, R, XX, inverse_ops

PI = math.pi


class RoutingError(ValueError):
    pass


def _pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class TransitionGraph:
    d: int
    r_pairs: frozenset
    xx_pairs: frozenset  # per-side allowed pairs for the two-qudit gate

    def __post_init__(self):
        seen, todo = {0}, [0]
        while todo:
            a = todo.pop()
            for i, j in self.r_pairs:
                for x, y in ((i, j), (j, i)):
                    if x == a and y not in seen:
                        seen.add(y)
                        todo.append(y)
        if len(seen) != self.d:
            raise RoutingError(f"transition graph over {self.d} levels is not connected")

    @classmethod
    def star(cls, d: int) -> "TransitionGraph":
        return cls(d, frozenset((0, k) for k in range(1, d)), frozenset({(0, 1)}))

    def allows_r(self, i: int, j: int) -> bool:
        return _pair(i, j) in self.r_pairs

    def allows_xx(self, la, lb) -> bool:
        return _pair(*la) in self.xx_pairs and _pair(*lb) in self.xx_pairs


def swap_pulse(qudit: int, a: int, s: int, sign: float = 1.0) -> R:
    """Pulse with P|a> = |s> on an allowed pair, written with the lower level first."""
    lo, hi = _pair(a, s)
    phi = PI / 2 if a == lo else -PI / 2
    return R(qudit, lo, hi, sign * PI, phi)


@lru_cache(maxsize=None)
def _moves(graph: TransitionGraph, start: tuple[int, int], targets: frozenset) -> tuple:
    """Shortest list of (replaced level, new level) substitutions taking ``start`` into ``targets``."""
    start = _pair(*start)
    if start in targets:
        return ()
    prev = {start: None}
    queue = deque([start])
    edges = sorted(graph.r_pairs)
    while queue:
        cur = queue.popleft()
        for a in cur:
            for i, j in edges:
                if a not in (i, j):
                    continue
                s = j if a == i else i
                if s in cur:
                    continue
                nxt = _pair(s, cur[1] if a == cur[0] else cur[0])
                if nxt in prev:
                    continue
                prev[nxt] = (cur, (a, s))
                if nxt in targets:
                    path = []
                    node = nxt
                    while prev[node] is not None:
                        node, move = prev[node]
                        path.append(move)
                    return tuple(reversed(path))
                queue.append(nxt)
    raise RoutingError(f"levels {start} cannot be routed onto {sorted(targets)}")


def _substitute(levels: tuple[int, int], a: int, s: int) -> tuple[int, int]:
    return tuple(s if lv == a else lv for lv in levels)


def route_op(op, graph: TransitionGraph) -> list:
    if isinstance(op, (Ph, QBarrier)):
        return [op]
    if isinstance(op, R):
        moves = _moves(graph, (op.i, op.j), graph.r_pairs)
        pulses, levels = [], (op.i, op.j)
        for a, s in moves:
            pulses.append(swap_pulse(op.qudit, a, s))
            levels = _substitute(levels, a, s)
        i, j = levels
        core = R(op.qudit, i, j, op.theta, op.phi) if i < j else R(op.qudit, j, i, op.theta, -op.phi)
        return pulses + [core] + inverse_ops(pulses)
    if isinstance(op, XX):
        pulses = []
        la, lb = op.levels_a, op.levels_b
        for a, s in _moves(graph, la, graph.xx_pairs):
            pulses.append(swap_pulse(op.a, a, s))
            la = _substitute(la, a, s)
        for a, s in _moves(graph, lb, graph.xx_pairs):
            pulses.append(swap_pulse(op.b, a, s))
            lb = _substitute(lb, a, s)
        core = XX(op.a, op.b, _pair(*la), _pair(*lb), op.theta)
        return pulses + [core] + inverse_ops(pulses)
    raise TypeError(f"cannot route {op!r}")


def route(circuit: QuditCircuit, graph: TransitionGraph) -> QuditCircuit:
    if graph.d < circuit.d:
        raise RoutingError(f"device has {graph.d} levels, circuit needs {circuit.d}")
    ops = []
    for op in circuit.ops:
        ops += route_op(op, graph)
    return QuditCircuit(circuit.n_qudits, circuit.d, ops)


def is_legal(circuit: QuditCircuit, graph: TransitionGraph) -> bool:
    for op in circuit.ops:
        if isinstance(op, R) and not (op.i < op.j and graph.allows_r(op.i, op.j)):
            return False
        if isinstance(op, XX) and not graph.allows_xx(op.levels_a, op.levels_b):
            return False
    return True
