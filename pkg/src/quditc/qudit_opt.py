"""Peephole optimization of qudit circuits.

Two ops are *adjacent* when every op between them commutes with both. Ops on
disjoint level sets of a qudit commute, and diagonal ops (Ph) commute with one
another, so the check is done on (qudit, level) footprints.
"""

from __future__ import annotations

import math

from .qudit import Ph, QBarrier, QuditCircuit, R, XX

TOL = 1e-12
TWO_PI = 2 * math.pi


def _wrap(x: float, period: float) -> float:
    """Map into (-period/2, period/2]."""
    r = math.remainder(x, period)
    if r <= -period / 2:
        r += period
    return r


def _close(x: float, y: float, period: float) -> bool:
    return abs(_wrap(x - y, period)) < TOL


def footprint(op, d: int) -> frozenset:
    if isinstance(op, Ph):
        return frozenset({(op.qudit, op.level)})
    if isinstance(op, R):
        return frozenset({(op.qudit, op.i), (op.qudit, op.j)})
    if isinstance(op, XX):
        return frozenset({(op.a, lv) for lv in op.levels_a} | {(op.b, lv) for lv in op.levels_b})
    return frozenset((q, lv) for q in op.qudits for lv in range(d))


def _diag(op) -> bool:
    return isinstance(op, Ph)


def _normalize(op, d: int):
    """Single-op canonical form; returns a replacement list or None if already canonical."""
    if isinstance(op, Ph):
        t = _wrap(op.theta, TWO_PI)
        if abs(t) < TOL:
            return []
        return None if t == op.theta else [Ph(op.qudit, op.level, t)]
    if isinstance(op, R):
        if op.i > op.j:
            return [R(op.qudit, op.j, op.i, op.theta, -op.phi)]
        t = _wrap(op.theta, 2 * TWO_PI)
        if abs(t) < TOL:
            return []
        if abs(t - TWO_PI) < TOL:
            # R(2pi) is -1 on the pair and +1 elsewhere
            if op.i == 0:
                return [Ph(op.qudit, k, math.pi) for k in range(1, d) if k != op.j]
            return [Ph(op.qudit, op.i, math.pi), Ph(op.qudit, op.j, math.pi)]
        p = _wrap(op.phi, TWO_PI)
        if t == op.theta and p == op.phi:
            return None
        return [R(op.qudit, op.i, op.j, t, p)]
    if isinstance(op, XX):
        la, lb = tuple(sorted(op.levels_a)), tuple(sorted(op.levels_b))
        a, b = op.a, op.b
        if a > b:
            a, b, la, lb = b, a, lb, la
        t = _wrap(op.theta, TWO_PI)
        if abs(t) < TOL:
            return []
        new = XX(a, b, la, lb, t)
        return None if new == op else [new]
    return None


def _merge_rotations(first: R, second: R, d: int) -> list:
    """Two rotations on one level pair as a single rotation followed by phases.

    On the pair the product is an SU(2) element, written as a rotation followed
    by diag(exp(-i*l/2), exp(i*l/2)).
    """
    q, i, j = first.qudit, first.i, first.j

    def quat(op):
        c, s = math.cos(op.theta / 2), math.sin(op.theta / 2)
        return c, s * math.cos(op.phi), s * math.sin(op.phi)

    w1, x1, y1 = quat(first)
    w2, x2, y2 = quat(second)
    w = w1 * w2 - x1 * x2 - y1 * y2
    x = w2 * x1 + w1 * x2
    y = w2 * y1 + w1 * y2
    z = x2 * y1 - y2 * x1
    half = math.atan2(z, w)
    theta = 2 * math.atan2(math.hypot(x, y), math.hypot(w, z))
    out = [R(q, i, j, theta, math.atan2(y, x) - half)]
    if i == 0:
        # a phase on level 0 is traded for the opposite phase on every other level
        out.append(Ph(q, j, 2 * half))
        out += [Ph(q, k, half) for k in range(1, d) if k != j]
    else:
        out += [Ph(q, i, -half), Ph(q, j, half)]
    return out


def _pair_rule(first, second, d: int):
    """Rewrite for an adjacent pair, as (replacement for first, replacement for second) or None."""
    if isinstance(first, Ph) and isinstance(second, Ph):
        if (first.qudit, first.level) == (second.qudit, second.level):
            return [Ph(first.qudit, first.level, first.theta + second.theta)], []
        return None
    if isinstance(first, R) and isinstance(second, R):
        if (first.qudit, first.i, first.j) != (second.qudit, second.i, second.j):
            return None
        if _close(first.phi, second.phi, TWO_PI):
            return [R(first.qudit, first.i, first.j, first.theta + second.theta, first.phi)], []
        if _close(first.phi, second.phi + math.pi, TWO_PI):
            return [R(first.qudit, first.i, first.j, first.theta - second.theta, first.phi)], []
        return _merge_rotations(first, second, d), []
    if isinstance(first, XX) and isinstance(second, XX):
        if (first.a, first.b, first.levels_a, first.levels_b) == (second.a, second.b, second.levels_a, second.levels_b):
            return [XX(first.a, first.b, first.levels_a, first.levels_b, first.theta + second.theta)], []
        return None
    if isinstance(first, Ph) and isinstance(second, R) and first.qudit == second.qudit:
        # Ph^k then R^{ij}  ==  R^{ij}(phi -/+ alpha) then Ph^k
        if first.level == second.j:
            phi = second.phi - first.theta
        elif first.level == second.i:
            phi = second.phi + first.theta
        else:
            return None
        return [R(second.qudit, second.i, second.j, second.theta, phi)], [first]
    return None


def _partner_rewrite(ops: list, p: int, d: int):
    """Try pair rules between ops[p] and each later op adjacent to it."""
    first = ops[p]
    if isinstance(first, QBarrier):
        return None
    fp = footprint(first, d)
    first_diag = _diag(first)
    between_any: set = set()
    between_nondiag: set = set()
    for j in range(p + 1, len(ops)):
        op = ops[j]
        fj = footprint(op, d)
        op_diag = _diag(op)
        conflicts_first = bool(fp & fj) and (isinstance(op, QBarrier) or not (first_diag and op_diag))
        blocked = bool(fj & between_nondiag) or (not op_diag and bool(fj & between_any))
        if not blocked and not isinstance(op, QBarrier):
            res = _pair_rule(first, op, d)
            if res is not None:
                return j, res
        if conflicts_first:
            return None
        between_any |= fj
        if not op_diag:
            between_nondiag |= fj
    return None


def optimize_qudit(circuit: QuditCircuit, max_sweeps: int = 10_000) -> QuditCircuit:
    d = circuit.d
    ops = list(circuit.ops)
    for _ in range(max_sweeps):
        changed = False
        p = 0
        while p < len(ops):
            rep = _normalize(ops[p], d)
            if rep is not None:
                ops[p : p + 1] = rep
                changed = True
                continue
            hit = _partner_rewrite(ops, p, d)
            if hit is not None:
                j, (rep_first, rep_second) = hit
                ops[j : j + 1] = rep_second
                ops[p : p + 1] = rep_first
                changed = True
                continue
            p += 1
        if not changed:
            break
    return QuditCircuit(circuit.n_qudits, d, ops)


def strip_trailing_phases(circuit: QuditCircuit) -> QuditCircuit:
    """Drop Ph ops with no later non-Ph op on their qudit (Z-basis statistics are unchanged)."""
    live: set[int] = set()
    keep = []
    for op in reversed(circuit.ops):
        if isinstance(op, Ph):
            if op.qudit in live:
                keep.append(op)
            continue
        if not isinstance(op, QBarrier):
            live.update(op.qudits)
        keep.append(op)
    return QuditCircuit(circuit.n_qudits, circuit.d, list(reversed(keep)))
