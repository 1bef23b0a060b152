"""Applying matcher-script rules to qubit circuits."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

from ..ir import Gate, QubitCircuitIR
from .dsl import Assign, Binary, Call, If, Num, Return, RewriteRule, RuleScript, Unary, Var

EQ_TOL = 1e-12
DEFAULT_CAP = 100_000
_IMPLICIT = "$implicit"


class RuleEvaluationError(RuntimeError):
    pass


class RewriteCapWarning(UserWarning):
    pass


@dataclass
class MatchBinding:
    params: dict[str, float] = field(default_factory=dict)
    qubits: dict[str, int] = field(default_factory=dict)
    positions: tuple[int, ...] = ()
    implicit: Optional[tuple[int, ...]] = None


def _bind_term(term, op, binding: MatchBinding) -> Optional[MatchBinding]:
    if not isinstance(op, Gate) or op.name != term.name or len(op.params) != len(term.params):
        return None
    new = MatchBinding(dict(binding.params), dict(binding.qubits), binding.positions, binding.implicit)
    if term.qubits is None:
        if new.implicit is None:
            new.implicit = op.qubits
        elif new.implicit != op.qubits:
            return None
    else:
        if len(term.qubits) != len(op.qubits):
            return None
        taken = {q: v for v, q in new.qubits.items()}
        for var, q in zip(term.qubits, op.qubits):
            if var in new.qubits:
                if new.qubits[var] != q:
                    return None
            elif q in taken:
                return None  # injectivity
            else:
                new.qubits[var] = q
                taken[q] = var
    for name, value in zip(term.params, op.params):
        new.params[name] = value
    return new


def find_match(circuit, start: int, rule: RewriteRule) -> Optional[MatchBinding]:
    """Bind the rule's pattern to a commuting-adjacent chain starting at ``start``."""
    ops = circuit.ops if isinstance(circuit, QubitCircuitIR) else circuit
    return _match(ops, start, rule)[0]


def _match(ops: list, start: int, rule: RewriteRule) -> tuple[Optional[MatchBinding], int]:
    """The binding (or None) and the furthest position the attempt examined."""
    binding = _bind_term(rule.pattern[0], ops[start], MatchBinding())
    if binding is None:
        return None, start
    binding.positions = (start,)
    bound = set(ops[start].qubits)
    prev = start
    for term in rule.pattern[1:]:
        between: set = set()
        for j in range(prev + 1, len(ops)):
            op = ops[j]
            qs = set(op.qubits)
            if not (qs & between):
                cand = _bind_term(term, op, binding)
                if cand is not None:
                    cand.positions = binding.positions + (j,)
                    binding = cand
                    bound |= qs
                    prev = j
                    break
            if qs & bound:
                return None, j
            between |= qs
        else:
            return None, len(ops)
    return binding, prev


# -- evaluation -----------------------------------------------------------

_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "atan2": math.atan2,
    "sqrt": math.sqrt,
    "abs": abs,
    "floor": math.floor,
    "mod": math.fmod,
}


def _eval(e, env: dict):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return math.pi if e.name == "pi" and "pi" not in env else env[e.name]
    if isinstance(e, Unary):
        return -_eval(e.operand, env)
    if isinstance(e, Call):
        return float(_FUNCS[e.fn](*(_eval(a, env) for a in e.args)))
    if isinstance(e, Binary):
        op = e.op
        if op == "||":
            return bool(_eval(e.left, env)) or bool(_eval(e.right, env))
        if op == "&&":
            return bool(_eval(e.left, env)) and bool(_eval(e.right, env))
        a, b = _eval(e.left, env), _eval(e.right, env)
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        if op == "*":
            return a * b
        if op == "/":
            return a / b
        if op == "==":
            return abs(a - b) <= EQ_TOL
        if op == "!=":
            return abs(a - b) > EQ_TOL
        return {"<": a < b, ">": a > b, "<=": a <= b, ">=": a >= b}[op]
    raise TypeError(f"bad expression node {e!r}")


def _run(stmts, env: dict, binding: MatchBinding):
    for st in stmts:
        if isinstance(st, Assign):
            env[st.name] = _eval(st.value, env)
        elif isinstance(st, If):
            branch = st.then if _eval(st.cond, env) else st.orelse
            if branch is not None:
                out = _run(branch, env, binding)
                if out is not None:
                    return out
        elif isinstance(st, Return):
            gates = []
            for t in st.terms:
                params = tuple(float(_eval(a, env)) for a in t.args)
                for p in params:
                    if not math.isfinite(p):
                        raise ValueError(f"non-finite parameter for {t.name}")
                if t.qubits is None:
                    if binding.implicit is None:
                        raise ValueError(f"{t.name} needs explicit qubits")
                    qubits = binding.implicit
                else:
                    qubits = tuple(binding.qubits[v] for v in t.qubits)
                gates.append(Gate(t.name, params, qubits))
            return gates
    return None


def eval_block(rule: RewriteRule, binding: MatchBinding) -> Optional[list[Gate]]:
    """Run the rule body; ``None`` means the rule does not apply."""
    try:
        return _run(rule.block, dict(binding.params), binding)
    except (ArithmeticError, ValueError) as exc:
        raise RuleEvaluationError(f"{rule.name}: {exc}") from exc


def _first_names(rules: RuleScript) -> dict[str, list[RewriteRule]]:
    index: dict[str, list[RewriteRule]] = {}
    for rule in rules:
        index.setdefault(rule.pattern[0].name, []).append(rule)
    return index


def _rewrite_at(ops: list, start: int, candidates) -> tuple[Optional[list], int]:
    reach = start
    for rule in candidates:
        binding, seen = _match(ops, start, rule)
        reach = max(reach, seen)
        if binding is None:
            continue
        out = eval_block(rule, binding)
        if out is None:
            continue
        matched = set(binding.positions)
        last = binding.positions[-1]
        new = []
        for k, op in enumerate(ops):
            if k == last:
                new.extend(out)
            elif k not in matched:
                new.append(op)
        return new, reach
    return None, reach


def optimize(circuit: QubitCircuitIR, rules: RuleScript, cap: int = DEFAULT_CAP) -> QubitCircuitIR:
    """Rewrite to fixpoint, first applicable rule at the earliest position.

    The replacement sequence takes the place of the last matched op; everything
    it moves past is disjoint from the qubits of the ops matched before it.
    """
    index = _first_names(rules)
    ops = list(circuit.ops)
    count = 0
    pos = 0
    # reach[q]: furthest position examined by the failed attempts at q. A rewrite
    # at pos leaves ops[:pos] intact, so only starts that looked at pos or beyond
    # can change outcome; resuming at the first of them equals restarting at 0.
    reach: list[int] = []
    while pos < len(ops):
        op = ops[pos]
        new, seen = _rewrite_at(ops, pos, index.get(op.name, ())) if isinstance(op, Gate) else (None, pos)
        if new is None:
            reach.append(seen)
            pos += 1
            continue
        count += 1
        ops = new
        if count >= cap:
            warnings.warn(f"rewrite cap of {cap} reached; rewriting stopped", RewriteCapWarning, stacklevel=2)
            break
        pos = next((q for q, r in enumerate(reach) if r >= pos), pos)
        del reach[pos:]
    return QubitCircuitIR(circuit.n_qubits, circuit.n_clbits, ops)
