import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quditc import oracle
from quditc.ir import Barrier, Gate, QubitCircuitIR
from quditc.randomcirc import random_ion_ir
from quditc.rewrite import (
    RewriteCapWarning,
    RuleEvaluationError,
    RuleSyntaxError,
    eval_block,
    find_match,
    optimize,
    parse_rules,
)
from quditc.runtime import load_runtime

MERGE = "rz(a0) . rz(a1) => { return rz(a0 + a1); }"
NORMALIZE = """
rz(a) => {
  if sin(a / 2) == 0 { return id; }
  else if a > 2 * pi || a < -2 * pi { return rz(a - 4 * pi * floor((a + 2 * pi) / (4 * pi))); }
}
"""
PUSH = "rz(a) x . cz x,y => { return cz x,y . rz(a) x; }"

ION_IR = load_runtime("ion-ir")


def rz(a, q=0):
    return Gate("rz", (a,), (q,))


def circ(*ops, n=2):
    return QubitCircuitIR(n, 0, list(ops))


# -- parsing ------------------------------------------------------------------


def test_parse_merge_rule():
    script = parse_rules(MERGE)
    assert len(script) == 1
    rule = script.rules[0]
    assert [t.name for t in rule.pattern] == ["rz", "rz"]
    assert all(t.qubits is None for t in rule.pattern)


def test_parse_explicit_qubits():
    rule = parse_rules(PUSH).rules[0]
    assert rule.pattern[0].qubits == ("x",)
    assert rule.pattern[1].qubits == ("x", "y")


def test_unterminated_block():
    with pytest.raises(RuleSyntaxError, match="unterminated block"):
        parse_rules("rz(a) => { if a == 0 { }")


def test_unbound_variable():
    with pytest.raises(RuleSyntaxError, match="unbound variable 'b'"):
        parse_rules("rz(a) => { return rz(b); }")


def test_assignment_in_one_branch_only():
    with pytest.raises(RuleSyntaxError, match="unbound"):
        parse_rules("rz(a) => { if a > 0 { b = 1; } return rz(b); }")
    parse_rules("rz(a) => { if a > 0 { b = 1; } else { b = 2; } return rz(b); }")


def test_unknown_function():
    with pytest.raises(RuleSyntaxError, match="unknown function 'foo'"):
        parse_rules("rz(a) => { return rz(foo(a)); }")


def test_error_position():
    with pytest.raises(RuleSyntaxError) as exc:
        parse_rules("// header\nrz(a) => { return rz(a) }", filename="m.script")
    assert str(exc.value).startswith("m.script:2:")


def test_native_checks():
    natives = {"rz": (1, 1), "cz": (0, 2)}
    parse_rules(PUSH, natives)
    with pytest.raises(RuleSyntaxError):
        parse_rules("rz(a) x . cz x => { return id; }", natives)
    with pytest.raises(RuleSyntaxError):
        parse_rules("u(a) => { return id; }", natives)


def test_comments_and_order():
    script = parse_rules("// one\n" + MERGE + "\n// two\n" + NORMALIZE)
    assert [len(r.pattern) for r in script] == [2, 1]


# -- matching -----------------------------------------------------------------


def test_match_skips_disjoint_op():
    rule = parse_rules(MERGE).rules[0]
    b = find_match(circ(rz(0.3), Gate("x", (), (1,)), rz(0.4)), 0, rule)
    assert b is not None
    assert b.params == {"a0": 0.3, "a1": 0.4}
    assert b.positions == (0, 2)


def test_match_blocked_by_shared_qubit():
    rule = parse_rules(MERGE).rules[0]
    assert find_match(circ(rz(0.3), Gate("r", (1.0, 0.0), (0,)), rz(0.4)), 0, rule) is None


def test_match_blocked_by_barrier():
    rule = parse_rules(MERGE).rules[0]
    assert find_match(circ(rz(0.3), Barrier((0,)), rz(0.4)), 0, rule) is None


def test_implicit_tuple_must_agree():
    rule = parse_rules(MERGE).rules[0]
    assert find_match(circ(rz(0.3, 0), rz(0.4, 1)), 0, rule) is None


def test_explicit_binding_injective():
    rule = parse_rules("cz x,y . cz x,y => { return id; }").rules[0]
    b = find_match(circ(Gate("cz", (), (0, 1)), Gate("cz", (), (0, 1))), 0, rule)
    assert b.qubits == {"x": 0, "y": 1}
    assert find_match(circ(Gate("cz", (), (0, 1)), Gate("cz", (), (1, 0))), 0, rule) is None


def brute_force_merge_partner(ops, start):
    """Smallest j whose op can pair with ops[start] with nothing in between touching either."""
    first = ops[start]
    for j in range(start + 1, len(ops)):
        cand = ops[j]
        if not (isinstance(cand, Gate) and cand.name == "rz" and cand.qubits == first.qubits):
            continue
        window = set(first.qubits) | set(cand.qubits)
        if all(not (set(ops[k].qubits) & window) for k in range(start + 1, j)):
            return j
    return None


ops_strategy = st.lists(
    st.one_of(
        st.builds(lambda q, a: rz(a, q), st.integers(0, 2), st.floats(-3, 3)),
        st.builds(lambda q: Gate("r", (0.5, 0.1), (q,)), st.integers(0, 2)),
        st.builds(lambda p: Gate("cz", (), p), st.sampled_from([(0, 1), (1, 2), (0, 2)])),
        st.builds(lambda p: Barrier(p), st.sampled_from([(0,), (1, 2)])),
    ),
    max_size=10,
)


@given(ops_strategy)
def test_find_match_agrees_with_adjacency_definition(ops):
    ops = [rz(0.1, 0)] + ops
    rule = parse_rules(MERGE).rules[0]
    b = find_match(ops, 0, rule)
    expected = brute_force_merge_partner(ops, 0)
    assert (b.positions[1] if b else None) == expected


# -- evaluation ---------------------------------------------------------------


def basic_rules():
    return parse_rules(MERGE + NORMALIZE)


def test_eval_merge():
    rule = basic_rules().rules[0]
    out = eval_block(rule, find_match(circ(rz(0.3), rz(0.4)), 0, rule))
    assert len(out) == 1 and out[0].name == "rz"
    assert out[0].params[0] == pytest.approx(0.7)


def test_eval_normalize_identity():
    rule = basic_rules().rules[1]
    assert eval_block(rule, find_match(circ(rz(2 * math.pi)), 0, rule)) == []


def test_eval_not_applicable():
    rule = basic_rules().rules[1]
    assert eval_block(rule, find_match(circ(rz(0.5)), 0, rule)) is None


def test_eval_error_names_rule():
    rule = parse_rules("rz(a) => { return rz(1 / (a - a)); }", filename="bad.script").rules[0]
    with pytest.raises(RuleEvaluationError, match="bad.script:1"):
        eval_block(rule, find_match(circ(rz(0.5)), 0, rule))


def test_composition_order():
    rule = parse_rules(PUSH).rules[0]
    out = eval_block(rule, find_match(circ(rz(0.2), Gate("cz", (), (0, 1))), 0, rule))
    assert [g.name for g in out] == ["cz", "rz"]


# -- optimize -----------------------------------------------------------------


def test_optimize_merges_to_nothing():
    c = circ(rz(0.3), rz(0.4), rz(2 * math.pi - 0.7))
    assert optimize(c, basic_rules()).ops == []


def test_optimize_pushes_phase():
    c = circ(rz(0.3), Gate("cz", (), (0, 1)))
    assert optimize(c, ION_IR.rules).ops == [Gate("cz", (), (0, 1)), rz(0.3)]


def test_optimize_empty():
    assert optimize(circ(), ION_IR.rules).ops == []


def test_cap_warning():
    flip = parse_rules("rz(a) => { return rz(-a); }")
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        out = optimize(circ(rz(0.5)), flip, cap=50)
    assert any(issubclass(w.category, RewriteCapWarning) for w in caught)
    assert len(out.ops) == 1


def seeded_circuits(count, seed, n_qubits=3, n_gates=14):
    rng = np.random.default_rng(seed)
    return [random_ion_ir(rng, n_qubits, n_gates) for _ in range(count)]


def test_unitary_preserved_on_random_circuits():
    for c in seeded_circuits(100, 2024):
        opt = optimize(c, ION_IR.rules)
        u, v = oracle.circuit_unitary(opt), oracle.circuit_unitary(c)
        assert oracle.check_equivalence(u, v, np.eye(8)).ok


def test_fixpoint_on_random_circuits():
    for c in seeded_circuits(100, 99):
        once = optimize(c, ION_IR.rules)
        assert optimize(once, ION_IR.rules).ops == once.ops


REDUCTIONS = MERGE + NORMALIZE + """
cz x,y . cz x,y => { return id; }
r(t1, p1) . r(t2, p2) => { if p1 == p2 { return r(t1 + t2, p1); } }
"""


@given(st.integers(0, 2**32 - 1))
def test_reduction_rules_never_grow(seed):
    (c,) = seeded_circuits(1, seed)
    assert len(optimize(c, parse_rules(REDUCTIONS)).ops) <= len(c.ops)


def test_mcz_rules_on_random_circuits():
    rng = np.random.default_rng(5)
    for _ in range(30):
        c = random_ion_ir(rng, 4, 12, mcz=True)
        opt = optimize(c, ION_IR.rules)
        assert oracle.check_equivalence(oracle.circuit_unitary(opt), oracle.circuit_unitary(c), np.eye(16)).ok


def restart_from_zero(circuit, rules):
    ops = list(circuit.ops)
    pos = 0
    while pos < len(ops):
        for rule in rules:
            binding = find_match(ops, pos, rule) if isinstance(ops[pos], Gate) else None
            out = eval_block(rule, binding) if binding else None
            if out is not None:
                last, matched = binding.positions[-1], set(binding.positions)
                ops = [g for k, op in enumerate(ops) for g in (out if k == last else [] if k in matched else [op])]
                pos = -1
                break
        pos += 1
    return ops


def test_resume_point_matches_full_restart():
    from quditc.lowering import expand_mcz_networks

    rng = np.random.default_rng(41)
    for _ in range(12):
        ir = random_ion_ir(rng, int(rng.integers(2, 5)), int(rng.integers(4, 10)), mcz=True)
        ir = expand_mcz_networks(ir)
        assert optimize(ir, ION_IR.rules).ops == restart_from_zero(ir, ION_IR.rules)
