import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quditc import oracle
from quditc.ir import Gate, QubitCircuitIR
from quditc.lowering import LoweringError, cz_template, lower, mcz_ladder, mcz_network
from quditc.oracle import EquivalenceMode
from quditc.qudit import (
    Mapping,
    MappingError,
    Ph,
    QuditCircuit,
    QuditParams,
    R,
    XX,
    default_mapping,
    load_mapping,
)
from quditc.randomcirc import random_ion_ir

PI = math.pi
QUTRIT, QUQUART = QuditParams(3, 1), QuditParams(4, 2)


def mcz_reference(n):
    u = np.eye(2**n, dtype=complex)
    u[-1, -1] = -1
    return u


def test_default_mapping_identity():
    m = default_mapping(3, 1)
    assert m.qudits == (0, 1, 2) and m.slots == (0, 0, 0)


def test_default_mapping_pairs():
    m = default_mapping(6, 2)
    assert m.qudits == (0, 0, 1, 1, 2, 2) and m.slots == (0, 1, 0, 1, 0, 1)


def test_default_mapping_remainder():
    m = default_mapping(5, 2)
    assert m.qudits == (0, 0, 1, 1, 2) and m.slots == (0, 1, 0, 1, 0)
    assert m.n_qudits == 3


@given(st.integers(1, 40), st.integers(1, 3))
def test_default_mapping_formula(n, b):
    m = default_mapping(n, b)
    assert all(m.qudits[k] == k // b and m.slots[k] == k % b for k in range(n))
    assert m.n_qudits == -(-n // b)


def test_load_mapping(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"qubits": [{"qudit": 0, "slot": 0}, {"qudit": 1, "slot": 0}, {"qudit": 0, "slot": 1}]}))
    m = load_mapping(f, 2)
    assert m.qudits[0] == m.qudits[2] == 0
    with pytest.raises(MappingError, match="slot 1 >= b=1"):
        load_mapping(f, 1)


def test_duplicate_placement(tmp_path):
    f = tmp_path / "m.json"
    f.write_text(json.dumps({"qubits": [{"qudit": 0, "slot": 1}, {"qudit": 0, "slot": 1}]}))
    with pytest.raises(MappingError, match="duplicate"):
        load_mapping(f, 2)


def test_invalid_params():
    with pytest.raises(ValueError):
        QuditParams(3, 2)


def lower_one(gate, params, n=None, mapping=None):
    n = n or max(gate.qubits) + 1
    mapping = mapping or default_mapping(n, params.b)
    return lower(QubitCircuitIR(n, 0, [gate]), params, mapping).ops


def test_r_carried_verbatim():
    assert lower_one(Gate("r", (PI / 2, -PI / 2), (0,)), QUTRIT) == [R(0, 0, 1, PI / 2, -PI / 2)]


def test_rz_becomes_phase():
    assert lower_one(Gate("rz", (0.4,), (0,)), QUTRIT) == [Ph(0, 1, 0.4)]


def test_ququart_single_qubit_tables():
    assert lower_one(Gate("r", (0.3, 0.2), (0,)), QUQUART) == [R(0, 0, 1, 0.3, 0.2), R(0, 2, 3, 0.3, 0.2)]
    assert lower_one(Gate("r", (0.3, 0.2), (1,)), QUQUART) == [R(0, 0, 2, 0.3, 0.2), R(0, 1, 3, 0.3, 0.2)]
    assert lower_one(Gate("rz", (0.3,), (0,)), QUQUART) == [Ph(0, 1, 0.3), Ph(0, 3, 0.3)]
    assert lower_one(Gate("rz", (0.3,), (1,)), QUQUART) == [Ph(0, 2, 0.3), Ph(0, 3, 0.3)]


def test_ququart_cz_same_qudit():
    assert lower_one(Gate("cz", (), (0, 1)), QUQUART) == [Ph(0, 3, PI)]


def test_ququart_cz_across_qudits():
    assert lower_one(Gate("cz", (), (0, 2)), QUQUART, n=3) == [XX(0, 1, (1, 3), (1, 3), PI)]
    assert lower_one(Gate("cz", (), (1, 2)), QUQUART, n=3) == [XX(0, 1, (2, 3), (1, 3), PI)]


@pytest.mark.parametrize("d", [2, 3, 4])
def test_cz_template_exact(d):
    W = oracle.circuit_unitary(QuditCircuit(2, d, cz_template(0, 1)))
    E = oracle.embedding_isometry(default_mapping(2, 1), d)
    assert oracle.check_equivalence(W, mcz_reference(2), E, EquivalenceMode.GLOBAL_PHASE, 1e-12).ok


@pytest.mark.parametrize("n", range(2, 9))
def test_ladder_xx_count(n):
    ops = mcz_ladder(list(range(n - 1)), n - 1, 3)
    assert sum(isinstance(op, XX) for op in ops) == 2 * n - 3


@pytest.mark.parametrize("n", range(2, 6))
@pytest.mark.parametrize("d", [3, 4])
def test_ladder_matches_mcz(n, d):
    if d**n > 1024:
        pytest.skip("beyond the dense cap")
    W = oracle.circuit_unitary(QuditCircuit(n, d, mcz_ladder(list(range(n - 1)), n - 1, d)))
    E = oracle.embedding_isometry(default_mapping(n, 1), d)
    assert oracle.check_equivalence(W, mcz_reference(n), E, EquivalenceMode.GLOBAL_PHASE).ok


@pytest.mark.parametrize("n", [3, 5, 7])
def test_ladder_leaves_no_ancilla_population(n):
    ops = mcz_ladder(list(range(n - 1)), n - 1, 3)
    E = oracle.embedding_isometry(default_mapping(n, 1), 3, cap=3**n)
    out = oracle.apply_qudit_ops(ops, n, 3, E, cap=3**n)
    qubit_rows = np.abs(E).sum(axis=1) > 0
    assert np.max(np.abs(out[~qubit_rows]) ** 2) < 1e-18


def test_ladder_needs_ancilla_level():
    with pytest.raises(LoweringError):
        mcz_ladder([0, 1], 2, 2)


@pytest.mark.parametrize("n", range(2, 7))
def test_gray_code_network(n):
    ir = QubitCircuitIR(n, 0, mcz_network(list(range(n))))
    assert oracle.check_equivalence(oracle.circuit_unitary(ir), mcz_reference(n), np.eye(2**n)).ok
    cz = sum(g.name == "cz" for g in ir.ops)
    assert cz == (1 if n == 2 else 2**n - 2)


def test_ccz_lowered_counts():
    ccz = Gate("ccz", (), (0, 1, 2))
    assert sum(isinstance(o, XX) for o in lower_one(ccz, QUTRIT)) == 3
    assert sum(isinstance(o, XX) for o in lower_one(ccz, QuditParams(2, 1))) == 6


def test_lowering_rejects_unknown():
    with pytest.raises(LoweringError):
        lower_one(Gate("cx", (), (0, 1)), QUTRIT)


REGIMES = [QuditParams(2, 1), QUTRIT, QUQUART, QuditParams(4, 1)]


def random_mapping(rng, n, b):
    cells = [(q, s) for q in range(n) for s in range(b)]
    pick = rng.permutation(len(cells))[:n]
    qs, ss = zip(*(cells[k] for k in pick))
    return Mapping(tuple(int(x) for x in qs), tuple(int(x) for x in ss), b)


@pytest.mark.parametrize("params", REGIMES, ids=lambda p: f"d{p.d}b{p.b}")
def test_embedding_correctness_on_random_circuits(params):
    rng = np.random.default_rng(params.d * 10 + params.b)
    for _ in range(40):
        n = int(rng.integers(2, 5))
        ir = random_ion_ir(rng, n, 10)
        mapping = random_mapping(rng, n, params.b)
        qc = lower(ir, params, mapping)
        E = oracle.embedding_isometry(mapping, params.d, qc.n_qudits)
        WE = oracle.apply_qudit_ops(qc.ops, qc.n_qudits, params.d, E)
        V = oracle.circuit_unitary(ir)
        assert oracle.check_equivalence(WE, V, E, EquivalenceMode.DIAGONAL_PHASE).ok


def test_co_located_cz_is_free():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b = (int(x) for x in rng.choice(6, 2, replace=False))
        mapping = random_mapping(rng, 6, 2)
        ops = lower_one(Gate("cz", (), (a, b)), QUQUART, n=6, mapping=mapping)
        same = mapping.qudits[a] == mapping.qudits[b]
        assert (sum(isinstance(o, XX) for o in ops) == 0) == same
