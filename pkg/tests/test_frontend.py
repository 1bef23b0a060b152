import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from quditc import oracle
from quditc.frontend import QasmError, check_ion_compatible, expand, parse_qasm
from quditc.frontend.ast import GateCall
from quditc.ir import Barrier, Gate, Measure
from quditc.runtime import load_runtime

RT = load_runtime("ion-ir")
INC = RT.includes()


def parse(text):
    return parse_qasm(text, "t.qasm", includes=INC)


def flatten(text):
    return expand(parse(text), RT.natives)


def test_minimal_program():
    prog = parse("qreg q[2]; h q[0];")
    assert prog.qregs == {"q": 2}
    assert len(prog.body) == 1 and isinstance(prog.body[0], GateCall)


def test_index_out_of_range():
    with pytest.raises(QasmError, match="index out of range") as exc:
        parse("qreg q[2]; x q[5];")
    assert exc.value.span.line == 1


def test_gate_definition():
    prog = parse("opaque r(t, p) q; opaque rz(t) q; gate h q0 { r(pi/2, -pi/2) q0; rz(pi) q0; }")
    g = prog.gatedefs["h"]
    assert g.arity == 1 and not g.opaque
    assert len(g.body) == 2


def test_cx_expands_to_ion_natives():
    ir = flatten('include "qelib1.inc"; qreg q[2]; cx q[0], q[1];')
    assert {g.name for g in ir.ops} <= {"r", "rz", "cz"}
    assert any(g.name == "cz" for g in ir.ops)
    cx = oracle.qubit_gate_matrix("cx", ())
    # the oracle's qubit-0-least-significant basis: cx control q0 target q1
    swap = np.eye(4)[[0, 2, 1, 3]]
    ref = swap @ cx @ swap
    assert oracle.check_equivalence(oracle.circuit_unitary(ir), ref, np.eye(4)).ok


def test_ccx_keeps_native_ccz():
    ir = flatten('include "qelib1.inc"; qreg q[3]; ccx q[0], q[1], q[2];')
    names = [g.name for g in ir.ops]
    assert names.count("ccz") == 1
    assert set(names) <= {"r", "rz", "ccz"}


def test_zero_u3_gives_zero_angle_natives():
    ir = flatten('include "qelib1.inc"; qreg q[1]; u3(0,0,0) q[0];')
    assert ir.ops and all(g.name in ("r", "rz") for g in ir.ops)
    assert np.allclose(oracle.circuit_unitary(ir), np.eye(2))


def test_header_and_version():
    prog = parse('OPENQASM 2.0;\ninclude "qelib1.inc";\nqreg q[1];')
    assert prog.version == "2.0"
    with pytest.raises(QasmError):
        parse("OPENQASM 3.0;\nqreg q[1];")


def test_error_carries_position():
    with pytest.raises(QasmError) as exc:
        parse("qreg q[2];\nqreg q[3];")
    assert (exc.value.span.line, exc.value.span.column) >= (2, 1)
    assert str(exc.value).startswith("t.qasm:2:")


def test_syntax_error():
    with pytest.raises(QasmError):
        parse("qreg q[2]\nh q[0];")


def test_unknown_gate():
    with pytest.raises(QasmError, match="frobnicate"):
        flatten("qreg q[1]; frobnicate q[0];")


def test_forward_reference_rejected():
    with pytest.raises(QasmError, match="unknown gate 'b'"):
        parse("gate a x { b x; } gate b x { a x; }")


def test_cycle_detected_by_expand():
    # the parser cannot produce a cycle, so splice one into a parsed program
    prog = parse("opaque rz(t) q; gate a x { rz(1) x; } gate b x { a x; } qreg q[1]; b q[0];")
    a = prog.gatedefs["a"]
    call = a.body[0]
    prog.gatedefs["a"] = dataclasses.replace(a, body=(dataclasses.replace(call, name="b", params=()),))
    with pytest.raises(QasmError, match="recursive gate definition: b -> a -> b"):
        expand(prog, RT.natives)


def test_opaque_must_be_native():
    with pytest.raises(QasmError, match="not native"):
        flatten("opaque magic q; qreg q[1]; magic q[0];")


def test_broadcast():
    ir = flatten('include "qelib1.inc"; qreg a[3]; qreg b[3]; cz a, b;')
    assert [g.qubits for g in ir.ops] == [(0, 3), (1, 4), (2, 5)]
    with pytest.raises(QasmError):
        flatten('include "qelib1.inc"; qreg a[3]; qreg b[2]; cz a, b;')


def test_registers_flatten_in_declaration_order():
    ir = flatten("qreg a[2]; qreg b[1]; creg c[3]; rz(1) b[0]; measure a[1] -> c[2];")
    assert ir.n_qubits == 3 and ir.n_clbits == 3
    assert ir.ops == [Gate("rz", (1.0,), (2,)), Measure(1, 2)]


def test_expressions():
    ir = flatten("qreg q[1]; rz(2*pi/4 + sin(0) - -1 ^ 2 + sqrt(4) + ln(exp(1))) q[0];")
    assert ir.ops[0].params[0] == pytest.approx(math.pi / 2 + 1 + 2 + 1)


def test_barrier_preserved():
    ir = flatten("qreg q[2]; barrier q;")
    assert ir.ops == [Barrier((0, 1))]


def test_ion_compatibility():
    check_ion_compatible(flatten("qreg q[1]; creg c[1]; rz(1) q[0]; measure q[0] -> c[0];"))
    with pytest.raises(QasmError, match="reset"):
        check_ion_compatible(flatten("qreg q[1]; reset q[0];"))
    with pytest.raises(QasmError):
        check_ion_compatible(flatten("qreg q[1]; creg c[1]; if (c==1) rz(1) q[0];"))
    with pytest.raises(QasmError):
        check_ion_compatible(flatten("qreg q[1]; creg c[1]; measure q[0] -> c[0]; rz(1) q[0];"))


def test_include_never_touches_filesystem(tmp_path):
    (tmp_path / "qelib1.inc").write_text("this is not qasm")
    prog = parse_qasm('include "qelib1.inc"; qreg q[1]; h q[0];', includes=INC, base_dir=tmp_path)
    assert "h" in prog.gatedefs


# -- properties ---------------------------------------------------------------

ONE_Q = ["h", "x", "y", "z", "s", "sdg", "t", "tdg", "sx"]
ROT = ["rx", "ry", "rz", "u1", "p"]
TWO_Q = ["cx", "cz", "cy", "swap", "ch", "crz", "rzz"]
THREE_Q = ["ccx", "cswap"]


@st.composite
def programs(draw):
    n = draw(st.integers(3, 5))
    lines = ['include "qelib1.inc";', f"qreg q[{n}];"]
    touched = []
    for _ in range(draw(st.integers(0, 12))):
        kind = draw(st.sampled_from(["one", "rot", "two", "three"]))
        names = {"one": ONE_Q, "rot": ROT, "two": TWO_Q, "three": THREE_Q}[kind]
        name = draw(st.sampled_from(names))
        arity = {"one": 1, "rot": 1, "two": 2, "three": 3}[kind]
        qs = draw(st.lists(st.integers(0, n - 1), min_size=arity, max_size=arity, unique=True))
        params = ""
        if kind == "rot" or name in ("crz", "rzz"):
            params = f"({draw(st.floats(-6, 6, allow_nan=False))!r})"
        lines.append(f"{name}{params} " + ", ".join(f"q[{k}]" for k in qs) + ";")
        touched.extend(qs)
    return "\n".join(lines), touched


@given(programs())
def test_expansion_touches_same_qubits(prog):
    text, touched = prog
    ir = flatten(text)
    assert {q for op in ir.ops for q in op.qubits} == set(touched)
    assert all(op.name in RT.natives for op in ir.ops)


@given(programs())
def test_print_and_reparse_round_trip(prog):
    ir = flatten(prog[0])
    again = flatten(ir.to_qasm())
    assert again.ops == ir.ops
