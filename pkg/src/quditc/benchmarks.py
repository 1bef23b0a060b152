"""QASM generators for the benchmark circuits, with the ququart placements used for them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .qudit import Mapping

_HEADER = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


def bernstein_vazirani(secret: str) -> str:
    """Data qubits q[0..n-1] (q[k] reads secret[k]) and the oracle ancilla last."""
    n = len(secret)
    lines = [f"qreg q[{n + 1}];", f"creg c[{n}];", f"x q[{n}];", "h q;"]
    lines += [f"cx q[{k}], q[{n}];" for k, bit in enumerate(secret) if bit == "1"]
    lines += [f"h q[{k}];" for k in range(n)]
    lines += [f"measure q[{k}] -> c[{k}];" for k in range(n)]
    return _HEADER + "\n".join(lines) + "\n"


def grover(marked: str) -> str:
    """One Grover iteration over len(marked) qubits with a phase oracle."""
    n = len(marked)
    mcz = {2: "cz", 3: "ccz", 4: "cccz"}.get(n, f"c{n - 1}z")
    qs = ", ".join(f"q[{k}]" for k in range(n))
    flips = [f"x q[{k}];" for k, bit in enumerate(marked) if bit == "0"]
    lines = [f"qreg q[{n}];", f"creg c[{n}];", "h q;"]
    lines += flips + [f"{mcz} {qs};"] + flips
    lines += ["h q;", "x q;", f"{mcz} {qs};", "x q;", "h q;", "measure q -> c;"]
    return _HEADER + "\n".join(lines) + "\n"


def swap_test(state_qubits: int) -> str:
    """Ancilla q[0], first state on q[1..k], second on q[k+1..2k]."""
    k = state_qubits
    lines = [f"qreg q[{2 * k + 1}];", "creg c[1];"]
    for j in range(k):
        lines.append(f"ry({0.3 + 0.4 * j}) q[{1 + j}];")
        lines.append(f"x q[{1 + k + j}];")
    lines.append("h q[0];")
    lines += [f"cswap q[0], q[{1 + j}], q[{1 + k + j}];" for j in range(k)]
    lines += ["h q[0];", "measure q[0] -> c[0];"]
    return _HEADER + "\n".join(lines) + "\n"


def swap_test_ququart_mapping(state_qubits: int) -> Mapping:
    """Each compared pair shares a ququart; the ancilla sits alone in the last one."""
    k = state_qubits
    qudits = [k] + list(range(k)) + list(range(k))
    slots = [0] + [0] * k + [1] * k
    return Mapping(tuple(qudits), tuple(slots), 2)


@dataclass(frozen=True)
class Benchmark:
    name: str
    qasm: str
    ququart_mapping: Optional[Mapping] = None

    def mapping_for(self, b: int) -> Optional[Mapping]:
        return self.ququart_mapping if b == 2 else None


def benchmarks() -> list[Benchmark]:
    return [
        Benchmark("bv101", bernstein_vazirani("101")),
        Benchmark("bv10101", bernstein_vazirani("10101")),
        Benchmark("grover000", grover("000")),
        Benchmark("grover0000", grover("0000")),
        Benchmark("swaptest1", swap_test(1), swap_test_ququart_mapping(1)),
        Benchmark("swaptest2", swap_test(2), swap_test_ququart_mapping(2)),
    ]


def mcz_circuit(n: int) -> str:
    """A single n-qubit multicontrolled Z."""
    qs = ", ".join(f"q[{k}]" for k in range(n))
    name = {2: "cz", 3: "ccz", 4: "cccz"}.get(n, f"c{n - 1}z")
    return _HEADER + f"qreg q[{n}];\n{name} {qs};\n"


def transpile_benchmark(bm: Benchmark, regime: str, optimize: bool = True):
    from .pipeline import TranspileConfig, transpile_qasm
    from .qudit import REGIMES

    params = REGIMES[regime]
    return transpile_qasm(bm.qasm, bm.name, TranspileConfig(params=params, mapping=bm.mapping_for(params.b), optimize=optimize))
