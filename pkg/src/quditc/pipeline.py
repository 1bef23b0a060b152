"""End-to-end transpilation: QASM text to a routed qudit circuit, plus verification and statistics."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from decimal import Decimal
from pathlib import Path
from typing import Optional

import numpy as np

from . import oracle
from .frontend import check_ion_compatible, expand, parse_qasm
from .ir import Gate, Measure, QubitCircuitIR
from .lowering import expand_mcz_networks, lower
from .qudit import Mapping, QuditCircuit, QuditParams, REGIMES, default_mapping
from .qudit_opt import optimize_qudit, strip_trailing_phases
from .rewrite import optimize
from .router import is_legal, route
from .runtime import Runtime, load_runtime
from .unmap import MeasureMap


class InvariantError(RuntimeError):
    """A stage produced output violating its own contract."""


@dataclass
class TranspileConfig:
    params: QuditParams = field(default_factory=lambda: REGIMES["qutrit"])
    mapping: Optional[Mapping] = None
    optimize: bool = False
    strip_trailing_phases: bool = False
    repetitions: int = 100
    library_path: Optional[str] = None
    rules_path: Optional[str] = None
    device: str = "ion"


@dataclass
class TranspileResult:
    source: str
    reference: QubitCircuitIR  # expanded ion-IR circuit, measurements removed, before optimization
    qubit_circuit: QubitCircuitIR  # what was lowered
    circuit: QuditCircuit
    mapping: Mapping
    params: QuditParams
    measures: MeasureMap

    def sidecar(self) -> dict:
        return {
            "source": self.source,
            "params": {"d": self.params.d, "b": self.params.b},
            "mapping": self.mapping.to_json(),
            "measures": self.measures.to_json(),
            "n_qudits": self.circuit.n_qudits,
        }


def split_measures(ir: QubitCircuitIR) -> tuple[QubitCircuitIR, MeasureMap]:
    """Remove final measurements; with none present every qubit is read into the same-index bit."""
    gates = [op for op in ir.ops if not isinstance(op, Measure)]
    meas = [op for op in ir.ops if isinstance(op, Measure)]
    if meas:
        mm = MeasureMap({m.qubit: m.clbit for m in meas}, ir.n_clbits)
    else:
        mm = MeasureMap.identity(ir.n_qubits)
    return QubitCircuitIR(ir.n_qubits, ir.n_clbits, gates), mm


def frontend(text: str, filename: str, rt: Runtime, base_dir: Optional[Path] = None) -> QubitCircuitIR:
    program = parse_qasm(text, filename, includes=rt.includes(), base_dir=base_dir)
    ir = expand(program, rt.natives)
    ir.validate(rt.natives)
    return ir


def _ion_ir(config: TranspileConfig) -> Runtime:
    return load_runtime("ion-ir", config.library_path, config.rules_path)


def transpile_qasm(text: str, filename: str = "<input>", config: Optional[TranspileConfig] = None, base_dir: Optional[Path] = None) -> TranspileResult:
    config = config or TranspileConfig()
    rt = _ion_ir(config)
    ir = frontend(text, filename, rt, base_dir)
    check_ion_compatible(ir)
    reference, measures = split_measures(ir)
    params = config.params
    qubits = reference
    if params.d == 2**params.b:
        # no ancilla level: multicontrolled gates become cz networks, visible to the optimizer
        qubits = expand_mcz_networks(qubits)
    if config.optimize:
        qubits = optimize(qubits, rt.rules)
    mapping = config.mapping or default_mapping(max(reference.n_qubits, 1), params.b)
    qc = lower(qubits, params, mapping)
    device = load_runtime(config.device).device
    graph = device.graph(params.d)
    qc = route(qc, graph)
    if config.optimize:
        qc = optimize_qudit(qc)
    if config.strip_trailing_phases:
        qc = strip_trailing_phases(qc)
    if not is_legal(qc, graph):
        raise InvariantError("routed circuit violates the device selection rules")
    return TranspileResult(filename, reference, qubits, qc, mapping, params, measures)


def transpile_qubit_target(text: str, filename: str, runtime: str, optimize_flag: bool, base_dir: Optional[Path] = None) -> QubitCircuitIR:
    """Qubit-only pipeline for the emulator and ion runtimes (QASM in, QASM out)."""
    rt = load_runtime(runtime)
    ir = frontend(text, filename, rt, base_dir)
    if rt.kind.value == "ION":
        check_ion_compatible(ir)
    # measurements, resets and conditionals block rule matching on their qubits
    return optimize(ir, rt.rules) if optimize_flag else ir


# -- verification -------------------------------------------------------------


@dataclass
class VerifyReport:
    global_phase: oracle.Equivalence
    diagonal_phase: oracle.Equivalence

    @property
    def ok(self) -> bool:
        return self.diagonal_phase.ok


def verify(result: TranspileResult, cap: int = oracle.DEFAULT_CAP, tol: float = 1e-9) -> VerifyReport:
    """Compare the qudit circuit with the qubit reference on the embedded subspace."""
    qc = result.circuit
    V = oracle.circuit_unitary(result.reference, cap)
    E = oracle.embedding_isometry(result.mapping, qc.d, qc.n_qudits, cap)
    WE = oracle.apply_qudit_ops(qc.ops, qc.n_qudits, qc.d, E, cap)
    return VerifyReport(
        oracle.check_equivalence(WE, V, E, oracle.EquivalenceMode.GLOBAL_PHASE, tol),
        oracle.check_equivalence(WE, V, E, oracle.EquivalenceMode.DIAGONAL_PHASE, tol),
    )


# -- statistics ---------------------------------------------------------------


@dataclass(frozen=True)
class Stats:
    ph: int
    r: int
    xx: int

    @property
    def n1(self) -> int:
        """Physical single-qudit gates; virtual phases are not counted."""
        return self.r

    @property
    def n2(self) -> int:
        return self.xx


def stats(circuit: QuditCircuit) -> Stats:
    c = circuit.counts()
    return Stats(c["Ph"], c["R"], c["XX"])


def error_estimate(n1: int, n2: int, e1, e2) -> Decimal:
    """``e1*N1 + e2*N2`` in exact decimal arithmetic (rates as strings or Decimals)."""
    return Decimal(str(e1)) * n1 + Decimal(str(e2)) * n2


def output_distribution(result: TranspileResult, cap: int = oracle.DEFAULT_CAP) -> dict[str, float]:
    """Exact outcome probabilities of the qudit circuit from |0...0>, keyed by dit string."""
    return oracle.simulate_probabilities(result.circuit, cap=cap)


def reference_distribution(result: TranspileResult, cap: int = oracle.DEFAULT_CAP) -> dict[str, float]:
    """Classical-register distribution of the qubit reference circuit from |0...0>."""
    ir = result.reference
    probs = oracle.simulate_probabilities(ir, cap=cap, threshold=0.0)
    out: dict[str, float] = {}
    mm = result.measures
    for key, p in probs.items():
        bits = [int(ch) for ch in reversed(key)]
        cl = ["0"] * mm.n_clbits
        for q, c in mm.pairs.items():
            cl[c] = str(bits[q])
        k = "".join(reversed(cl))
        out[k] = out.get(k, 0.0) + p
    return out


def dump_sidecar(results: list[TranspileResult]) -> str:
    return json.dumps([r.sidecar() for r in results], indent=2) + "\n"


def to_samples(dist: dict[str, float], shots: int) -> dict[str, int]:
    """Deterministic rounding of a distribution into integer counts (largest remainder)."""
    keys = sorted(dist)
    raw = np.array([dist[k] * shots for k in keys])
    base = np.floor(raw).astype(int)
    short = shots - int(base.sum())
    order = np.argsort(-(raw - base), kind="stable")
    for k in order[: max(short, 0)]:
        base[k] += 1
    return {k: int(v) for k, v in zip(keys, base) if v}
