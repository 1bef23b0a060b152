"""XX count of an N-qubit multicontrolled Z in each regime, N up to the largest arity the bundled library defines."""

from quditc.benchmarks import mcz_circuit
from quditc.pipeline import TranspileConfig, transpile_qasm
from quditc.qudit import REGIMES
from quditc.runtime_gen import MAX_MCZ_ARITY

print(f"{'N':>3}" + "".join(f"{r:>9}" for r in REGIMES) + f"{'2N-3':>7}")
for n in range(2, MAX_MCZ_ARITY + 1):
    counts = [transpile_qasm(mcz_circuit(n), f"mcz{n}", TranspileConfig(params=p)).circuit.counts()["XX"] for p in REGIMES.values()]
    print(f"{n:>3}" + "".join(f"{c:>9}" for c in counts) + f"{2 * n - 3:>7}")
