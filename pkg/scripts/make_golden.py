"""Rewrite tests/golden/*.iqc.json from the bundled benchmarks (optimized pipeline)."""

from pathlib import Path

from quditc.benchmarks import benchmarks, transpile_benchmark
from quditc.iqc import emit
from quditc.qudit import REGIMES

OUT = Path(__file__).resolve().parent.parent / "tests" / "golden"
OUT.mkdir(exist_ok=True)

for bm in benchmarks():
    for regime in REGIMES:
        path = OUT / f"{bm.name}.{regime}.iqc.json"
        path.write_bytes(emit([(transpile_benchmark(bm, regime).circuit, 100)]).encode("utf-8"))
        print(f"wrote {path.name}")
