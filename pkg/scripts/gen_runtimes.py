"""Regenerate the bundled runtime directories under src/quditc/runtimes."""

from pathlib import Path

from quditc import runtime_gen

OUT = Path(__file__).resolve().parent.parent / "src" / "quditc" / "runtimes"

for kind in ("emulator", "ion", "ion-ir"):
    d = OUT / kind
    d.mkdir(parents=True, exist_ok=True)
    (d / "qelib1.inc").write_text(runtime_gen.library(kind), encoding="utf-8")
    (d / "matcher.script").write_text(runtime_gen.matcher(kind), encoding="utf-8")
    (d / "runtime.json").write_text(runtime_gen.metadata(kind), encoding="utf-8")
    print(f"wrote {d}")
