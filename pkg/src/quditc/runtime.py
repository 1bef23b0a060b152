"""Runtimes: gate library, matcher rules, native gate set and target kind."""

from __future__ import annotations

import enum
import functools
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .frontend import QasmError, parse_qasm
from .rewrite import RuleScript, RuleSyntaxError, parse_rules
from .router import TransitionGraph

BUNDLED_DIR = Path(__file__).parent / "runtimes"
BUNDLED = ("emulator", "ion", "ion-ir")
ENV_VAR = "QUDITC_RUNTIME_DIR"


class RuntimeLoadError(ValueError):
    pass


class TargetKind(enum.Enum):
    EMULATOR = "EMULATOR"
    ION = "ION"
    ION_IR = "ION_IR"


@dataclass(frozen=True)
class IonDeviceSpec:
    levels: int
    r_pairs: frozenset
    xx_pairs: frozenset

    def graph(self, d: int) -> TransitionGraph:
        if d > self.levels:
            raise RuntimeLoadError(f"device supports at most {self.levels} levels, {d} requested")
        keep = lambda pairs: frozenset(p for p in pairs if max(p) < d)  # noqa: E731
        return TransitionGraph(d, keep(self.r_pairs), keep(self.xx_pairs))

    @classmethod
    def from_json(cls, data: dict) -> "IonDeviceSpec":
        pairs = lambda key: frozenset(tuple(sorted(p)) for p in data[key])  # noqa: E731
        return cls(int(data["levels"]), pairs("r_pairs"), pairs("xx_pairs"))


@dataclass(frozen=True)
class Runtime:
    name: str
    library: str
    rules_source: str
    natives: dict = field(hash=False)  # name -> (param count, qubit count)
    kind: TargetKind
    rules: RuleScript = field(hash=False, repr=False)
    device: Optional[IonDeviceSpec] = None

    def includes(self) -> dict[str, str]:
        return {"qelib1.inc": self.library}


def _build(name: str, library: str, rules_source: str, meta: dict, where: str) -> Runtime:
    try:
        lib = parse_qasm(library, filename=f"{where}/qelib1.inc")
    except QasmError as exc:
        raise RuntimeLoadError(f"gate library of runtime '{name}': {exc}") from None
    natives = {n: (len(g.params), g.arity) for n, g in lib.opaque_gates().items()}
    if not natives:
        raise RuntimeLoadError(f"runtime '{name}' declares no opaque gates")
    try:
        rules = parse_rules(rules_source, natives, filename=f"{where}/matcher.script")
    except RuleSyntaxError as exc:
        raise RuntimeLoadError(f"matcher script of runtime '{name}': {exc}") from None
    try:
        kind = TargetKind(meta.get("kind", "ION_IR"))
    except ValueError:
        raise RuntimeLoadError(f"runtime '{name}': unknown target kind {meta.get('kind')!r}") from None
    device = IonDeviceSpec.from_json(meta["device"]) if meta.get("device") else None
    if kind is TargetKind.ION and device is None:
        raise RuntimeLoadError(f"ion runtime '{name}' needs a device description")
    if device is not None:
        device.graph(device.levels)  # connectivity check
    return Runtime(meta.get("name", name), library, rules_source, natives, kind, rules, device)


def _from_dir(path: Path) -> Runtime:
    try:
        library = (path / "qelib1.inc").read_text(encoding="utf-8")
        rules = (path / "matcher.script").read_text(encoding="utf-8")
    except OSError as exc:
        raise RuntimeLoadError(f"cannot read runtime at {path}: {exc}") from None
    meta_path = path / "runtime.json"
    meta = json.loads(meta_path.read_text(encoding="utf-8")) if meta_path.exists() else {"name": path.name}
    return _build(meta.get("name", path.name), library, rules, meta, str(path))


@functools.lru_cache(maxsize=None)
def _bundled(name: str) -> Runtime:
    return _from_dir(BUNDLED_DIR / name)


def load_runtime(
    name: str = "ion-ir",
    library_path: Optional[str] = None,
    rules_path: Optional[str] = None,
) -> Runtime:
    """Load a runtime by name or directory, optionally overriding its library or rules file."""
    path = None
    if name in BUNDLED:
        path = BUNDLED_DIR / name
    else:
        env = os.environ.get(ENV_VAR)
        if env and (Path(env) / name).is_dir():
            path = Path(env) / name
        elif Path(name).is_dir():
            path = Path(name)
    if path is None:
        raise RuntimeLoadError(f"unknown runtime '{name}'")
    rt = _bundled(name) if name in BUNDLED else _from_dir(path)
    if library_path is None and rules_path is None:
        return rt
    try:
        library = Path(library_path).read_text(encoding="utf-8") if library_path else rt.library
        rules = Path(rules_path).read_text(encoding="utf-8") if rules_path else rt.rules_source
    except OSError as exc:
        raise RuntimeLoadError(str(exc)) from None
    meta = {"name": rt.name, "kind": rt.kind.value}
    if rt.device is not None:
        meta["device"] = {
            "levels": rt.device.levels,
            "r_pairs": sorted(rt.device.r_pairs),
            "xx_pairs": sorted(rt.device.xx_pairs),
        }
    return _build(rt.name, library, rules, meta, str(path))
