"""Converting qudit measurement samples back into classical-register bit strings.

Dit strings print qudit 0 rightmost; the list form is indexed by qudit.
Bit strings print clbit 0 rightmost.
"""

from __future__ import annotations

import enum
import json
from collections import Counter
from dataclasses import dataclass, field

from .qudit import Mapping, QuditParams


class UnmapError(ValueError):
    pass


class UnmapMode(enum.Enum):
    STRICT = "strict"
    NON_STRICT = "nonstrict"


@dataclass(frozen=True)
class MeasureMap:
    pairs: dict = field(hash=False)  # qubit -> clbit
    n_clbits: int

    def __post_init__(self):
        clbits = list(self.pairs.values())
        if len(set(clbits)) != len(clbits):
            raise UnmapError("two qubits are measured into the same classical bit")
        if any(not 0 <= c < self.n_clbits for c in clbits):
            raise UnmapError("classical bit index out of range")

    @classmethod
    def identity(cls, n: int) -> "MeasureMap":
        return cls({q: q for q in range(n)}, n)

    def to_json(self) -> dict:
        return {"n_clbits": self.n_clbits, "pairs": [[q, c] for q, c in sorted(self.pairs.items())]}

    @classmethod
    def from_json(cls, data: dict) -> "MeasureMap":
        return cls({int(q): int(c) for q, c in data["pairs"]}, int(data["n_clbits"]))


@dataclass(frozen=True)
class SampleTable:
    """Measured states (tuples of dits indexed by register position) with counts."""

    counts: dict = field(hash=False)

    def total(self) -> int:
        return sum(self.counts.values())

    def as_strings(self) -> dict[str, int]:
        return {"".join(str(x) for x in reversed(s)): c for s, c in sorted(self.counts.items(), key=lambda kv: kv[0][::-1])}

    def to_json(self) -> str:
        return json.dumps([{"state": k, "count": v} for k, v in self.as_strings().items()], indent=2) + "\n"


def parse_state(state, d: int | None = None) -> tuple[int, ...]:
    if isinstance(state, str):
        if not state.isdigit():
            raise UnmapError(f"state {state!r} must contain decimal digits only")
        dits = tuple(int(ch) for ch in reversed(state))
    elif isinstance(state, list) and all(isinstance(x, int) and not isinstance(x, bool) for x in state):
        dits = tuple(state)
    else:
        raise UnmapError(f"state must be a string or a list of integers, got {state!r}")
    if d is not None and any(not 0 <= x < d for x in dits):
        raise UnmapError(f"state {state!r} has a level outside 0..{d - 1}")
    return dits


def load_samples(text: str, d: int | None = None) -> SampleTable:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UnmapError(f"invalid samples JSON: {exc}") from None
    if not isinstance(data, list):
        raise UnmapError("samples must be a JSON array")
    counts: dict = {}
    for k, entry in enumerate(data):
        if not isinstance(entry, dict) or "state" not in entry or "count" not in entry:
            raise UnmapError(f"entry {k}: expected an object with 'state' and 'count'")
        count = entry["count"]
        if isinstance(count, bool) or not isinstance(count, int) or count < 0:
            raise UnmapError(f"entry {k}: count must be a non-negative integer")
        state = parse_state(entry["state"], d)
        if state in counts:
            raise UnmapError(f"entry {k}: duplicate state")
        counts[state] = count
    return SampleTable(counts)


def unmap(samples: SampleTable, mapping: Mapping, params: QuditParams, measures: MeasureMap, mode: UnmapMode) -> dict[str, int]:
    """Bit-string counts keyed by classical register (clbit 0 rightmost), sorted."""
    m = mapping.n_qudits
    top = params.qubit_levels - 1
    out: Counter = Counter()
    for state, count in samples.counts.items():
        if len(state) != m:
            raise UnmapError(f"state has {len(state)} dits, circuit has {m} qudits")
        if any(not 0 <= x < params.d for x in state):
            raise UnmapError(f"state {state} has a level outside 0..{params.d - 1}")
        if any(x > top for x in state):
            if mode is UnmapMode.STRICT:
                continue
            state = tuple(min(x, top) for x in state)
        bits = ["0"] * measures.n_clbits
        for qubit, clbit in measures.pairs.items():
            level = state[mapping.qudits[qubit]]
            bits[clbit] = str((level >> mapping.slots[qubit]) & 1)
        out["".join(reversed(bits))] += count
    return dict(sorted(out.items()))
