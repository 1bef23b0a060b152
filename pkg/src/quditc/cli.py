"""Command-line interface: transpile, unmap, verify, stats."""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, InvalidOperation
from pathlib import Path
from typing import Optional

from . import oracle
from .benchmarks import benchmarks
from .frontend import QasmError
from .iqc import IqcError, emit, parse_iqc
from .lowering import LoweringError
from .pipeline import (
    InvariantError,
    TranspileConfig,
    TranspileResult,
    dump_sidecar,
    error_estimate,
    stats,
    transpile_qasm,
    transpile_qubit_target,
    verify,
)
from .qudit import REGIMES, MappingError, QuditParams, load_mapping, mapping_from_json
from .rewrite import RuleEvaluationError, RuleSyntaxError
from .router import RoutingError
from .runtime import RuntimeLoadError
from .unmap import MeasureMap, UnmapError, UnmapMode, load_samples, unmap

EXIT_OK, EXIT_USER, EXIT_VERIFY, EXIT_INTERNAL = 0, 1, 2, 3

USER_ERRORS = (
    QasmError,
    MappingError,
    RuleSyntaxError,
    RuleEvaluationError,
    RuntimeLoadError,
    UnmapError,
    IqcError,
    LoweringError,
    RoutingError,
    OSError,
    ValueError,
)


class UsageError(ValueError):
    pass


def _params(args) -> QuditParams:
    base = REGIMES[args.regime]
    d = args.levels if args.levels is not None else base.d
    b = args.qubits_per_qudit if args.qubits_per_qudit is not None else base.b
    return QuditParams(d, b)


def _config(args, params: QuditParams) -> TranspileConfig:
    mapping = load_mapping(args.mapping, params.b) if args.mapping else None
    return TranspileConfig(
        params=params,
        mapping=mapping,
        optimize=args.optimize,
        strip_trailing_phases=getattr(args, "strip_trailing_phases", False),
        repetitions=getattr(args, "repetitions", 100),
        library_path=args.library,
        rules_path=args.rules,
    )


def _transpile_file(path: str, config: TranspileConfig) -> TranspileResult:
    p = Path(path)
    return transpile_qasm(p.read_text(encoding="utf-8"), str(p), config, base_dir=p.parent)


def _sidecar_path(output: Path) -> Path:
    name = output.name
    for ext in (".iqc.json", ".json", ".qasm"):
        if name.endswith(ext):
            return output.with_name(name[: -len(ext)] + ".map.json")
    return output.with_name(name + ".map.json")


def cmd_transpile(args) -> int:
    if args.runtime in ("emulator", "ion"):
        texts = []
        for path in args.inputs:
            p = Path(path)
            ir = transpile_qubit_target(p.read_text(encoding="utf-8"), str(p), args.runtime, args.optimize, p.parent)
            texts.append(ir.to_qasm())
        out = "\n".join(texts)
        if args.output:
            Path(args.output).write_text(out, encoding="utf-8")
        else:
            sys.stdout.write(out)
        return EXIT_OK
    if args.repetitions < 1:
        raise UsageError("--repetitions must be at least 1")
    config = _config(args, _params(args))
    results = [_transpile_file(path, config) for path in args.inputs]
    text = emit([(r.circuit, args.repetitions) for r in results])
    output = Path(args.output) if args.output else Path(args.inputs[0]).with_suffix(".iqc.json")
    output.write_text(text, encoding="utf-8")
    _sidecar_path(output).write_text(dump_sidecar(results), encoding="utf-8")
    for r in results:
        s = stats(r.circuit)
        print(f"{r.source}: d={r.params.d} b={r.params.b} qudits={r.circuit.n_qudits} Rz={s.ph} R={s.r} XX={s.xx}")
    print(f"wrote {output}")
    return EXIT_OK


def cmd_unmap(args) -> int:
    entries = json.loads(Path(args.sidecar).read_text(encoding="utf-8"))
    if not isinstance(entries, list) or not entries:
        raise UnmapError("sidecar must be a non-empty JSON array")
    if not 0 <= args.index < len(entries):
        raise UnmapError(f"circuit index {args.index} out of range (sidecar has {len(entries)})")
    entry = entries[args.index]
    params = QuditParams(entry["params"]["d"], entry["params"]["b"])
    mapping = mapping_from_json(entry["mapping"], params.b)
    measures = MeasureMap.from_json(entry["measures"])
    samples = load_samples(Path(args.samples).read_text(encoding="utf-8"), params.d)
    mode = UnmapMode.STRICT if args.mode == "strict" else UnmapMode.NON_STRICT
    result = unmap(samples, mapping, params, measures, mode) if samples.counts else {}
    text = json.dumps([{"state": k, "count": v} for k, v in result.items()], indent=2) + "\n"
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_verify(args) -> int:
    config = _config(args, _params(args))
    config.strip_trailing_phases = args.strip_trailing_phases
    failed = False
    for path in args.inputs:
        try:
            result = _transpile_file(path, config)
            if args.against:
                circuits = parse_iqc(Path(args.against).read_text(encoding="utf-8"))
                circ, _ = circuits[args.index]
                if circ.n_qudits < result.circuit.n_qudits:
                    circ.n_qudits = result.circuit.n_qudits
                result.circuit = circ
            report = verify(result, cap=args.cap)
        except oracle.CapExceeded as exc:
            print(f"{path}: NOT VERIFIABLE at desk scale ({exc})")
            failed = True
            continue
        for eq in (report.global_phase, report.diagonal_phase):
            verdict = "PASS" if eq.ok else "FAIL"
            print(f"{path}: {eq.mode.name} {verdict} max deviation {eq.deviation:.3e}")
        failed |= not report.ok
    return EXIT_VERIFY if failed else EXIT_OK


def _parse_rates(text: Optional[str]):
    if text is None:
        return None
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise UsageError("--rates expects four comma-separated values: e1b,e2b,e1d,e2d")
    try:
        return [Decimal(p) for p in parts]
    except InvalidOperation:
        raise UsageError(f"--rates: not a number in {text!r}") from None


def cmd_stats(args) -> int:
    rates = _parse_rates(args.rates)
    sources = []
    if args.benchmarks:
        sources = [(bm.name, bm.qasm, bm) for bm in benchmarks()]
    for path in args.inputs:
        p = Path(path)
        sources.append((str(p), p.read_text(encoding="utf-8"), None))
    if not sources:
        raise UsageError("nothing to report: give QASM files or --benchmarks")
    regimes = [args.regime] if args.regime else list(REGIMES)
    header = f"{'name':<14} {'regime':<8}{'Rz':>6}{'R':>6}{'XX':>5}   {'Rz -O':>6}{'R -O':>6}{'XX -O':>6}"
    if rates:
        header += f"   {'E':>10}{'E -O':>10}"
    print(header)
    for name, text, bm in sources:
        for regime in regimes:
            params = REGIMES[regime]
            mapping = bm.mapping_for(params.b) if bm is not None else None
            if mapping is None and args.mapping and bm is None:
                mapping = load_mapping(args.mapping, params.b)
            row = []
            for opt in (False, True):
                cfg = TranspileConfig(params=params, mapping=mapping, optimize=opt, library_path=args.library, rules_path=args.rules)
                row.append(stats(transpile_qasm(text, name, cfg).circuit))
            line = f"{name:<14} {regime:<8}{row[0].ph:>6}{row[0].r:>6}{row[0].xx:>5}   {row[1].ph:>6}{row[1].r:>6}{row[1].xx:>6}"
            if rates:
                e1, e2 = (rates[0], rates[1]) if params.d == 2 else (rates[2], rates[3])
                line += f"   {error_estimate(row[0].n1, row[0].n2, e1, e2):>10}{error_estimate(row[1].n1, row[1].n2, e1, e2):>10}"
            print(line)
    return EXIT_OK


def _add_target_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--regime", choices=sorted(REGIMES), default="qutrit")
    p.add_argument("--levels", type=int, help="override d")
    p.add_argument("--qubits-per-qudit", type=int, help="override b")
    p.add_argument("--mapping", help="JSON placement file")
    p.add_argument("-O", "--optimize", action="store_true", help="enable qubit and qudit rewriting")
    p.add_argument("--no-optimize", dest="optimize", action="store_false", help="disable rewriting (default)")
    p.add_argument("--library", help="gate library replacing the runtime's qelib1.inc")
    p.add_argument("--rules", help="matcher script replacing the runtime's rules")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quditc", description="Qubit-to-qudit transpiler for trapped-ion devices.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("transpile", help="QASM to ion qudit JSON")
    p.add_argument("inputs", nargs="+")
    _add_target_flags(p)
    p.add_argument("--runtime", choices=["ion-ir", "emulator", "ion"], default="ion-ir",
                   help="ion-ir produces qudit JSON; emulator and ion produce qubit QASM")
    p.add_argument("--strip-trailing-phases", action="store_true")
    p.add_argument("--repetitions", type=int, default=100)
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("unmap", help="qudit samples to classical bit strings")
    p.add_argument("samples")
    p.add_argument("--sidecar", required=True, help="the .map.json written by transpile")
    p.add_argument("--index", type=int, default=0, help="circuit index within the sidecar")
    p.add_argument("--mode", choices=["strict", "nonstrict"], default="strict")
    p.add_argument("--output", "-o")
    p.set_defaults(func=cmd_unmap)

    p = sub.add_parser("verify", help="check the transpiled circuit against the qubit circuit")
    p.add_argument("inputs", nargs="+")
    _add_target_flags(p)
    p.add_argument("--strip-trailing-phases", action="store_true")
    p.add_argument("--against", help="verify this .iqc.json instead of a fresh transpilation")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--cap", type=int, default=oracle.DEFAULT_CAP, help="largest simulated dimension")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("stats", help="gate counts and error estimates per regime")
    p.add_argument("inputs", nargs="*")
    p.add_argument("--benchmarks", action="store_true", help="include the bundled benchmark circuits")
    p.add_argument("--regime", choices=sorted(REGIMES))
    p.add_argument("--mapping")
    p.add_argument("--rates", help="e1b,e2b,e1d,e2d")
    p.add_argument("--library")
    p.add_argument("--rules")
    p.set_defaults(func=cmd_stats)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (UsageError, *USER_ERRORS) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_USER
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
