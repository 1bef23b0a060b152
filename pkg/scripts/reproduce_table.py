"""Gate counts for the bundled benchmarks in every regime, next to the reference counts.

Usage: python3 scripts/reproduce_table.py [--rates e1b,e2b,e1d,e2d]
"""

import argparse
from decimal import Decimal

from quditc.benchmarks import benchmarks, transpile_benchmark
from quditc.pipeline import error_estimate, stats
from quditc.qudit import REGIMES

# (Rz, R, XX) without and with optimization, as reported for the original tool
REFERENCE = {
    "bv101": {"qubit": ((16, 22, 2), (6, 13, 2)), "qutrit": ((16, 22, 2), (6, 13, 2)), "ququart": ((25, 72, 1), (5, 42, 1))},
    "bv10101": {"qubit": ((24, 32, 3), (8, 19, 3)), "qutrit": ((24, 32, 3), (9, 19, 3)), "ququart": ((37, 106, 2), (7, 58, 2))},
    "grover000": {"qubit": ((22, 48, 6), (7, 13, 6)), "qutrit": ((14, 42, 4), (9, 18, 4)), "ququart": ((25, 172, 4), (7, 82, 4))},
    "grover0000": {"qubit": ((93, 223, 36), (37, 47, 36)), "qutrit": ((29, 135, 16), (18, 73, 16)), "ququart": ((130, 704, 20), (31, 353, 20))},
    "swaptest1": {"qubit": ((22, 42, 7), (8, 11, 7)), "qutrit": ((14, 36, 5), (4, 15, 5)), "ququart": ((22, 132, 4), (1, 59, 4))},
    "swaptest2": {"qubit": ((44, 82, 14), (15, 19, 14)), "qutrit": ((28, 70, 10), (7, 28, 10)), "ququart": ((44, 256, 8), (1, 114, 8))},
}


def fmt(t):
    return "{:>5}{:>5}{:>4}".format(*t)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--rates", help="e1b,e2b,e1d,e2d")
    args = ap.parse_args()
    rates = [Decimal(x) for x in args.rates.split(",")] if args.rates else None

    print(f"{'name':<12}{'regime':<9}{'ours':>14} {'ours -O':>14} | {'ref':>14} {'ref -O':>14}   R cut")
    for bm in benchmarks():
        for regime in REGIMES:
            plain = stats(transpile_benchmark(bm, regime, False).circuit)
            opt = stats(transpile_benchmark(bm, regime, True).circuit)
            ref_plain, ref_opt = REFERENCE[bm.name][regime]
            cut = 1 - opt.r / plain.r
            line = (f"{bm.name:<12}{regime:<9}{fmt((plain.ph, plain.r, plain.xx))} {fmt((opt.ph, opt.r, opt.xx))} | "
                    f"{fmt(ref_plain)} {fmt(ref_opt)}   {cut:5.0%}")
            if rates:
                e1, e2 = rates[:2] if REGIMES[regime].d == 2 else rates[2:]
                line += f"   E={error_estimate(opt.n1, opt.n2, e1, e2)}"
            print(line)


if __name__ == "__main__":
    main()
