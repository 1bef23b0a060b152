"""Source text of the bundled runtimes (gate libraries and matcher scripts).

``scripts/gen_runtimes.py`` writes these into ``quditc/runtimes/<name>/``.
"""

from __future__ import annotations

import json

from .oracle import mcz_name

MAX_MCZ_ARITY = 9

# -- gate libraries ---------------------------------------------------------

_H_R_RZ = """\
gate h a { r(pi/2, -pi/2) a; rz(pi) a; }
"""

_CX_FROM_CZ = """\
gate cx a, b { h b; cz a, b; h b; }
"""

_ION_IR_CORE = """\
opaque rz(theta) a;
opaque r(theta, phi) a;
opaque cz a, b;
"""

_ION_CORE = """\
opaque rz(theta) a;
opaque r(theta, phi) a;
opaque xx(theta) a, b;
gate cz a, b {
  r(-pi/2, pi/2) a;
  r(-pi/2, pi/2) b;
  xx(pi/4) a, b;
  r(pi/2, pi/2) a;
  r(pi/2, pi/2) b;
  rz(-pi/2) a;
  rz(-pi/2) b;
}
"""

_EMULATOR_CORE = """\
opaque U(theta, phi, lambda) a;
opaque cx a, b;
gate rz(theta) a { U(0, 0, theta) a; }
gate r(theta, phi) a { U(theta, phi - pi/2, pi/2 - phi) a; }
gate h a { U(pi/2, 0, pi) a; }
gate cz a, b { h b; cx a, b; h b; }
"""

_U_FROM_R = """\
gate U(theta, phi, lambda) a { rz(lambda) a; r(theta, pi/2) a; rz(phi) a; }
"""

_COMMON = """\
gate CX a, b { cx a, b; }
gate u3(theta, phi, lambda) a { U(theta, phi, lambda) a; }
gate u2(phi, lambda) a { U(pi/2, phi, lambda) a; }
gate u1(lambda) a { rz(lambda) a; }
gate u(theta, phi, lambda) a { U(theta, phi, lambda) a; }
gate p(lambda) a { rz(lambda) a; }
gate id a { rz(0) a; }
gate x a { r(pi, 0) a; }
gate y a { r(pi, pi/2) a; }
gate z a { rz(pi) a; }
gate s a { rz(pi/2) a; }
gate sdg a { rz(-pi/2) a; }
gate t a { rz(pi/4) a; }
gate tdg a { rz(-pi/4) a; }
gate rx(theta) a { r(theta, 0) a; }
gate ry(theta) a { r(theta, pi/2) a; }
gate sx a { r(pi/2, 0) a; }
gate sxdg a { r(-pi/2, 0) a; }
gate cy a, b { sdg b; cx a, b; s b; }
gate swap a, b { cx a, b; cx b, a; cx a, b; }
gate ch a, b { ry(-pi/4) b; cz a, b; ry(pi/4) b; }
gate crz(lambda) a, b { rz(lambda/2) b; cx a, b; rz(-lambda/2) b; cx a, b; }
gate cu1(lambda) a, b { rz(lambda/2) a; cx a, b; rz(-lambda/2) b; cx a, b; rz(lambda/2) b; }
gate cp(lambda) a, b { cu1(lambda) a, b; }
gate cu3(theta, phi, lambda) c, t {
  rz((lambda + phi)/2) c;
  rz((lambda - phi)/2) t;
  cx c, t;
  u3(-theta/2, 0, -(phi + lambda)/2) t;
  cx c, t;
  u3(theta/2, phi, 0) t;
}
gate rzz(theta) a, b { cx a, b; rz(theta) b; cx a, b; }
gate rxx(theta) a, b { h a; h b; rzz(theta) a, b; h a; h b; }
gate ccx a, b, c { h c; ccz a, b, c; h c; }
gate cswap a, b, c { cx c, b; ccx a, b, c; cx c, b; }
"""


def _formals(n: int) -> list[str]:
    return [f"q{k}" for k in range(n)]


def _mcx_defs() -> str:
    lines = []
    for arity in range(4, MAX_MCZ_ARITY + 1):
        qs = _formals(arity)
        name = "c3x" if arity == 4 else f"c{arity - 1}x"
        lines.append(f"gate {name} {', '.join(qs)} {{ h {qs[-1]}; {mcz_name(arity)} {', '.join(qs)}; h {qs[-1]}; }}")
    return "\n".join(lines) + "\n"


def _opaque_mcz() -> str:
    return "".join(
        f"opaque {mcz_name(n)} {', '.join(_formals(n))};\n" for n in range(3, MAX_MCZ_ARITY + 1)
    )


def _network_body(n: int) -> list[str]:
    """Gray-code CX/phase network for the n-qubit multicontrolled Z (2**n - 2 CX)."""
    qs = _formals(n)

    def phase(size: int) -> str:
        sign = "" if size % 2 else "-"
        return f"{sign}pi/{2 ** (n - 1)}"

    body = [f"rz({phase(1)}) {qs[0]};"]
    for h in range(1, n):
        body.append(f"rz({phase(1)}) {qs[h]};")
        prev = 0
        for k in range(1, 2**h):
            g = k ^ (k >> 1)
            bit = (g ^ prev).bit_length() - 1
            body.append(f"cx {qs[bit]}, {qs[h]};")
            body.append(f"rz({phase(bin(g).count('1') + 1)}) {qs[h]};")
            prev = g
        body.append(f"cx {qs[prev.bit_length() - 1]}, {qs[h]};")
    return body


def _network_mcz() -> str:
    out = []
    for n in range(3, MAX_MCZ_ARITY + 1):
        body = "\n".join("  " + line for line in _network_body(n))
        out.append(f"gate {mcz_name(n)} {', '.join(_formals(n))} {{\n{body}\n}}\n")
    return "".join(out)


def library(kind: str) -> str:
    if kind == "ion-ir":
        parts = [_ION_IR_CORE, _opaque_mcz(), _H_R_RZ, _CX_FROM_CZ, _U_FROM_R]
    elif kind == "ion":
        parts = [_ION_CORE, _H_R_RZ, _CX_FROM_CZ, _U_FROM_R, _network_mcz()]
    elif kind == "emulator":
        parts = [_EMULATOR_CORE, _network_mcz()]
    else:
        raise ValueError(f"unknown runtime '{kind}'")
    return "// gate library for the " + kind + " runtime\n" + "".join(parts) + _COMMON + _mcx_defs()


# -- matcher scripts --------------------------------------------------------

_RZ_RULES = """\
// phases
rz(a0) . rz(a1) => {
  return rz(a0 + a1);
}
rz(a) => {
  a_2 = a / 2;
  s = sin(a_2);
  if s == 0 {
    return id;
  } else if a_2 > pi || a_2 < -pi {
    return rz(2 * atan2(s, cos(a_2)));
  }
}
"""

_R_RULES = """\
// rotations
r(t, p) => {
  s = sin(t / 2);
  if s == 0 {
    return id;
  } else if t > 2 * pi || t < -2 * pi {
    return r(2 * atan2(s, cos(t / 2)), p);
  } else if p > pi || p < -pi {
    return r(t, atan2(sin(p), cos(p)));
  }
}
// two rotations become one rotation followed by a phase
r(t1, p1) . r(t2, p2) => {
  w1 = cos(t1 / 2);
  x1 = sin(t1 / 2) * cos(p1);
  y1 = sin(t1 / 2) * sin(p1);
  w2 = cos(t2 / 2);
  x2 = sin(t2 / 2) * cos(p2);
  y2 = sin(t2 / 2) * sin(p2);
  w = w1 * w2 - x1 * x2 - y1 * y2;
  x = w2 * x1 + w1 * x2;
  y = w2 * y1 + w1 * y2;
  z = x2 * y1 - y2 * x1;
  half = atan2(z, w);
  c = sqrt(w * w + z * z);
  s = sqrt(x * x + y * y);
  if s == 0 {
    return rz(2 * half);
  }
  return r(2 * atan2(s, c), atan2(y, x) - half) . rz(2 * half);
}
// phases move right through rotations
rz(a) . r(b, c) => {
  return r(b, c - a) . rz(a);
}
"""

_CZ_RULES = """\
// phases move right through controlled-Z gates
rz(a) x . cz x, y => {
  return cz x, y . rz(a) x;
}
rz(a) y . cz x, y => {
  return cz x, y . rz(a) y;
}
cz x, y . cz x, y => {
  return id;
}
cz x, y . cz y, x => {
  return id;
}
"""


def _mcz_rules() -> str:
    out = []
    for n in range(3, MAX_MCZ_ARITY + 1):
        qs = _formals(n)
        name = mcz_name(n)
        args = ", ".join(qs)
        for q in qs:
            out.append(f"rz(a) {q} . {name} {args} => {{\n  return {name} {args} . rz(a) {q};\n}}\n")
        out.append(f"{name} {args} . {name} {args} => {{\n  return id;\n}}\n")
    return "// phases move right through multicontrolled Z gates\n" + "".join(out)


_XX_RULES = """\
// two-qubit ion gates
xx(a) x, y . xx(b) x, y => {
  return xx(a + b) x, y;
}
xx(a) x, y . xx(b) y, x => {
  return xx(a + b) x, y;
}
xx(a) x, y => {
  if sin(a) == 0 {
    return id;
  } else if a > pi || a < -pi {
    return xx(atan2(sin(a), cos(a))) x, y;
  }
}
"""

_EMULATOR_RULES = """\
// U(theta, phi, lambda) = Rz(phi) Ry(theta) Rz(lambda) up to a global phase
U(t1, f1, l1) . U(t2, f2, l2) => {
  w1 = cos(t1 / 2) * cos((f1 + l1) / 2);
  z1 = cos(t1 / 2) * sin((f1 + l1) / 2);
  y1 = sin(t1 / 2) * cos((f1 - l1) / 2);
  x1 = -sin(t1 / 2) * sin((f1 - l1) / 2);
  w2 = cos(t2 / 2) * cos((f2 + l2) / 2);
  z2 = cos(t2 / 2) * sin((f2 + l2) / 2);
  y2 = sin(t2 / 2) * cos((f2 - l2) / 2);
  x2 = -sin(t2 / 2) * sin((f2 - l2) / 2);
  w = w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2;
  x = w2 * x1 + w1 * x2 + y2 * z1 - z2 * y1;
  y = w2 * y1 + w1 * y2 + z2 * x1 - x2 * z1;
  z = w2 * z1 + w1 * z2 + x2 * y1 - y2 * x1;
  sum = 2 * atan2(z, w);
  diff = 2 * atan2(-x, y);
  if sqrt(x * x + y * y) == 0 {
    diff = 0;
  }
  if sqrt(w * w + z * z) == 0 {
    sum = 0;
  }
  return U(2 * atan2(sqrt(x * x + y * y), sqrt(w * w + z * z)), (sum + diff) / 2, (sum - diff) / 2);
}
U(t, f, l) => {
  if sin(t / 2) == 0 && sin((f + l) / 2) == 0 {
    return id;
  }
}
cx x, y . cx x, y => {
  return id;
}
"""


def matcher(kind: str) -> str:
    if kind == "ion-ir":
        return _RZ_RULES + _R_RULES + _CZ_RULES + _mcz_rules()
    if kind == "ion":
        return _RZ_RULES + _R_RULES + _XX_RULES
    if kind == "emulator":
        return _EMULATOR_RULES
    raise ValueError(f"unknown runtime '{kind}'")


def metadata(kind: str) -> str:
    data: dict = {"name": kind, "kind": {"ion-ir": "ION_IR", "ion": "ION", "emulator": "EMULATOR"}[kind]}
    if kind == "ion":
        data["device"] = {"levels": 4, "r_pairs": [[0, k] for k in range(1, 4)], "xx_pairs": [[0, 1]]}
    return json.dumps(data, indent=2) + "\n"
