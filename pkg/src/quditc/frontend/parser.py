"""OpenQASM 2.0 lexer and recursive-descent parser with semantic checks."""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Union

from ..ir import SourceSpan
from .ast import (
    FUNCTION_NAMES,
    Argument,
    BarrierStmt,
    BinOp,
    Func,
    GateCall,
    GateDef,
    Ident,
    IfStmt,
    MeasureStmt,
    Neg,
    Number,
    Pi,
    QasmError,
    QasmProgram,
    ResetStmt,
)

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r\f]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<real>(?:\d+\.\d*|\.\d+)(?:[eE][-+]?\d+)?|\d+[eE][-+]?\d+)
  | (?P<int>\d+)
  | (?P<string>"[^"\n]*")
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>->|==|[-+*/^()\[\]{};,])
""",
    re.VERBOSE,
)

KEYWORDS = {"OPENQASM", "include", "qreg", "creg", "gate", "opaque", "measure", "barrier", "reset", "if", "pi"}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


def tokenize(text: str, filename: str) -> list[Token]:
    out = []
    pos, line, start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        span = SourceSpan(filename, line, pos - start + 1)
        if m is None:
            raise QasmError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            start = m.end()
        elif kind not in ("ws", "comment"):
            out.append(Token(kind, m.group(), span))
        pos = m.end()
    out.append(Token("eof", "", SourceSpan(filename, line, pos - start + 1)))
    return out


IncludeSource = Union[dict, Callable[[str], Optional[str]], None]


class _Parser:
    def __init__(self, tokens, program: QasmProgram, includes: IncludeSource, base: Optional[Path], depth: int):
        self.toks = tokens
        self.i = 0
        self.prog = program
        self.includes = includes
        self.base = base
        self.depth = depth

    # token helpers

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def _found(self) -> str:
        return "end of input" if self.tok.kind == "eof" else repr(self.tok.text)

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise QasmError(f"expected '{text}', found {self._found()}", self.tok.span)
        t = self.tok
        self.i += 1
        return t

    def ident(self, what="identifier") -> Token:
        if self.tok.kind != "ident" or self.tok.text in KEYWORDS:
            raise QasmError(f"expected {what}, found {self._found()}", self.tok.span)
        t = self.tok
        self.i += 1
        return t

    def integer(self) -> int:
        if self.tok.kind != "int":
            raise QasmError(f"expected integer, found {self._found()}", self.tok.span)
        t = self.tok
        self.i += 1
        return int(t.text)

    # program structure

    def program(self, header: bool) -> None:
        if header and self.at("OPENQASM"):
            self.i += 1
            if self.tok.kind != "real" or self.tok.text != "2.0":
                raise QasmError(f"unsupported OpenQASM version {self.tok.text}", self.tok.span)
            self.i += 1
            self.expect(";")
        while self.tok.kind != "eof":
            self.statement()

    def statement(self) -> None:
        t = self.tok
        if self.at("OPENQASM"):
            raise QasmError("version header must be the first statement", t.span)
        if self.at("include"):
            self.include()
        elif self.at("qreg") or self.at("creg"):
            self.register()
        elif self.at("gate"):
            self.gatedef(opaque=False)
        elif self.at("opaque"):
            self.gatedef(opaque=True)
        elif self.at("if"):
            self.prog.body.append(self.if_stmt())
        else:
            self.prog.body.append(self.quantum_op())

    def include(self) -> None:
        kw = self.expect("include")
        if self.tok.kind != "string":
            raise QasmError(f"expected file name string, found {self._found()}", self.tok.span)
        name = self.tok.text[1:-1]
        self.i += 1
        self.expect(";")
        if self.depth > 16:
            raise QasmError("include nesting too deep", kw.span)
        text = self._resolve(name)
        if text is None:
            raise QasmError(f"cannot resolve include \"{name}\"", kw.span)
        self.prog.includes.append(name)
        lib = _library(name, text)
        if lib is not None and not (lib.keys() & self.prog.gatedefs.keys()):
            self.prog.gatedefs.update(lib)
            return
        sub = _Parser(tokenize(text, name), self.prog, self.includes, self.base, self.depth + 1)
        sub.program(header=False)

    def _resolve(self, name: str) -> Optional[str]:
        if callable(self.includes):
            text = self.includes(name)
            if text is not None:
                return text
        elif self.includes and name in self.includes:
            return self.includes[name]
        path = Path(name) if self.base is None else self.base / name
        if name != "qelib1.inc" and path.is_file():
            return path.read_text(encoding="utf-8")
        return None

    def register(self) -> None:
        kind = self.tok.text
        self.i += 1
        name = self.ident("register name")
        self.expect("[")
        size = self.integer()
        self.expect("]")
        self.expect(";")
        if name.text in self.prog.qregs or name.text in self.prog.cregs:
            raise QasmError(f"register '{name.text}' already declared", name.span)
        if size < 1:
            raise QasmError(f"register '{name.text}' must have positive size", name.span)
        (self.prog.qregs if kind == "qreg" else self.prog.cregs)[name.text] = size

    def id_list(self, what: str) -> list[Token]:
        out = [self.ident(what)]
        while self.at(","):
            self.i += 1
            out.append(self.ident(what))
        return out

    def gatedef(self, opaque: bool) -> None:
        self.i += 1
        name = self.ident("gate name")
        params: list[Token] = []
        if self.at("("):
            self.i += 1
            if not self.at(")"):
                params = self.id_list("parameter name")
            self.expect(")")
        qargs = self.id_list("qubit argument")
        pnames = [p.text for p in params]
        qnames = [q.text for q in qargs]
        for names, what in ((pnames, "parameter"), (qnames, "qubit argument")):
            if len(set(names)) != len(names):
                raise QasmError(f"duplicate {what} in definition of '{name.text}'", name.span)
        if name.text in self.prog.gatedefs:
            raise QasmError(f"gate '{name.text}' already defined", name.span)
        body = None
        if opaque:
            self.expect(";")
        else:
            self.expect("{")
            stmts = []
            while not self.at("}"):
                if self.tok.kind == "eof":
                    raise QasmError(f"unterminated body of gate '{name.text}'", name.span)
                stmts.append(self.body_stmt(set(pnames), set(qnames)))
            self.expect("}")
            body = tuple(stmts)
        self.prog.gatedefs[name.text] = GateDef(name.text, tuple(pnames), tuple(qnames), body, name.span)

    def body_stmt(self, params: set, qargs: set):
        if self.at("barrier"):
            kw = self.expect("barrier")
            args = self.gate_args(local=qargs)
            self.expect(";")
            return BarrierStmt(tuple(args), kw.span)
        name = self.ident("gate name")
        exprs = self.param_list(params)
        args = self.gate_args(local=qargs)
        self.expect(";")
        call = GateCall(name.text, tuple(exprs), tuple(args), name.span)
        self.check_call(call)
        if len({a.reg for a in args}) != len(args):
            raise QasmError("repeated qubit argument", name.span)
        return call

    def param_list(self, bound: Optional[set]) -> list:
        exprs = []
        if self.at("("):
            self.i += 1
            if not self.at(")"):
                exprs.append(self.expr(bound))
                while self.at(","):
                    self.i += 1
                    exprs.append(self.expr(bound))
            self.expect(")")
        return exprs

    def gate_args(self, local: Optional[set] = None) -> list[Argument]:
        args = [self.argument(local)]
        while self.at(","):
            self.i += 1
            args.append(self.argument(local))
        return args

    def argument(self, local: Optional[set] = None, creg: bool = False) -> Argument:
        name = self.ident("register")
        index = None
        if local is not None:
            if name.text not in local:
                raise QasmError(f"unknown qubit argument '{name.text}'", name.span)
            return Argument(name.text, None, name.span)
        if self.at("["):
            self.i += 1
            index = self.integer()
            self.expect("]")
        regs = self.prog.cregs if creg else self.prog.qregs
        if name.text not in regs:
            kind = "classical" if creg else "quantum"
            raise QasmError(f"unknown {kind} register '{name.text}'", name.span)
        if index is not None and index >= regs[name.text]:
            raise QasmError(f"index out of range: {name.text}[{index}] (size {regs[name.text]})", name.span)
        return Argument(name.text, index, name.span)

    def check_call(self, call: GateCall, known: bool = True) -> None:
        gdef = self.prog.gatedefs.get(call.name)
        if gdef is None:
            if not known:
                return  # top-level calls to undefined gates are reported by expand
            raise QasmError(f"unknown gate '{call.name}'", call.span)
        if len(call.params) != len(gdef.params):
            raise QasmError(f"gate '{call.name}' expects {len(gdef.params)} parameters, got {len(call.params)}", call.span)
        if len(call.args) != gdef.arity:
            raise QasmError(f"gate '{call.name}' expects {gdef.arity} qubits, got {len(call.args)}", call.span)

    def _size(self, arg: Argument, creg: bool = False) -> int:
        return 1 if arg.index is not None else (self.prog.cregs if creg else self.prog.qregs)[arg.reg]

    def check_broadcast(self, args: list[Argument], span: SourceSpan) -> None:
        sizes = {self._size(a) for a in args if a.index is None}
        if len(sizes) > 1:
            raise QasmError("register arguments of different sizes", span)
        singles = [(a.reg, a.index) for a in args if a.index is not None]
        if len(set(singles)) != len(singles):
            raise QasmError("repeated qubit argument", span)
        whole = {a.reg for a in args if a.index is None}
        if len(whole) != sum(a.index is None for a in args) or any(r in whole for r, _ in singles):
            raise QasmError("repeated qubit argument", span)

    def quantum_op(self):
        t = self.tok
        if self.at("measure"):
            self.i += 1
            src = self.argument()
            self.expect("->")
            dst = self.argument(creg=True)
            self.expect(";")
            if self._size(src) != self._size(dst, creg=True) or (src.index is None) != (dst.index is None):
                raise QasmError("measure source and destination differ in size", t.span)
            return MeasureStmt(src, dst, t.span)
        if self.at("reset"):
            self.i += 1
            arg = self.argument()
            self.expect(";")
            return ResetStmt(arg, t.span)
        if self.at("barrier"):
            self.i += 1
            args = self.gate_args()
            self.expect(";")
            return BarrierStmt(tuple(args), t.span)
        name = self.ident("statement")
        exprs = self.param_list(bound=set())
        args = self.gate_args()
        self.expect(";")
        call = GateCall(name.text, tuple(exprs), tuple(args), name.span)
        self.check_call(call, known=False)
        self.check_broadcast(args, name.span)
        return call

    def if_stmt(self) -> IfStmt:
        kw = self.expect("if")
        self.expect("(")
        creg = self.ident("classical register")
        if creg.text not in self.prog.cregs:
            raise QasmError(f"unknown classical register '{creg.text}'", creg.span)
        self.expect("==")
        value = self.integer()
        self.expect(")")
        if self.at("if") or self.at("barrier"):
            raise QasmError("only a gate, measure or reset may follow an if", self.tok.span)
        body = self.quantum_op()
        return IfStmt(creg.text, value, body, kw.span)

    # expressions; unary minus binds looser than ^

    def expr(self, bound: Optional[set]):
        left = self.term(bound)
        while self.at("+") or self.at("-"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.term(bound))
        return left

    def term(self, bound):
        left = self.unary(bound)
        while self.at("*") or self.at("/"):
            op = self.tok.text
            self.i += 1
            left = BinOp(op, left, self.unary(bound))
        return left

    def unary(self, bound):
        if self.at("-"):
            self.i += 1
            return Neg(self.unary(bound))
        if self.at("+"):
            self.i += 1
            return self.unary(bound)
        return self.power(bound)

    def power(self, bound):
        base = self.atom(bound)
        if self.at("^"):
            self.i += 1
            return BinOp("^", base, self.unary(bound))
        return base

    def atom(self, bound):
        t = self.tok
        if t.kind in ("real", "int"):
            self.i += 1
            return Number(float(t.text))
        if self.at("pi"):
            self.i += 1
            return Pi()
        if self.at("("):
            self.i += 1
            e = self.expr(bound)
            self.expect(")")
            return e
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            if t.text in FUNCTION_NAMES and self.at("("):
                self.i += 1
                arg = self.expr(bound)
                self.expect(")")
                return Func(t.text, arg, t.span)
            if bound is not None and t.text not in bound:
                raise QasmError(f"unknown parameter '{t.text}'", t.span)
            return Ident(t.text, t.span)
        raise QasmError(f"expected expression, found {self._found()}", t.span)


@functools.lru_cache(maxsize=16)
def _library(name: str, text: str) -> Optional[dict]:
    """Gate definitions of a self-contained include file (no includes, registers or statements).

    Runtime libraries are re-included on every parse, so their definitions are
    parsed once and shared; GateDef values are immutable.
    """
    prog = QasmProgram()
    try:
        _Parser(tokenize(text, name), prog, None, None, 1).program(header=False)
    except QasmError:
        return None  # let the regular path report it in context
    if prog.includes or prog.qregs or prog.cregs or prog.body:
        return None
    return prog.gatedefs


def parse_qasm(
    text: str,
    filename: str = "<input>",
    includes: IncludeSource = None,
    base_dir: Optional[Path] = None,
) -> QasmProgram:
    """Parse and check a program.

    ``includes`` maps include names to source text (or is a callable doing the
    same); the runtime's gate library is supplied there as ``qelib1.inc``.
    Other names fall back to files next to ``base_dir``.
    """
    program = QasmProgram()
    parser = _Parser(tokenize(text, filename), program, includes, base_dir, 0)
    parser.program(header=True)
    return program
