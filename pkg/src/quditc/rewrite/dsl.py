"""Parser for matcher scripts.

    script      := rule*
    rule        := pattern "=>" block
    pattern     := term ("." term)*
    term        := IDENT ["(" var ("," var)* ")"] [IDENT ("," IDENT)*]
    block       := "{" stmt* "}"
    stmt        := IDENT "=" expr ";"
                 | "if" expr block ["else" (block | ifstmt)]
                 | "return" composition ";"
    composition := "id" | callterm ("." callterm)*
    callterm    := IDENT ["(" expr ("," expr)* ")"] [IDENT ("," IDENT)*]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Optional, Union

from ..ir import SourceSpan

FUNCTIONS = {"sin": 1, "cos": 1, "tan": 1, "atan2": 2, "sqrt": 1, "abs": 1, "floor": 1, "mod": 2}
CONSTANTS = {"pi"}
KEYWORDS = {"if", "else", "return", "id"}


class RuleSyntaxError(ValueError):
    def __init__(self, message: str, span: SourceSpan):
        super().__init__(f"{span}: {message}")
        self.span = span
        self.message = message


# -- AST ------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class Unary:
    op: str
    operand: object


@dataclass(frozen=True)
class Binary:
    op: str
    left: object
    right: object


Expr = Union[Num, Var, Call, Unary, Binary]


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr


@dataclass(frozen=True)
class If:
    cond: Expr
    then: tuple
    orelse: Optional[tuple]


@dataclass(frozen=True)
class CallTerm:
    name: str
    args: tuple
    qubits: Optional[tuple[str, ...]]
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class Return:
    terms: tuple  # empty tuple means `id`


@dataclass(frozen=True)
class PatternTerm:
    name: str
    params: tuple[str, ...]
    qubits: Optional[tuple[str, ...]]
    span: SourceSpan = field(compare=False)


@dataclass(frozen=True)
class RewriteRule:
    pattern: tuple[PatternTerm, ...]
    block: tuple
    span: SourceSpan = field(compare=False)

    @property
    def name(self) -> str:
        return f"rule at {self.span}"


@dataclass(frozen=True)
class RuleScript:
    rules: tuple[RewriteRule, ...]

    def __len__(self) -> int:
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)


# -- lexer ----------------------------------------------------------------

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>=>|==|!=|<=|>=|\|\||&&|[-+*/<>=(){},.;])
""",
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    span: SourceSpan


def tokenize(text: str, filename: str = "<matcher>") -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        span = SourceSpan(filename, line, pos - line_start + 1)
        if m is None:
            raise RuleSyntaxError(f"unexpected character {text[pos]!r}", span)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tokens.append(Token(kind, m.group(), span))
        pos = m.end()
    tokens.append(Token("eof", "", SourceSpan(filename, line, pos - line_start + 1)))
    return tokens


# -- parser ---------------------------------------------------------------


class _Parser:
    def __init__(self, tokens: list[Token], natives: Optional[dict]):
        self.toks = tokens
        self.i = 0
        self.natives = natives

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        return self.tok.kind in ("op", "ident") and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            raise RuleSyntaxError(f"expected {text!r}, found {found}", self.tok.span)
        t = self.tok
        self.i += 1
        return t

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.text)
            raise RuleSyntaxError(f"expected {what}, found {found}", self.tok.span)
        t = self.tok
        self.i += 1
        return t

    # script / rule

    def script(self) -> RuleScript:
        rules = []
        while self.tok.kind != "eof":
            rules.append(self.rule())
        return RuleScript(tuple(rules))

    def rule(self) -> RewriteRule:
        span = self.tok.span
        terms = [self.pattern_term()]
        while self.at("."):
            self.i += 1
            terms.append(self.pattern_term())
        self.expect("=>")
        params, qubits = set(), set()
        for t in terms:
            for p in t.params:
                if p in params or p in CONSTANTS:
                    raise RuleSyntaxError(f"parameter variable {p!r} bound twice", t.span)
                params.add(p)
            qubits.update(t.qubits or ())
        block = self.block(set(params), qubits)
        return RewriteRule(tuple(terms), block, span)

    def pattern_term(self) -> PatternTerm:
        name = self.ident("gate name")
        params: list[str] = []
        if self.at("("):
            self.i += 1
            params.append(self.ident("parameter variable").text)
            while self.at(","):
                self.i += 1
                params.append(self.ident("parameter variable").text)
            self.expect(")")
        qubits = self.qubit_list()
        term = PatternTerm(name.text, tuple(params), qubits, name.span)
        self.check_gate(term.name, len(params), qubits, name.span)
        if qubits is not None and len(set(qubits)) != len(qubits):
            raise RuleSyntaxError("repeated qubit variable in one gate", name.span)
        return term

    def qubit_list(self) -> Optional[tuple[str, ...]]:
        if self.tok.kind != "ident" or self.tok.text in KEYWORDS:
            return None
        out = [self.ident().text]
        while self.at(","):
            self.i += 1
            out.append(self.ident("qubit variable").text)
        return tuple(out)

    def check_gate(self, name: str, nparams: int, qubits, span: SourceSpan) -> None:
        if self.natives is None:
            return
        if name not in self.natives:
            raise RuleSyntaxError(f"gate {name!r} is not native", span)
        want_p, want_q = self.natives[name]
        if nparams != want_p:
            raise RuleSyntaxError(f"gate {name!r} takes {want_p} parameters, got {nparams}", span)
        if qubits is not None and len(qubits) != want_q:
            raise RuleSyntaxError(f"gate {name!r} acts on {want_q} qubits, got {len(qubits)}", span)

    # statements

    def block(self, bound: set, qubits: set) -> tuple:
        """Parse a block; ``bound`` is updated with names definitely assigned."""
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise RuleSyntaxError("unterminated block", self.tok.span)
            stmts.append(self.stmt(bound, qubits))
        self.expect("}")
        return tuple(stmts)

    def stmt(self, bound: set, qubits: set):
        if self.at("if"):
            return self.if_stmt(bound, qubits)
        if self.at("return"):
            self.i += 1
            terms = self.composition(bound, qubits)
            self.expect(";")
            return Return(terms)
        name = self.ident("statement")
        if name.text in KEYWORDS or name.text in CONSTANTS or name.text in FUNCTIONS:
            raise RuleSyntaxError(f"cannot assign to {name.text!r}", name.span)
        self.expect("=")
        value = self.expr(bound)
        self.expect(";")
        bound.add(name.text)
        return Assign(name.text, value)

    def if_stmt(self, bound: set, qubits: set) -> If:
        self.expect("if")
        cond = self.expr(bound)
        then_bound = set(bound)
        then = self.block(then_bound, qubits)
        orelse = None
        else_bound = set(bound)
        if self.at("else"):
            self.i += 1
            if self.at("if"):
                orelse = (self.if_stmt(else_bound, qubits),)
            else:
                orelse = self.block(else_bound, qubits)
        bound |= then_bound & else_bound
        return If(cond, then, orelse)

    def composition(self, bound: set, qubits: set) -> tuple:
        if self.at("id"):
            self.i += 1
            return ()
        terms = [self.call_term(bound, qubits)]
        while self.at("."):
            self.i += 1
            terms.append(self.call_term(bound, qubits))
        return tuple(terms)

    def call_term(self, bound: set, qubits: set) -> CallTerm:
        name = self.ident("gate name")
        args: list = []
        if self.at("("):
            self.i += 1
            if not self.at(")"):
                args.append(self.expr(bound))
                while self.at(","):
                    self.i += 1
                    args.append(self.expr(bound))
            self.expect(")")
        qv = self.qubit_list()
        if qv is not None:
            for q in qv:
                if q not in qubits:
                    raise RuleSyntaxError(f"unbound qubit variable {q!r}", name.span)
        self.check_gate(name.text, len(args), qv, name.span)
        return CallTerm(name.text, tuple(args), qv, name.span)

    # expressions, lowest precedence first

    def expr(self, bound: set):
        return self.or_expr(bound)

    def or_expr(self, bound):
        left = self.and_expr(bound)
        while self.at("||"):
            self.i += 1
            left = Binary("||", left, self.and_expr(bound))
        return left

    def and_expr(self, bound):
        left = self.cmp_expr(bound)
        while self.at("&&"):
            self.i += 1
            left = Binary("&&", left, self.cmp_expr(bound))
        return left

    def cmp_expr(self, bound):
        left = self.add_expr(bound)
        while self.tok.kind == "op" and self.tok.text in ("==", "!=", "<", ">", "<=", ">="):
            op = self.tok.text
            self.i += 1
            left = Binary(op, left, self.add_expr(bound))
        return left

    def add_expr(self, bound):
        left = self.mul_expr(bound)
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.tok.text
            self.i += 1
            left = Binary(op, left, self.mul_expr(bound))
        return left

    def mul_expr(self, bound):
        left = self.unary(bound)
        while self.tok.kind == "op" and self.tok.text in ("*", "/"):
            op = self.tok.text
            self.i += 1
            left = Binary(op, left, self.unary(bound))
        return left

    def unary(self, bound):
        if self.at("-"):
            self.i += 1
            return Unary("-", self.unary(bound))
        return self.atom(bound)

    def atom(self, bound):
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return Num(float(t.text))
        if self.at("("):
            self.i += 1
            e = self.expr(bound)
            self.expect(")")
            return e
        if t.kind == "ident" and t.text not in KEYWORDS:
            self.i += 1
            if self.at("("):
                if t.text not in FUNCTIONS:
                    raise RuleSyntaxError(f"unknown function {t.text!r}", t.span)
                self.i += 1
                args = [self.expr(bound)]
                while self.at(","):
                    self.i += 1
                    args.append(self.expr(bound))
                self.expect(")")
                if len(args) != FUNCTIONS[t.text]:
                    raise RuleSyntaxError(f"{t.text} takes {FUNCTIONS[t.text]} arguments", t.span)
                return Call(t.text, tuple(args), t.span)
            if t.text not in CONSTANTS and t.text not in bound:
                raise RuleSyntaxError(f"unbound variable {t.text!r}", t.span)
            return Var(t.text, t.span)
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise RuleSyntaxError(f"expected expression, found {found}", t.span)


def parse_rules(text: str, natives: Optional[dict] = None, filename: str = "<matcher>") -> RuleScript:
    """Parse a matcher script.

    ``natives`` maps gate name to ``(param count, qubit count)``; when given,
    every gate in patterns and returns is checked against it.
    """
    return _Parser(tokenize(text, filename), natives).script()
