"""Lexer and recursive-descent parser for the surface language.

::

    prog     := fundef* input* expr
    fundef   := "fun" name "(" name ":" type ")" [":" type] "{" expr "}"
    input    := "input" name ":" type          # free variables of main
    type     := "B" | type "*" type | "(" type ")"
    expr     := "let" name "=" expr "in" expr
              | "if" expr "then" expr "else" expr
              | expr ("or" | "xor" | "and") expr | "not" expr
              | "observe" expr | "fst" expr | "snd" expr | "flip" rat
              | "(" expr "," expr ")" | "(" expr ")" | name "(" expr ")"
              | "true" | "false" | name

Binary operators bind ``or`` < ``xor`` < ``and``; all are left associative.
``observe e`` with ``e`` not a variable becomes ``let fresh = e in observe fresh``.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction

from probcirc.dice import ast
from probcirc.errors import ParseError

KEYWORDS = {
    "let", "in", "if", "then", "else", "flip", "observe", "true", "false",
    "fst", "snd", "fun", "input", "and", "or", "xor", "not",
}

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+|\#[^\n]*|//[^\n]*)"
    r"|(?P<num>\d+(?:\.\d*)?|\.\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_']*)"
    r"|(?P<sym>[(){},:*=/])"
)

_fresh_counter = itertools.count()


def fresh_name(hint: str = "t") -> str:
    """A variable name no source program can spell."""
    return f"%{hint}{next(_fresh_counter)}"


class _Parser:
    def __init__(self, text: str):
        self.toks: list[tuple[str, str, int, int]] = []
        pos, line, line_start = 0, 1, 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
            kind = m.lastgroup
            if kind == "name" and m.group() in KEYWORDS:
                kind = "kw"
            if kind != "ws":
                self.toks.append((kind, m.group(), line, pos - line_start + 1))
            for i, ch in enumerate(m.group()):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
            pos = m.end()
        self.toks.append(("eof", "", line, pos - line_start + 1))
        self.i = 0

    def peek(self, offset: int = 0):
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def advance(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, message: str, tok=None):
        kind, text, line, col = tok or self.peek()
        found = text or "end of input"
        return ParseError(f"{message}, found {found!r}", line, col)

    def at(self, text: str) -> bool:
        kind, value, _, _ = self.peek()
        return value == text and kind in ("kw", "sym")

    def expect(self, text: str):
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def name(self) -> str:
        kind, text, _, _ = self.peek()
        if kind != "name":
            raise self.error("expected a name")
        self.advance()
        return text

    # types
    def type_(self) -> ast.DiceType:
        left = self.type_atom()
        if self.at("*"):
            self.advance()
            return ast.ProdT(left, self.type_())
        return left

    def type_atom(self) -> ast.DiceType:
        if self.at("("):
            self.advance()
            t = self.type_()
            self.expect(")")
            return t
        kind, text, _, _ = self.peek()
        if kind == "name" and text in ("B", "bool", "Bool"):
            self.advance()
            return ast.BOOL
        raise self.error("expected a type")

    # program
    def program(self) -> ast.Program:
        functions = []
        while self.at("fun"):
            functions.append(self.fundef())
        inputs = []
        while self.at("input"):
            self.advance()
            name = self.name()
            self.expect(":")
            inputs.append((name, self.type_()))
        main = self.expr()
        if self.peek()[0] != "eof":
            raise self.error("expected end of program")
        return ast.Program(tuple(functions), main, tuple(inputs))

    def fundef(self) -> ast.FunDef:
        self.expect("fun")
        name = self.name()
        self.expect("(")
        param = self.name()
        self.expect(":")
        ptype = self.type_()
        self.expect(")")
        rtype = None
        if self.at(":"):
            self.advance()
            rtype = self.type_()
        self.expect("{")
        body = self.expr()
        self.expect("}")
        return ast.FunDef(name, param, ptype, body, rtype)

    # expressions
    def expr(self) -> ast.Expr:
        if self.at("let"):
            self.advance()
            name = self.name()
            self.expect("=")
            bound = self.expr()
            self.expect("in")
            return ast.Let(name, bound, self.expr())
        if self.at("if"):
            self.advance()
            guard = self.expr()
            self.expect("then")
            then = self.expr()
            self.expect("else")
            return ast.If(guard, then, self.expr())
        return self.binary(0)

    _LEVELS = ("or", "xor", "and")

    def binary(self, level: int) -> ast.Expr:
        if level == len(self._LEVELS):
            return self.unary()
        op = self._LEVELS[level]
        left = self.binary(level + 1)
        while self.at(op):
            self.advance()
            left = ast.BinOp(op, left, self.binary(level + 1))
        return left

    def unary(self) -> ast.Expr:
        if self.at("not"):
            self.advance()
            return ast.Not(self.unary())
        if self.at("fst"):
            self.advance()
            return ast.Fst(self.unary())
        if self.at("snd"):
            self.advance()
            return ast.Snd(self.unary())
        if self.at("observe"):
            self.advance()
            arg = self.unary()
            if isinstance(arg, ast.Var):
                return ast.Observe(arg.name)
            tmp = fresh_name("obs")
            return ast.Let(tmp, arg, ast.Observe(tmp))
        if self.at("flip"):
            self.advance()
            return ast.Flip(self.rational())
        return self.atom()

    def rational(self) -> Fraction:
        parens = self.at("(")
        if parens:
            self.advance()
        tok = self.peek()
        if tok[0] != "num":
            raise self.error("expected a probability")
        self.advance()
        value = Fraction(tok[1])
        if self.at("/"):
            self.advance()
            den = self.peek()
            if den[0] != "num" or not den[1].isdigit() or not tok[1].isdigit():
                raise self.error("expected an integer fraction")
            self.advance()
            if int(den[1]) == 0:
                raise self.error("zero denominator", den)
            value = Fraction(int(tok[1]), int(den[1]))
        if value > 1:
            raise ParseError(f"flip probability {value} exceeds 1", tok[2], tok[3])
        if parens:
            self.expect(")")
        return value

    def atom(self) -> ast.Expr:
        if self.at("let") or self.at("if"):
            return self.expr()
        if self.at("true") or self.at("false"):
            return ast.Const(self.advance()[1] == "true")
        if self.at("("):
            self.advance()
            first = self.expr()
            if self.at(","):
                self.advance()
                second = self.expr()
                self.expect(")")
                return ast.Pair(first, second)
            self.expect(")")
            return first
        kind, text, _, _ = self.peek()
        if kind == "name":
            self.advance()
            if self.at("("):
                self.advance()
                arg = self.expr()
                self.expect(")")
                return ast.Call(text, arg)
            return ast.Var(text)
        raise self.error("expected an expression")


def parse_program(text: str, sugar: bool = False) -> ast.Program:
    """Parse program text.  Boolean operators are desugared unless ``sugar`` is set."""
    program = _Parser(text).program()
    return program if sugar else desugar(program)


def desugar_expr(e: ast.Expr) -> ast.Expr:
    """Replace ``not``/``and``/``or``/``xor`` by conditionals and constants."""
    T, F = ast.Const(True), ast.Const(False)
    if isinstance(e, ast.Not):
        return ast.If(desugar_expr(e.arg), F, T)
    if isinstance(e, ast.BinOp):
        a, b = desugar_expr(e.left), desugar_expr(e.right)
        if e.op == "and":
            return ast.If(a, b, F)
        if e.op == "or":
            return ast.If(a, T, b)
        # xor: bind b once so it is not duplicated into both branches
        tmp = fresh_name("xor")
        v = ast.Var(tmp)
        return ast.Let(tmp, b, ast.If(a, ast.If(v, F, T), v))
    if isinstance(e, (ast.Var, ast.Const, ast.Flip, ast.Observe)):
        return e
    if isinstance(e, ast.Pair):
        return ast.Pair(desugar_expr(e.first), desugar_expr(e.second))
    if isinstance(e, ast.Fst):
        return ast.Fst(desugar_expr(e.arg))
    if isinstance(e, ast.Snd):
        return ast.Snd(desugar_expr(e.arg))
    if isinstance(e, ast.If):
        return ast.If(desugar_expr(e.guard), desugar_expr(e.then), desugar_expr(e.orelse))
    if isinstance(e, ast.Let):
        return ast.Let(e.name, desugar_expr(e.bound), desugar_expr(e.body))
    if isinstance(e, ast.Call):
        return ast.Call(e.name, desugar_expr(e.arg))
    raise TypeError(f"not an expression: {e!r}")


def desugar(program: ast.Program) -> ast.Program:
    functions = tuple(
        ast.FunDef(f.name, f.param, f.param_type, desugar_expr(f.body), f.return_type)
        for f in program.functions
    )
    return ast.Program(functions, desugar_expr(program.main), program.inputs)
