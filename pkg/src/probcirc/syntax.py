"""Text form of circuits.

Grammar (whitespace-insensitive, ``#`` starts a comment)::

    circuit  := id | id0 | swap | copy | del | and | not | cond
              | flip(rational) | seq(circuit, circuit) | par(circuit, circuit)
              | mux | or | xor | all(nat) | fail(nat, nat)
    rational := int "/" int | decimal

``serialize`` writes only primitives, so ``parse_circuit(serialize(c)) == flatten(c)``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from probcirc import gates
from probcirc.circuit import (
    AND,
    COND,
    COPY,
    DEL,
    ID,
    ID0,
    NOT,
    SWAP,
    Circuit,
    Gen,
    Id,
    Id0,
    Par,
    Seq,
    Swap,
    flatten,
    flip,
    typecheck,
)
from probcirc.errors import ParseError, ProbCircError

_ATOMS = {
    "id": ID,
    "id0": ID0,
    "swap": SWAP,
    "copy": COPY,
    "del": DEL,
    "and": AND,
    "not": NOT,
    "cond": COND,
    "mux": gates.MUX,
    "or": gates.OR,
    "xor": gates.XOR,
}

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\n]+|\#[^\n]*)"
    r"|(?P<num>\d+(?:\.\d*)?|\.\d+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<sym>[(),/])"
)


def format_rational(p: Fraction) -> str:
    return str(p.numerator) if p.denominator == 1 else f"{p.numerator}/{p.denominator}"


def serialize(c: Circuit, flat: bool = True) -> str:
    """Circuit text for ``c``; flattened first unless ``flat`` is false."""
    if flat:
        c = flatten(c)
    out: list[str] = []
    # explicit stack of pending items: circuits or literal strings
    stack: list = [c]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
        elif isinstance(item, Gen):
            out.append(f"flip({format_rational(item.param)})" if item.kind == "flip" else item.kind)
        elif isinstance(item, Id):
            out.append("id")
        elif isinstance(item, Id0):
            out.append("id0")
        elif isinstance(item, Swap):
            out.append("swap")
        else:
            head = "seq" if isinstance(item, Seq) else "par"
            a, b = item.children()
            stack.extend([")", b, ", ", a, f"{head}("])
    return "".join(out)


class _Tokens:
    def __init__(self, text: str):
        self.items: list[tuple[str, str, int, int]] = []
        pos, line, line_start = 0, 1, 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if m is None:
                raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
            kind = m.lastgroup
            if kind != "ws":
                self.items.append((kind, m.group(), line, pos - line_start + 1))
            for i, ch in enumerate(m.group()):
                if ch == "\n":
                    line += 1
                    line_start = pos + i + 1
            pos = m.end()
        self.items.append(("eof", "", line, pos - line_start + 1))
        self.i = 0

    def peek(self):
        return self.items[self.i]

    def next(self):
        tok = self.items[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, text, line, col = self.next()
        if text != value:
            found = text or "end of input"
            raise ParseError(f"expected {value!r}, found {found!r}", line, col)


def _parse_nat(toks: _Tokens) -> int:
    kind, text, line, col = toks.next()
    if kind != "num" or not text.isdigit():
        raise ParseError(f"expected a natural number, found {text!r}", line, col)
    return int(text)


def parse_rational(toks: _Tokens) -> Fraction:
    kind, text, line, col = toks.next()
    if kind != "num":
        raise ParseError(f"expected a rational, found {text!r}", line, col)
    value = Fraction(text)
    if toks.peek()[1] == "/":
        toks.next()
        if not text.isdigit():
            raise ParseError("numerator of a fraction must be an integer", line, col)
        den = _parse_nat(toks)
        if den == 0:
            raise ParseError("zero denominator", line, col)
        value = Fraction(int(text), den)
    return value


def _parse(toks: _Tokens) -> Circuit:
    kind, text, line, col = toks.next()
    if kind != "name":
        raise ParseError(f"expected a circuit, found {text or 'end of input'!r}", line, col)
    if text in ("seq", "par"):
        toks.expect("(")
        a = _parse(toks)
        toks.expect(",")
        b = _parse(toks)
        toks.expect(")")
        return Seq(a, b) if text == "seq" else Par(a, b)
    if text == "flip":
        toks.expect("(")
        p = parse_rational(toks)
        toks.expect(")")
        if p > 1:
            raise ParseError(f"flip parameter {p} outside [0, 1]", line, col)
        return flip(p)
    if text == "all":
        toks.expect("(")
        n = _parse_nat(toks)
        toks.expect(")")
        return gates.all_inputs(n)
    if text == "fail":
        toks.expect("(")
        m = _parse_nat(toks)
        toks.expect(",")
        n = _parse_nat(toks)
        toks.expect(")")
        return gates.failure_circuit(m, n)
    if text in _ATOMS:
        return _ATOMS[text]
    raise ParseError(f"unknown circuit name {text!r}", line, col)


def parse_circuit(text: str) -> Circuit:
    """Parse and typecheck circuit text."""
    toks = _Tokens(text)
    c = _parse(toks)
    kind, rest, line, col = toks.peek()
    if kind != "eof":
        raise ParseError(f"trailing input {rest!r}", line, col)
    typecheck(c)
    return c


def looks_like_circuit(text: str) -> bool:
    """Cheap content sniffing used by the command line: does the text parse as a circuit?"""
    try:
        parse_circuit(text)
    except ParseError:
        return False
    except ProbCircError:
        return True  # parses as a circuit but is ill-typed
    return True
