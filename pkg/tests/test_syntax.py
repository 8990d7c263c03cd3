from fractions import Fraction

import pytest
from hypothesis import given, settings

from probcirc import gates
from probcirc.circuit import COPY, ID, NOT, flatten, flip
from probcirc.errors import ParseError, TypeMismatch
from probcirc.semantics import evaluate
from probcirc.syntax import format_rational, looks_like_circuit, parse_circuit, serialize
from strategies import circuits


@settings(max_examples=200, deadline=None)
@given(circuits())
def test_round_trip(c):
    text = serialize(c)
    assert parse_circuit(text) == flatten(c)
    assert serialize(parse_circuit(text)) == text


@pytest.mark.parametrize(
    "text, expected",
    [
        ("flip(0.1)", flip(Fraction(1, 10))),
        ("flip(.25)", flip(Fraction(1, 4))),
        ("flip(1)", flip(1)),
        ("flip(2/4)", flip(Fraction(1, 2))),
        ("seq(copy, par(id, not))", COPY >> (ID @ NOT)),
        ("  seq( copy ,\n par(id,not) ) # trailing comment", COPY >> (ID @ NOT)),
        ("mux", gates.MUX),
        ("all(2)", gates.all_inputs(2)),
        ("fail(1, 2)", gates.failure_circuit(1, 2)),
    ],
)
def test_parse(text, expected):
    assert parse_circuit(text) == expected


@pytest.mark.parametrize(
    "text",
    ["seq(copy)", "flip(3/2)", "bogus", "par(id, id) extra", "flip(1/0)", "seq(copy, par(id, not)", ""],
)
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_circuit(text)


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as info:
        parse_circuit("seq(copy,\n  par(id, nope))")
    assert (info.value.line, info.value.column) == (2, 11)


def test_ill_typed_text():
    with pytest.raises(TypeMismatch):
        parse_circuit("seq(copy, not)")


def test_derived_names_keep_semantics():
    assert evaluate(parse_circuit("seq(par(id, par(id, id)), mux)")) == evaluate(gates.MUX)
    assert serialize(gates.OR).startswith("seq(")


@pytest.mark.parametrize("p, text", [(Fraction(1, 3), "1/3"), (Fraction(2), "2"), (Fraction(0), "0")])
def test_format_rational(p, text):
    assert format_rational(p) == text


@pytest.mark.parametrize(
    "text, is_circuit",
    [("seq(copy, not)", True), ("copy", True), ("let x = flip 1/2 in x", False), ("flip 1/2", False)],
)
def test_sniffing(text, is_circuit):
    assert looks_like_circuit(text) == is_circuit
