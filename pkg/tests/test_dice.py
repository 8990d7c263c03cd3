import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import enumerate_program
from probcirc.circuit import CircType
from probcirc.dice import parse_program, translate
from probcirc.dice.translate import infer, infer_json, inline_calls
from probcirc.errors import ArityError, ParseError, TypeMismatch, UnboundVariable
from probcirc.semantics import SubStochMatrix, canonical_class, evaluate, prop_equal

PROGRAMS = Path(__file__).parent.parent / "programs"


def oracle_class(prog):
    """Normalized semantics from world enumeration, one input assignment at a time."""
    names = [name for name, _ in prog.inputs]
    m = len(names)
    columns = []
    for x in range(1 << m):
        env = {name: (x >> (m - 1 - i)) & 1 for i, name in enumerate(names)}
        worlds = enumerate_program(prog, env)
        col = {}
        for bits, w in worlds.items():
            y = 0
            for b in bits:
                y = (y << 1) | b
            col[y] = w
        columns.append(col)
    return columns


def check_against_oracle(prog):
    c = translate(prog)
    M = evaluate(c)
    columns = oracle_class(prog)
    O = SubStochMatrix.from_columns(c.inputs, c.outputs, columns)
    assert prop_equal(M, O)


@pytest.mark.parametrize("path", sorted(PROGRAMS.glob("*.dice")), ids=lambda p: p.stem)
def test_corpus_matches_enumeration(path):
    check_against_oracle(parse_program(path.read_text()))


@pytest.mark.parametrize(
    "text, t",
    [
        ("true", CircType(0, 1)),
        ("(flip 1/2, false)", CircType(0, 2)),
        ("input x : B\ninput y : B * B\n(x, fst y)", CircType(3, 2)),
        ("fun f(p : B * B) : B { fst p and snd p }\nf((flip 0.3, true))", CircType(0, 1)),
    ],
)
def test_translation_types(text, t):
    assert translate(parse_program(text)).type == t


def test_decimal_literals_are_exact():
    prog = parse_program("flip 0.1")
    assert infer_json(prog) == {"class": "canonical", "dist": {"0": [9, 10], "1": [1, 10]}}


def test_bottom_json():
    prog = parse_program("let x = false in let _ = observe x in x")
    assert infer(prog).is_bottom
    assert infer_json(prog) == {"class": "bottom"}


def test_observe_compound_argument():
    prog = parse_program("let x = flip 1/2 in let y = flip 1/2 in let _ = observe (x or y) in x")
    cls = infer(prog)
    assert cls.matrix[1, 0] == Fraction(2, 3)


@pytest.mark.parametrize(
    "text, error",
    [
        ("let x = in x", ParseError),
        ("flip 3/2", ParseError),
        ("y", UnboundVariable),
        ("fst true", TypeMismatch),
        ("if (true, true) then true else false", TypeMismatch),
        ("if true then true else (true, false)", TypeMismatch),
        ("let p = (true, true) in let _ = observe p in true", TypeMismatch),
        ("fun f(x : B) : B { x }\nf((true, true))", ArityError),
        ("g(true)", UnboundVariable),
        ("fun f(x : B) : B * B { x }\nf(true)", TypeMismatch),
    ],
)
def test_rejects(text, error):
    with pytest.raises(error):
        translate(parse_program(text))


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_program("let x = flip 1/2 in\nlet y = ) in y")
    assert info.value.line == 2


def test_independent_lets_commute():
    a = parse_program("let x = flip 1/3 in let y = flip 1/5 in (x and y, x)")
    b = parse_program("let y = flip 1/5 in let x = flip 1/3 in (x and y, x)")
    assert evaluate(translate(a)) == evaluate(translate(b))


def test_inlining_preserves_inference():
    prog = parse_program((PROGRAMS / "context_f.dice").read_text())
    inlined = inline_calls(prog)
    assert not inlined.functions
    assert infer(inlined) == infer(prog)


def test_shadowing_uses_innermost_binding():
    prog = parse_program("let x = true in let x = false in x")
    assert infer(prog).matrix[0, 0] == 1


# --- random programs ---------------------------------------------------------

RATS = ["0", "1", "1/2", "1/3", "2/7", "0.25", "9/10"]


def random_expr(rng, scope, depth):
    """Boolean expression text over the variables in ``scope``."""
    if depth <= 0 or rng.random() < 0.2:
        choice = rng.randrange(3)
        if choice == 0 and scope:
            return rng.choice(scope)
        if choice == 1:
            return rng.choice(["true", "false"])
        return f"flip {rng.choice(RATS)}"
    kind = rng.randrange(7)
    sub = lambda: random_expr(rng, scope, depth - 1)  # noqa: E731
    if kind == 0:
        name = f"v{len(scope)}"
        return f"(let {name} = {sub()} in {random_expr(rng, scope + [name], depth - 1)})"
    if kind == 1:
        return f"(if {sub()} then {sub()} else {sub()})"
    if kind == 2:
        return f"({sub()} {rng.choice(['and', 'or', 'xor'])} {sub()})"
    if kind == 3:
        return f"(not {sub()})"
    if kind == 4 and scope:
        return f"(let _ = observe {rng.choice(scope)} in {sub()})"
    if kind == 5:
        return f"(fst ({sub()}, {sub()}))"
    return f"(snd ({sub()}, {sub()}))"


def random_program(seed):
    rng = random.Random(seed)
    inputs = [f"i{k}" for k in range(rng.randint(0, 2))]
    header = "".join(f"input {name} : B\n" for name in inputs)
    fun = "fun g(z : B) : B { z xor flip 1/3 }\n" if rng.random() < 0.5 else ""
    scope = list(inputs)
    body = random_expr(rng, scope, 4)
    if fun:
        body = f"(let w = g({body}) in (w, {random_expr(rng, scope + ['w'], 2)}))"
    return fun + header + body


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**9))
def test_random_programs_match_enumeration(seed):
    check_against_oracle(parse_program(random_program(seed)))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 10**9))
def test_translation_is_deterministic(seed):
    text = random_program(seed)
    assert translate(parse_program(text)) == translate(parse_program(text))


def test_bottom_agrees_with_enumeration():
    prog = parse_program("let x = flip 1/2 in let y = not x in let z = x and y in let _ = observe z in x")
    assert enumerate_program(prog) == {}
    assert canonical_class(evaluate(translate(prog))).is_bottom
