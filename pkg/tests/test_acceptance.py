"""End-to-end checks, one test per acceptance criterion.

The terminal summary prints a PASS/FAIL line for each criterion (see conftest).
"""

import dataclasses
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

from oracles import enumerate_program, oracle_matrix
from probcirc import axioms, gates, normalform
from probcirc.circuit import COND, ID, NOT, count_generators, flip, has_conditioning, identity, is_causal, replace_at
from probcirc.dice import parse_program, translate
from probcirc.random import random_circuit, random_joint, random_rat
from probcirc.rewrite import check_derivation, load_derivation, shipped_derivations
from probcirc.semantics import canonical_class, evaluate, prop_equal

PROGRAMS = Path(__file__).parent.parent / "programs"


def program(name: str):
    return parse_program((PROGRAMS / f"{name}.dice").read_text())


def posterior_true(prog) -> Fraction:
    """P(result = 1) of a closed one-bit program."""
    cls = canonical_class(evaluate(translate(prog)))
    assert not cls.is_bottom
    col = [cls.matrix[y, 0] for y in (0, 1)]
    return col[1] / sum(col)


def oracle_posterior(prog) -> Fraction:
    worlds = enumerate_program(prog)
    return worlds.get((1,), Fraction(0)) / sum(worlds.values())


def test_criterion_1_axiom_soundness():
    start = time.perf_counter()
    reports = axioms.check_catalog(trials=100, seed=0, tags=axioms.PRIMITIVE_TAGS)
    elapsed = time.perf_counter() - start
    assert len(reports) == 39
    failed = [r.to_json() for r in reports if not r.ok]
    assert not failed
    assert all(r.trials == 100 for r in reports)
    for r in reports:
        expected = "prop" if axioms.rule(r.axiom).group == "F" else "eval"
        assert r.mode == expected, r.axiom
    assert elapsed < 30


def test_criterion_2_urn():
    prog = program("urn")
    assert oracle_posterior(prog) == Fraction(2, 3)
    assert posterior_true(prog) == Fraction(2, 3)


VON_NEUMANN = (PROGRAMS / "vonneumann.dice").read_text()


def von_neumann(p: str):
    return parse_program(VON_NEUMANN.replace("flip 1/3", f"flip {p}"))


@pytest.mark.parametrize("p", ["1/10", "1/3", "1/2", "9/10"])
def test_criterion_3_von_neumann_fair(p):
    prog = von_neumann(p)
    assert oracle_posterior(prog) == Fraction(1, 2)
    assert normalform.equiv(translate(prog), flip(Fraction(1, 2)))


@pytest.mark.parametrize("p", ["0", "1"])
def test_criterion_3_von_neumann_degenerate(p):
    prog = von_neumann(p)
    assert enumerate_program(prog) == {}
    assert canonical_class(evaluate(translate(prog))).is_bottom


def test_criterion_4_open_identity():
    c = translate(program("identity_open"))
    assert c.type == ID.type
    assert prop_equal(evaluate(c), evaluate(ID))


def test_criterion_5_contexts_distinguish():
    assert oracle_posterior(program("context_f")) == Fraction(2, 11)
    assert posterior_true(program("context_f")) == Fraction(2, 11)
    assert posterior_true(program("context_g")) == Fraction(1, 10)
    f, g = translate(program("fun_f")), translate(program("fun_g"))
    assert not normalform.equiv(f, g)


def small_causal(rng, m, n, max_gens=15):
    while True:
        c = random_circuit(rng, m, n, size=rng.randint(1, 12), kind="causal", max_width=4)
        if count_generators(c) <= max_gens:
            return c


def engineered_pair(rng):
    """Two circuits that differ by one axiom instance placed in a context."""
    tags = [t for t in axioms.PRIMITIVE_TAGS if axioms.rule(t).exact]
    while True:
        _, lhs, rhs = axioms.sample_instance(rng.choice(tags), rng)
        a, b = lhs.type.inputs, lhs.type.outputs
        if not (is_causal(lhs) and is_causal(rhs)) or a > 4 or b > 4:
            continue
        extra = rng.randint(0, 4 - max(a, b))
        m = rng.randint(0, 3)
        before = small_causal(rng, m, a + extra, 6)
        after = small_causal(rng, b + extra, rng.randint(1, 3), 6)
        left = before >> (lhs @ identity(extra)) >> after
        right = before >> (rhs @ identity(extra)) >> after
        return left, right


def flip_paths(c, path=()):
    if getattr(c, "kind", None) == "flip":
        yield path
    for i, kid in enumerate(c.children()):
        yield from flip_paths(kid, path + (i,))


def perturbed_pair(rng):
    """A circuit and a one-gate variant the oracle tells apart from it."""
    while True:
        n = rng.randint(1, 3)
        c = small_causal(rng, rng.randint(0, 3), n, 14)
        paths = list(flip_paths(c))
        if paths and rng.random() < 0.5:
            d = replace_at(c, rng.choice(paths), flip(random_rat(rng)))
        else:
            wire = rng.randrange(n)
            d = c >> (identity(wire) @ NOT @ identity(n - wire - 1))
        if oracle_matrix(c) != oracle_matrix(d):
            return c, d


def test_criterion_6_normal_forms():
    rng = random.Random(6)
    start = time.perf_counter()
    for _ in range(500):
        m, n = rng.randint(0, 4), rng.randint(0, 4)
        c = small_causal(rng, m, n)
        nf = normalform.normal_form(c)
        assert evaluate(nf) == evaluate(c)
    for _ in range(200):
        left, right = engineered_pair(rng)
        assert normalform.normal_form(left) == normalform.normal_form(right)
    for _ in range(200):
        c, d = perturbed_pair(rng)
        assert normalform.normal_form(c) != normalform.normal_form(d)
    assert time.perf_counter() - start < 120


def test_criterion_7_oracle_agreement():
    rng = random.Random(7)
    for i in range(1000):
        kind = ("boolean", "causal", "full")[i % 3]
        c = random_circuit(rng, rng.randint(0, 3), rng.randint(0, 3), size=rng.randint(1, 10), kind=kind)
        assert evaluate(c) == oracle_matrix(c)


def test_criterion_8_disintegration_and_bayes():
    rng = random.Random(8)
    for _ in range(200):
        joint = random_joint(rng, rng.randint(1, 4))
        marginal, conditional = normalform.disintegrate(joint)
        assert normalform.recompose(marginal, conditional) == joint
    for _ in range(20):
        prior = flip(random_rat(rng, open_interval=True))
        assert normalform.bayes_inverse(NOT, prior) == evaluate(NOT)
    for _ in range(100):
        m, n = rng.randint(1, 2), rng.randint(1, 2)
        prior = small_causal(rng, 0, m, 6)
        f = small_causal(rng, m, n, 8)
        assert evaluate(normalform.joint_circuit(f, prior)) == normalform.reverse_joint(f, prior)


def test_criterion_9_conditioning_elimination():
    rng = random.Random(9)
    failures = 0
    for _ in range(200):
        n = rng.randint(1, 3)
        c = random_circuit(rng, 0, n, size=rng.randint(2, 10), kind="full")
        if not has_conditioning(c):
            c = (c @ flip(random_rat(rng)) @ flip(random_rat(rng))) >> (identity(n) @ COND) >> (identity(n) @ gates.discard(1))
        out = normalform.eliminate_conditioning(c)
        if canonical_class(oracle_matrix(c)).is_bottom:
            failures += 1
            assert out == gates.failure_circuit(0, n)
        else:
            assert not has_conditioning(out)
            assert prop_equal(evaluate(out), oracle_matrix(c))
    assert failures > 0
    for _ in range(50):
        p, q = random_rat(rng, open_interval=True), random_rat(rng, open_interval=True)
        inst = axioms.instantiate("Mult", {"p": p, "q": q})
        r = p * q / (p * q + (1 - p) * (1 - q))
        assert inst.params["r"] == r
        assert prop_equal(oracle_matrix(inst.lhs), oracle_matrix(flip(r)))


def mutate(derivation, index, **changes):
    steps = list(derivation.steps)
    steps[index] = dataclasses.replace(steps[index], **changes)
    return dataclasses.replace(derivation, steps=tuple(steps))


@pytest.mark.parametrize("name", ["vonneumann", "derived_e5"])
def test_criterion_10_derivations(name):
    d = load_derivation(shipped_derivations()[name])
    assert check_derivation(d).ok
    for i, step in enumerate(d.steps):
        bad = check_derivation(mutate(d, i, path=step.path + (0,)))
        assert not bad.ok and bad.failed_step == i
        rationals = {k: v for k, v in step.params.items() if isinstance(v, list)}
        if rationals:
            key = sorted(rationals)[0]
            n, den = rationals[key]
            wrong = [n, den + 1] if n < den else [den - 1, den + 2]
            bad = check_derivation(mutate(d, i, params={**step.params, key: wrong}))
            assert not bad.ok and bad.failed_step == i
