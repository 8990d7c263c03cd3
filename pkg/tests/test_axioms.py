import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_matrix
from probcirc import axioms, gates
from probcirc.circuit import AND, COND, COPY, ID, NOT, flip, is_causal
from probcirc.errors import MissingParam, SideConditionViolated
from probcirc.semantics import canonical_class, evaluate, prop_equal
from strategies import open_rationals, rationals

HALF = Fraction(1, 2)


def test_catalog_counts():
    assert len(axioms.PRIMITIVE_TAGS) == 39
    assert len(axioms.SMC_TAGS) == 7
    groups = {}
    for tag in axioms.PRIMITIVE_TAGS:
        groups.setdefault(axioms.rule(tag).group, []).append(tag)
    assert {g: len(v) for g, v in groups.items()} == {"SMC": 7, "A": 4, "B": 8, "C": 4, "D": 3, "E": 4, "F": 9}
    assert set(axioms.DERIVED_TAGS) == {"DerivedE5", "Mult", "Delete", "CopyBool", "Fail", "Bool"}


def test_unknown_tag():
    with pytest.raises(KeyError):
        axioms.rule("Z9")


@pytest.mark.parametrize("tag", list(axioms.CATALOG))
def test_soundness(tag):
    report = axioms.check_soundness(tag, trials=25, seed=1)
    assert report.ok, report.to_json()


@pytest.mark.parametrize("tag", [t for t in axioms.CATALOG if not axioms.rule(t).schematic])
def test_sides_match_oracle(tag):
    _, lhs, rhs = axioms.sample_instance(tag, random.Random(tag))
    a, b = oracle_matrix(lhs), oracle_matrix(rhs)
    if axioms.rule(tag).exact:
        assert a == b
    else:
        assert prop_equal(a, b)


def test_causal_rules_have_causal_sides():
    for tag in axioms.PRIMITIVE_TAGS:
        r = axioms.rule(tag)
        if r.group in "ABCDE" and not r.schematic:
            _, lhs, rhs = axioms.sample_instance(tag, random.Random(0))
            assert is_causal(lhs) and is_causal(rhs), tag


def test_frobenius_rule_is_only_proportional():
    # the unit laws of the compare structure hold up to the scalar 1/2
    report = axioms.check_soundness("F2l", trials=20, exact=True)
    assert report.passed == 0 and report.mode == "eval"
    assert axioms.check_soundness("F2l", trials=20).ok


def test_soundness_report_is_reproducible():
    a = axioms.check_soundness("E2", trials=10, seed=3).to_json()
    b = axioms.check_soundness("E2", trials=10, seed=3).to_json()
    assert a == b == {"axiom": "E2", "trials": 10, "passed": 10, "mode": "eval", "ok": True}


@settings(max_examples=100, deadline=None)
@given(rationals)
def test_e1(p):
    inst = axioms.instantiate("E1", {"p": p})
    assert evaluate(inst.rhs) == evaluate(flip(1 - p))


@settings(max_examples=100, deadline=None)
@given(rationals, rationals, rationals)
def test_e2_completion(r, p, q):
    params = axioms.complete_params("E2", {"r": r, "p": p, "q": q})
    rt = r * p + (1 - r) * q
    assert params["rt"] == rt
    if rt != 0:
        assert params["pt"] == r * p / rt
    if rt != 1:
        assert params["qt"] == r * (1 - p) / (1 - rt)
    inst = axioms.instantiate("E2", params)
    assert evaluate(inst.lhs) == evaluate(inst.rhs)


@pytest.mark.parametrize("pt, qt", [(0, 0), (Fraction(1, 3), Fraction(4, 5)), (1, 1)])
def test_e2_degenerate_tilde_values_are_free(pt, qt):
    # r~ = 0 frees p~
    axioms.instantiate("E2", {"r": HALF, "p": 0, "q": 0, "pt": pt})
    # r~ = 1 frees q~
    axioms.instantiate("E2", {"r": HALF, "p": 1, "q": 1, "qt": qt})


def test_e2_rejects_wrong_tilde():
    with pytest.raises(SideConditionViolated):
        axioms.complete_params("E2", {"r": HALF, "p": HALF, "q": HALF, "rt": Fraction(1, 3)})
    with pytest.raises(SideConditionViolated):
        axioms.complete_params("E2", {"r": HALF, "p": HALF, "q": HALF, "pt": Fraction(1, 3)})


def test_parameter_aliases():
    a = axioms.complete_params("E2", {"r": HALF, "p": HALF, "q": 0, "r̃": Fraction(1, 4)})
    b = axioms.complete_params("E2", {"r": "1/2", "p": "0.5", "q": 0, "r~": [1, 4]})
    assert a == b


@settings(max_examples=100, deadline=None)
@given(rationals, rationals)
def test_e3(p, q):
    if p * q == 1:
        with pytest.raises(SideConditionViolated):
            axioms.complete_params("E3", {"p": p, "q": q})
        return
    params = axioms.complete_params("E3", {"p": p, "q": q})
    assert params["pt"] == p * q
    assert params["qt"] == p * (1 - q) / (1 - p * q)


@settings(max_examples=100, deadline=None)
@given(rationals, rationals, rationals)
def test_f7(p0, p1, p2):
    norm = p0 * p1 + (1 - p0) * (1 - p2)
    if norm == 0:
        with pytest.raises(SideConditionViolated):
            axioms.instantiate("F7", {"p0": p0, "p1": p1, "p2": p2})
        return
    inst = axioms.instantiate("F7", {"p0": p0, "p1": p1, "p2": p2})
    assert inst.params["r"] == p0 * p1 / norm
    assert canonical_class(oracle_matrix(inst.lhs)).matrix == evaluate(flip(inst.params["r"]))


@settings(max_examples=100, deadline=None)
@given(open_rationals, open_rationals)
def test_mult(p, q):
    inst = axioms.instantiate("Mult", {"p": p, "q": q})
    assert inst.params["r"] == p * q / (p * q + (1 - p) * (1 - q))
    assert prop_equal(oracle_matrix(inst.lhs), oracle_matrix(inst.rhs))


@pytest.mark.parametrize(
    "tag, params, error",
    [
        ("E1", {}, MissingParam),
        ("E1", {"p": Fraction(3, 2)}, SideConditionViolated),
        ("E3", {"p": 1, "q": 1}, SideConditionViolated),
        ("Mult", {"p": 1, "q": 0}, SideConditionViolated),
        ("Mult", {"p": HALF, "q": HALF, "r": Fraction(1, 3)}, SideConditionViolated),
        ("F7", {"p0": HALF, "p1": HALF, "p2": HALF, "r": Fraction(1, 3)}, SideConditionViolated),
        ("Delete", {}, MissingParam),
    ],
)
def test_parameter_errors(tag, params, error):
    with pytest.raises(error):
        axioms.instantiate(tag, params)


@pytest.mark.parametrize(
    "tag, params",
    [
        ("Delete", {"c": COND}),
        ("CopyBool", {"c": flip(HALF)}),
        ("Fail", {"c": flip(HALF)}),
        ("Bool", {"c": NOT, "d": ID}),
    ],
)
def test_schematic_side_conditions(tag, params):
    with pytest.raises(SideConditionViolated):
        axioms.instantiate(tag, params)


def test_schematic_instances():
    inst = axioms.instantiate("Delete", {"c": (flip(HALF) @ ID) >> AND})
    assert inst.rhs == gates.discard(1)
    inst = axioms.instantiate("Bool", {"c": COPY >> AND, "d": ID})
    assert evaluate(inst.lhs) == evaluate(inst.rhs)
    inst = axioms.instantiate("Fail", {"c": (gates.FALSE @ gates.TRUE) >> COND})
    assert inst.rhs == gates.failure_circuit(0, 1)
    inst = axioms.instantiate("CopyBool", {"c": NOT})
    assert evaluate(inst.lhs) == evaluate(inst.rhs)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32), st.sampled_from(axioms.SMC_TAGS))
def test_smc_rules_are_exact(seed, tag):
    _, lhs, rhs = axioms.sample_instance(tag, random.Random(seed))
    assert evaluate(lhs) == evaluate(rhs)
