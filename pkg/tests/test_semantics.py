import json
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import oracle_matrix
from probcirc import gates
from probcirc.circuit import AND, COND, COPY, DEL, ID, NOT, SWAP, flip, is_boolean
from probcirc.errors import CapExceeded, DimensionMismatch
from probcirc.semantics import (
    SubStochMatrix,
    canonical_class,
    distribution,
    evaluate,
    identity_matrix,
    is_deterministic,
    is_stochastic,
    is_substochastic,
    marginalize,
    prop_equal,
)
from strategies import circuits, typed_circuits

HALF = Fraction(1, 2)


@pytest.mark.parametrize(
    "c, rows",
    [
        (COPY, [[1, 0], [0, 0], [0, 0], [0, 1]]),
        (DEL, [[1, 1]]),
        (AND, [[1, 1, 1, 0], [0, 0, 0, 1]]),
        (NOT, [[0, 1], [1, 0]]),
        (flip(Fraction(1, 3)), [[Fraction(2, 3)], [Fraction(1, 3)]]),
        (SWAP, [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]]),
        (COND, [[1, 0, 0, 0], [0, 0, 0, 1]]),
    ],
)
def test_generator_matrices(c, rows):
    M = evaluate(c)
    assert [list(r) for r in M.rows] == rows
    assert oracle_matrix(c) == M


@settings(max_examples=150, deadline=None)
@given(circuits(max_in=2, max_out=2, max_size=6), circuits(max_in=2, max_out=2, max_size=6))
def test_parallel_is_tensor(c, d):
    assert evaluate(c @ d) == evaluate(c).kron(evaluate(d))
    assert evaluate(c @ d) == oracle_matrix(c @ d)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 3).flatmap(lambda k: st.tuples(typed_circuits(2, k), typed_circuits(k, 2))))
def test_sequence_is_product(pair):
    c, d = pair
    assert evaluate(c >> d) == evaluate(d) @ evaluate(c)
    assert evaluate(c >> d) == oracle_matrix(c >> d)


@settings(max_examples=100, deadline=None)
@given(circuits(kind="causal"))
def test_causal_circuits_are_discardable(c):
    M = evaluate(c)
    assert is_stochastic(M)
    assert evaluate(c >> gates.discard(c.outputs)) == evaluate(gates.discard(c.inputs))


@settings(max_examples=100, deadline=None)
@given(circuits(kind="boolean", max_in=2, max_out=2))
def test_boolean_circuits_are_copyable(b):
    assert is_boolean(b)
    assert is_deterministic(evaluate(b))
    lhs = b >> gates.copy_bundle(b.outputs)
    rhs = gates.copy_bundle(b.inputs) >> (b @ b)
    assert evaluate(lhs) == evaluate(rhs)


@settings(max_examples=100, deadline=None)
@given(circuits(kind="full"))
def test_every_circuit_is_substochastic(c):
    assert is_substochastic(evaluate(c))


@settings(max_examples=100, deadline=None)
@given(circuits(kind="full"), st.fractions(min_value=Fraction(1, 100), max_value=100))
def test_canonical_class_scale_invariant(c, k):
    M = evaluate(c)
    cls = canonical_class(M)
    assert canonical_class(M.scale(k)) == cls
    if not cls.is_bottom:
        assert canonical_class(cls.matrix) == cls
        assert cls.matrix.total() == 1
    assert prop_equal(M, M.scale(k))


def test_prop_equal_distinguishes():
    assert not prop_equal(evaluate(flip(HALF)), evaluate(flip(Fraction(1, 3))))
    assert prop_equal(evaluate(gates.failure_circuit(1, 1)), SubStochMatrix.zero(1, 1))
    with pytest.raises(DimensionMismatch):
        prop_equal(evaluate(ID), evaluate(COPY))


def test_conditioning_scales_mass():
    c = (flip(HALF) @ flip(HALF)) >> COND
    M = evaluate(c)
    assert M.total() == HALF
    assert canonical_class(M).matrix == evaluate(flip(HALF))


def test_cap():
    c = gates.discard(11) >> gates.TRUE >> gates.copy_1_to_n(11)
    with pytest.raises(CapExceeded):
        evaluate(c, cap=1 << 20)
    # a wide intermediate is refused by support size
    wide = (flip(HALF) @ flip(HALF) @ flip(HALF)) >> gates.discard(3)
    with pytest.raises(CapExceeded):
        evaluate(wide, cap=4)


def test_json_round_trip():
    M = evaluate((flip(Fraction(1, 3)) @ ID) >> AND)
    data = json.loads(json.dumps(M.to_json()))
    assert data["in"] == 1 and data["out"] == 1
    assert data["entries"] == [[1, 1], [2, 3], [0, 1], [1, 3]]
    assert SubStochMatrix.from_json(data) == M
    bottom = canonical_class(evaluate(gates.failure_circuit(0, 1)))
    assert bottom.to_json()["class"] == "bottom"


def test_distribution_and_marginal():
    joint = evaluate(flip(Fraction(1, 4)) >> COPY)
    assert distribution(joint) == {"00": Fraction(3, 4), "11": Fraction(1, 4)}
    assert marginalize(joint, 1) == evaluate(flip(Fraction(1, 4)))
    assert distribution(evaluate(NOT)) == {"1|0": 1, "0|1": 1}


def test_identity_matrix():
    assert evaluate(ID @ ID) == identity_matrix(2)
