"""Hypothesis strategies built on the package's seeded circuit generator."""

import random

from hypothesis import strategies as st

from probcirc.random import random_circuit


def circuits(kind="full", max_in=3, max_out=3, max_size=10):
    return st.builds(
        lambda seed, m, n, size: random_circuit(random.Random(seed), m, n, size=size, kind=kind),
        st.integers(0, 2**32),
        st.integers(0, max_in),
        st.integers(0, max_out),
        st.integers(1, max_size),
    )


def typed_circuits(m, n, kind="full", max_size=8):
    return st.builds(
        lambda seed, size: random_circuit(random.Random(seed), m, n, size=size, kind=kind),
        st.integers(0, 2**32),
        st.integers(1, max_size),
    )


rationals = st.fractions(min_value=0, max_value=1, max_denominator=64)
open_rationals = st.fractions(min_value=0, max_value=1, max_denominator=64).filter(lambda p: 0 < p < 1)
