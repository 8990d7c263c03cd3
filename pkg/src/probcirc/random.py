"""Random rationals and random well-typed circuits for property tests and the
soundness harness.  Everything is driven by an explicit ``random.Random``."""

from __future__ import annotations

import random as _random
from fractions import Fraction

from probcirc.circuit import AND, COND, COPY, DEL, ID, NOT, SWAP, Circuit, flip, identity, nest_par

MAX_DENOMINATOR = 64


def random_rat(rng: _random.Random, max_den: int = MAX_DENOMINATOR, open_interval: bool = False) -> Fraction:
    """A rational in ``[0, 1]`` (or ``(0, 1)``) with denominator at most ``max_den``."""
    if not open_interval and rng.random() < 0.1:
        return Fraction(rng.choice((0, 1)))
    den = rng.randint(2, max_den)
    lo = 1 if open_interval else 0
    hi = den - 1 if open_interval else den
    return Fraction(rng.randint(lo, hi), den)


KINDS = ("boolean", "causal", "full")


def _flip(rng, kind) -> Circuit:
    if kind == "boolean":
        return flip(rng.choice((0, 1)))
    return flip(random_rat(rng))


def _layer(rng, width: int, gate: Circuit) -> Circuit:
    pos = rng.randint(0, width - gate.inputs)
    parts = [identity(pos), gate, identity(width - pos - gate.inputs)]
    return nest_par([p for p in parts if p.inputs or p.outputs])


def _layered(rng, m: int, n: int, size: int, kind: str, max_width: int) -> Circuit:
    """A chain of one-gate layers from ``m`` to ``n`` wires using about ``size`` generators."""
    width = m
    layers: list[Circuit] = []
    budget = size
    while budget > 0:
        options = []
        if width >= 1:
            options += [NOT, DEL, ID]
            if width < max_width:
                options.append(COPY)
        if width >= 2:
            options += [AND, SWAP]
            if kind == "full":
                options.append(COND)
        if width < max_width:
            options.append("flip")
        if not options:
            break
        g = rng.choice(options)
        if g == "flip":
            g = _flip(rng, kind)
        if g is ID:
            continue
        layers.append(_layer(rng, width, g))
        width += g.outputs - g.inputs
        if g is not SWAP:
            budget -= 1
    while width > n:
        g = rng.choice([DEL, AND] + ([COND] if kind == "full" else [])) if width >= 2 else DEL
        layers.append(_layer(rng, width, g))
        width += g.outputs - g.inputs
    while width < n:
        g = COPY if width and rng.random() < 0.5 else _flip(rng, kind)
        layers.append(_layer(rng, width, g))
        width += g.outputs - g.inputs
    if not layers:
        return identity(m)
    out = layers[0]
    for layer in layers[1:]:
        # vary the bracketing so both association orders get exercised
        out = out >> layer if rng.random() < 0.5 else _append_right(out, layer)
    return out


def _append_right(c: Circuit, layer: Circuit) -> Circuit:
    from probcirc.circuit import Seq

    if isinstance(c, Seq):
        return Seq(c.left, _append_right(c.right, layer))
    return Seq(c, layer)


def random_circuit(
    rng: _random.Random,
    m: int,
    n: int,
    size: int = 6,
    kind: str = "causal",
    max_width: int = 4,
) -> Circuit:
    """A random circuit of type ``m -> n`` with roughly ``size`` generators.

    ``kind`` restricts the generators: ``"boolean"`` (flips 0/1 only),
    ``"causal"`` (no conditioning) or ``"full"``.  No intermediate layer is
    wider than ``max(max_width, m, n)`` wires.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    max_width = max(max_width, m, n, 1)
    if size >= 4 and m + n >= 2 and rng.random() < 0.25:
        # parallel split of the interface
        m1 = rng.randint(0, m)
        n1 = rng.randint(0, n)
        if (m1, n1) != (0, 0) and (m - m1, n - n1) != (0, 0):
            s1 = rng.randint(1, size - 1)
            w1 = max(1, max_width // 2)
            top = random_circuit(rng, m1, n1, s1, kind, max(w1, m1, n1))
            bottom = random_circuit(rng, m - m1, n - n1, size - s1, kind, max(max_width - w1, m - m1, n - n1, 1))
            return top @ bottom
    if size >= 4 and rng.random() < 0.25:
        k = rng.randint(0, max_width)
        s1 = rng.randint(1, size - 1)
        return random_circuit(rng, m, k, s1, kind, max_width) >> random_circuit(rng, k, n, size - s1, kind, max_width)
    return _layered(rng, m, n, size, kind, max_width)


def random_stochastic_matrix(rng: _random.Random, m: int, n: int, max_den: int = 16):
    """A random exact stochastic ``m -> n`` matrix (some columns sparse)."""
    from probcirc.semantics import SubStochMatrix

    columns = []
    for _ in range(1 << m):
        support = rng.sample(range(1 << n), rng.randint(1, 1 << n))
        weights = [rng.randint(1, max_den) for _ in support]
        total = sum(weights)
        columns.append({y: Fraction(w, total) for y, w in zip(support, weights)})
    return SubStochMatrix.from_columns(m, n, columns)


def random_joint(rng: _random.Random, n: int, max_den: int = 16):
    """A random distribution over ``n`` wires, as a ``0 -> n`` matrix."""
    return random_stochastic_matrix(rng, 0, n, max_den)
