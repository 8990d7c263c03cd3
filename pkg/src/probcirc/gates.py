"""Derived gates built from the generators: OR, multiplexers, n-ary gates,
wire permutations, the all-inputs circuits and the canonical failing circuit."""

from __future__ import annotations

from functools import lru_cache

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
    flatten,
    flip,
    identity,
    nest_par,
    nest_seq,
)
from probcirc.errors import CapExceeded

TRUE = flip(1)
FALSE = flip(0)
FLIP_BOT = (FALSE @ TRUE) >> COND  # the unsatisfiable constraint, 0 -> 1

OR = (NOT @ NOT) >> AND >> NOT

# (guard, then, else) -> then if guard else else.  The leading swap puts the
# branches in the order the AND/OR network below expects.
MUX = (COPY @ SWAP) >> (NOT @ SWAP @ ID) >> (AND @ AND) >> OR

XOR = (
    (COPY @ COPY)
    >> (ID @ SWAP @ ID)
    >> (OR @ AND)
    >> (ID @ NOT)
    >> AND
)

DEFAULT_WIRE_CAP = 1 << 20


def bundle(gate: Circuit, n: int) -> Circuit:
    """``n`` parallel copies of ``gate``."""
    return nest_par([gate] * n) if n else ID0


def discard(n: int) -> Circuit:
    return bundle(DEL, n)


def not_n(n: int) -> Circuit:
    return bundle(NOT, n)


@lru_cache(maxsize=None)
def copy_1_to_n(n: int) -> Circuit:
    """Broadcast one wire to ``n`` wires; ``copy_1_to_n(0)`` is the discard."""
    if n == 0:
        return DEL
    if n == 1:
        return ID
    return COPY >> (ID @ copy_1_to_n(n - 1))


@lru_cache(maxsize=None)
def and_n(n: int) -> Circuit:
    if n == 0:
        return TRUE
    if n == 1:
        return ID
    return (ID @ and_n(n - 1)) >> AND


@lru_cache(maxsize=None)
def or_n(n: int) -> Circuit:
    if n == 0:
        return FALSE
    if n == 1:
        return ID
    return (ID @ or_n(n - 1)) >> OR


def permutation(perm) -> Circuit:
    """Wiring circuit whose output ``i`` carries input ``perm[i]``.

    Built by odd-even transposition sort, so it uses only ``SWAP`` and ``ID``
    and has at most ``len(perm)`` layers.
    """
    perm = list(perm)
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation: {perm}")
    if n == 0:
        return ID0
    target = {src: i for i, src in enumerate(perm)}
    current = list(range(n))  # current[j] = input index carried by wire j
    layers = []
    for rnd in range(n):
        items: list[Circuit] = []
        j = 0
        if rnd % 2:
            items.append(ID)
            j = 1
        swapped = False
        while j < n:
            if j + 1 < n and target[current[j]] > target[current[j + 1]]:
                current[j], current[j + 1] = current[j + 1], current[j]
                items.append(SWAP)
                swapped = True
                j += 2
            elif j + 1 < n:
                items.extend([ID, ID])
                j += 2
            else:
                items.append(ID)
                j += 1
        if swapped:
            layers.append(nest_par(items))
    if not layers:
        return identity(n)
    return nest_seq(layers)


def swap_bundle(a: int, b: int) -> Circuit:
    """``(x_1..x_a, y_1..y_b) -> (y_1..y_b, x_1..x_a)``."""
    return permutation(list(range(a, a + b)) + list(range(a)))


def interleave(n: int, k: int) -> list[int]:
    """Permutation taking k blocks of n wires to n groups of k (block-major to wire-major)."""
    return [block * n + i for i in range(n) for block in range(k)]


def deinterleave(n: int, k: int) -> list[int]:
    return [i * k + block for block in range(k) for i in range(n)]


@lru_cache(maxsize=None)
def copy_bundle(n: int, k: int = 2) -> Circuit:
    """``x -> (x, x, ..., x)`` with ``k`` copies of the ``n``-wire bundle ``x``."""
    if n == 0:
        return ID0
    spread = bundle(copy_1_to_n(k), n)  # (x1 x1 .. x2 x2 ..)
    if n == 1:
        return spread
    return spread >> permutation(deinterleave(n, k))


@lru_cache(maxsize=None)
def mux_n(w: int) -> Circuit:
    """Multiplexer on ``w``-wire bundles: ``(g, t_1..t_w, e_1..e_w) -> w`` wires."""
    if w == 1:
        return MUX
    if w == 0:
        return DEL
    guards = copy_1_to_n(w) @ identity(2 * w)
    # wires: g_1..g_w, t_1..t_w, e_1..e_w  ->  (g_i, t_i, e_i) for each i
    regroup = permutation([block * w + i for i in range(w) for block in range(3)])
    return guards >> regroup >> bundle(MUX, w)


@lru_cache(maxsize=None)
def cond_n(n: int) -> Circuit:
    """Pairwise conditioning ``(x_1..x_n, x'_1..x'_n) -> n``."""
    if n == 0:
        return ID0
    if n == 1:
        return COND
    return permutation(interleave(n, 2)) >> bundle(COND, n)


def convex_sum(p) -> Circuit:
    """``(x_0, x_1) -> p|x_0> + (1-p)|x_1>``: a multiplexer guarded by a coin."""
    return (flip(p) @ identity(2)) >> MUX


@lru_cache(maxsize=None)
def all_inputs(n: int, cap: int = DEFAULT_WIRE_CAP) -> Circuit:
    """The ``n -> 2^n`` circuit sending ``x`` to the one-hot vector of its slot.

    Slots are ordered by descending binary value with the top wire as the most
    significant bit, so the all-ones input selects the first output wire.
    """
    if n < 0:
        raise ValueError("n must be natural")
    if (1 << n) > cap:
        raise CapExceeded(f"all_{n} has 2^{n} output wires, above the cap {cap}")
    if n == 0:
        return TRUE
    k = 1 << (n - 1)
    rest = all_inputs(n - 1, cap)
    # (x0, v) -> (x0, not x0, v) -> (x0 * k, (not x0) * k, v, v)
    head = COPY >> (ID @ NOT)
    spread = (copy_1_to_n(k) @ copy_1_to_n(k)) @ copy_bundle(k)
    # pair wire i of each selector block with v_i
    pairing = permutation(
        [idx for i in range(k) for idx in (i, 2 * k + i)]
        + [idx for i in range(k) for idx in (k + i, 3 * k + i)]
    )
    return (head @ rest) >> spread >> pairing >> bundle(AND, 2 * k)


def failure_circuit(m: int, n: int) -> Circuit:
    """The canonical failing circuit ``m -> n``; its semantics is the zero map."""
    return flatten(discard(m) @ (FLIP_BOT >> copy_1_to_n(n)))


def truth_table_circuit(table, k: int) -> Circuit:
    """Boolean ``k -> 1`` circuit for ``table`` (a map from input index to bit).

    Constants and single-wire projections get their evident small circuits;
    anything else is ``all_k`` followed by an OR of the selected slots.
    """
    ones = [x for x in range(1 << k) if table[x]]
    if k == 0:
        return TRUE if ones else FALSE
    if not ones:
        return discard(k) >> FALSE
    if len(ones) == 1 << k:
        return discard(k) >> TRUE
    for wire in range(k):
        shift = k - 1 - wire
        proj = [(x >> shift) & 1 for x in range(1 << k)]
        if all(bool(table[x]) == bool(proj[x]) for x in range(1 << k)):
            return _pick(wire, k, ID)
        if all(bool(table[x]) != bool(proj[x]) for x in range(1 << k)):
            return _pick(wire, k, NOT)
    slots = [(1 << k) - 1 - x for x in range(1 << k)]  # slot j holds input value 2^k-1-j
    select = nest_par([ID if table[x] else DEL for x in slots])
    return all_inputs(k) >> select >> or_n(len(ones))


def _pick(wire: int, k: int, gate: Circuit) -> Circuit:
    """Keep one of ``k`` wires (through ``gate``) and discard the rest."""
    items = [DEL] * wire + [gate] + [DEL] * (k - 1 - wire)
    return nest_par(items)
