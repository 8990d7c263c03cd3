"""Normal forms built from the semantics.

A stochastic map ``m -> n`` is factored into a chain of conditional
probability tables (one per output wire), and each table is encoded as the
canonical all-inputs selector followed by a cascade of multiplexers guarded by
the selector wires.  Contexts that are never reached get probability 0, so the
circuit is a function of the map alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from probcirc import gates
from probcirc.circuit import (
    COND,
    COPY,
    DEL,
    ID,
    Circuit,
    Gen,
    flatten,
    flip,
    identity,
    is_boolean,
    is_causal,
    nest_par,
    nest_seq,
    par_chain,
    seq_chain,
    typecheck,
)
from probcirc.errors import (
    BadWire,
    HasConditioning,
    NotAJoint,
    NotBoolean,
    NotCausal,
    NotStochastic,
    TypeMismatch,
)
from probcirc.semantics import (
    DEFAULT_CAP,
    ONE,
    ZERO,
    SubStochMatrix,
    bits,
    canonical_class,
    evaluate,
    is_stochastic,
    prop_equal,
)

HALF = Fraction(1, 2)


# --- Boolean circuits -------------------------------------------------------


def truth_table(b: Circuit, cap: int = DEFAULT_CAP) -> tuple[int, ...]:
    """``table[x]`` is the output index that the Boolean circuit ``b`` sends ``x`` to."""
    if not is_boolean(b):
        raise NotBoolean("circuit has conditioning or a flip other than 0 or 1")
    M = evaluate(b, cap)
    return tuple(next(y for y, v in enumerate(col) if v) for col in M.columns())


def shannon_expand(b: Circuit, wire: int) -> tuple[Circuit, Circuit]:
    """Restrictions ``(b_0, b_1)`` of the Boolean ``n -> 1`` circuit ``b`` at ``wire``.

    ``wire`` counts from 1 at the top.  ``b_v`` is ``b`` with that wire fixed
    to ``v``, as a circuit on the remaining ``n - 1`` wires.
    """
    table = truth_table(b)
    n = b.inputs
    if b.outputs != 1:
        raise TypeMismatch(f"Shannon expansion needs an n->1 circuit, got {b.type}")
    if not 1 <= wire <= n:
        raise BadWire(f"wire {wire} out of range 1..{n}")
    shift = n - wire
    low = (1 << shift) - 1
    out = []
    for v in (0, 1):
        restricted = []
        for rest in range(1 << (n - 1)):
            x = ((rest >> shift) << (shift + 1)) | (v << shift) | (rest & low)
            restricted.append(table[x])
        out.append(gates.truth_table_circuit(restricted, n - 1))
    return out[0], out[1]


def shannon_recompose(b0: Circuit, b1: Circuit, wire: int) -> Circuit:
    """``if x_wire then b1(rest) else b0(rest)`` on ``n = b0.inputs + 1`` wires."""
    n = b0.inputs + 1
    order = [wire - 1] + [i for i in range(n) if i != wire - 1]
    spread = identity(1) @ gates.copy_bundle(n - 1) if n > 1 else identity(1)
    return gates.permutation(order) >> spread >> nest_par([ID, b1, b0]) >> gates.MUX


# --- disintegration ---------------------------------------------------------


def disintegrate(M: SubStochMatrix) -> tuple[SubStochMatrix, SubStochMatrix]:
    """Split a ``0 -> 1 + k`` joint into the marginal of its first wire and a conditional.

    Where the marginal is zero the conditional is ``|0...0>``.
    """
    if M.in_wires != 0:
        raise NotAJoint(f"expected a matrix with no inputs, got {M.in_wires}")
    if M.out_wires < 1:
        raise NotAJoint("joint has no wire to condition on")
    k = M.out_wires - 1
    joint = [row[0] for row in M.rows]
    half = 1 << k
    marginal = [sum(joint[b * half : (b + 1) * half], ZERO) for b in (0, 1)]
    columns = []
    for b in (0, 1):
        if marginal[b] == 0:
            columns.append({0: ONE})
        else:
            columns.append(
                {y: joint[b * half + y] / marginal[b] for y in range(half) if joint[b * half + y]}
            )
    return (
        SubStochMatrix(0, 1, [[marginal[0]], [marginal[1]]]),
        SubStochMatrix.from_columns(1, k, columns),
    )


def recompose(marginal: SubStochMatrix, conditional: SubStochMatrix) -> SubStochMatrix:
    """``marginal ; copy ; (id x conditional)`` as a joint matrix."""
    k = conditional.out_wires
    rows = [[ZERO] for _ in range(1 << (1 + k))]
    for b in (0, 1):
        for y in range(1 << k):
            rows[(b << k) | y][0] = marginal[b, 0] * conditional[y, b]
    return SubStochMatrix(0, 1 + k, rows)


# --- conditional probability tables -----------------------------------------


@dataclass(frozen=True)
class CptChain:
    """``tables[k][w] = P(y_{k+1} = 1 | w)`` with ``w`` = inputs then ``y_1..y_k``."""

    in_wires: int
    out_wires: int
    tables: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if len(self.tables) != self.out_wires:
            raise ValueError("one table per output wire")
        for k, t in enumerate(self.tables):
            if len(t) != 1 << (self.in_wires + k):
                raise ValueError(f"table {k + 1} has the wrong number of contexts")
            if any(not 0 <= p <= 1 for p in t):
                raise ValueError(f"table {k + 1} has an entry outside [0, 1]")

    def matrix(self) -> SubStochMatrix:
        """The stochastic map the chain describes."""
        m, n = self.in_wires, self.out_wires
        columns = []
        for x in range(1 << m):
            col = {0: ONE}  # prefix value -> probability
            for k, table in enumerate(self.tables):
                nxt: dict[int, Fraction] = {}
                for prefix, w in col.items():
                    p = table[(x << k) | prefix]
                    if p:
                        nxt[(prefix << 1) | 1] = w * p
                    if p != 1:
                        nxt[prefix << 1] = w * (1 - p)
                col = nxt
            columns.append(col)
        return SubStochMatrix.from_columns(m, n, columns)

    def respects_zero_convention(self) -> bool:
        """Unreachable contexts must have probability 0."""
        m = self.in_wires
        for x in range(1 << m):
            reach = {0: ONE}
            for k, table in enumerate(self.tables):
                for prefix in range(1 << k):
                    if prefix not in reach and table[(x << k) | prefix] != 0:
                        return False
                nxt = {}
                for prefix, w in reach.items():
                    p = table[(x << k) | prefix]
                    if p:
                        nxt[(prefix << 1) | 1] = w * p
                    if p != 1:
                        nxt[prefix << 1] = w * (1 - p)
                reach = nxt
        return True

    def to_json(self) -> dict:
        m = self.in_wires
        return {
            "m": m,
            "n": self.out_wires,
            "tables": [
                {bits(w, m + k): [p.numerator, p.denominator] for w, p in enumerate(t)}
                for k, t in enumerate(self.tables)
            ],
        }

    @classmethod
    def from_json(cls, data: dict) -> "CptChain":
        m, n = data["m"], data["n"]
        tables = []
        for k, t in enumerate(data["tables"]):
            row = [ZERO] * (1 << (m + k))
            for key, (a, b) in t.items():
                row[int(key, 2) if key else 0] = Fraction(a, b)
            tables.append(tuple(row))
        return cls(m, n, tuple(tables))


def cpt_chain(M: SubStochMatrix) -> CptChain:
    """Iterated disintegration of a stochastic matrix, one output wire at a time."""
    if not is_stochastic(M):
        raise NotStochastic("cpt_chain needs a stochastic matrix")
    m, n = M.in_wires, M.out_wires
    tables = []
    for k in range(n):
        drop = n - k - 1
        table = []
        for x in range(1 << m):
            # probability of each prefix y_1..y_{k+1}
            prefix_mass: dict[int, Fraction] = {}
            for y in range(1 << n):
                v = M[y, x]
                if v:
                    key = y >> drop
                    prefix_mass[key] = prefix_mass.get(key, ZERO) + v
            for prefix in range(1 << k):
                one = prefix_mass.get((prefix << 1) | 1, ZERO)
                zero = prefix_mass.get(prefix << 1, ZERO)
                total = one + zero
                table.append(one / total if total else ZERO)
        tables.append(tuple(table))
    return CptChain(m, n, tuple(tables))


# --- normal-form circuits ---------------------------------------------------


def cascade(probs) -> Circuit:
    """``2^k -> 1`` mux cascade: slot ``i`` selects ``flip(probs[i])``; no slot gives 0."""
    out: Circuit = gates.FALSE
    for p in reversed(list(probs)):
        out = ((ID @ flip(p)) @ out) >> gates.MUX
    return out


def table_circuit(table, k: int, cap: int = DEFAULT_CAP) -> Circuit:
    """``k -> 1`` normal form for ``P(out = 1 | w) = table[w]``."""
    size = 1 << k
    slot_probs = [table[size - 1 - i] for i in range(size)]
    return gates.all_inputs(k, cap) >> cascade(slot_probs)


def _chain_circuit(m: int, tables, cap: int) -> Circuit:
    if not tables:
        return gates.discard(m)
    head = table_circuit(tables[0], m, cap)
    rest = _chain_circuit(m + 1, tables[1:], cap)
    return nest_seq(
        [
            gates.copy_bundle(m),
            head @ identity(m),
            COPY @ identity(m),
            ID @ gates.swap_bundle(1, m),
            ID @ rest,
        ]
    )


def circuit_from_cpt(chain: CptChain, cap: int = DEFAULT_CAP) -> Circuit:
    """The normal-form circuit of a chain: copy the context, sample the next
    output with its table, keep it and feed it into the context of the rest."""
    return flatten(_chain_circuit(chain.in_wires, chain.tables, cap))


def from_matrix(M: SubStochMatrix, cap: int = DEFAULT_CAP) -> Circuit:
    """A causal circuit whose semantics is exactly the stochastic matrix ``M``."""
    return circuit_from_cpt(cpt_chain(M), cap)


def normal_form(c: Circuit, cap: int = DEFAULT_CAP) -> Circuit:
    if not is_causal(c):
        raise HasConditioning("normal forms are defined for conditioning-free circuits")
    return from_matrix(evaluate(c, cap), cap)


def is_normal_form(c: Circuit, cap: int = DEFAULT_CAP) -> bool:
    """Whether ``c`` is literally the normal form of its own semantics.

    A circuit of the normal-form shape whose tables break the zero convention
    is rejected, since its own semantics rebuilds different tables.
    """
    try:
        typecheck(c)
    except TypeMismatch:
        return False
    if not is_causal(c):
        return False
    return flatten(c) == normal_form(c, cap)


# --- pre-normal forms -------------------------------------------------------


def convex_branch(p, b: Circuit, d: Circuit) -> Circuit:
    """``flip(p)``-weighted choice between ``b`` and ``d`` on shared inputs."""
    n = b.inputs
    return (flip(p) @ (gates.copy_bundle(n) >> (b @ d))) >> gates.MUX


def is_pre_normal_form(c: Circuit) -> bool:
    """A Boolean ``n -> 1`` circuit, or a flip-guarded choice between a Boolean
    circuit and a pre-normal form (see :func:`convex_branch`)."""
    try:
        t = typecheck(c)
    except TypeMismatch:
        return False
    if t.outputs != 1:
        return False
    if is_boolean(c):
        return True
    n = t.inputs
    mux_chain = seq_chain(flatten(gates.MUX))
    chain = seq_chain(flatten(c))
    if len(chain) != len(mux_chain) + 1 or chain[1:] != mux_chain:
        return False
    items = par_chain(chain[0])
    if not (isinstance(items[0], Gen) and items[0].kind == "flip"):
        return False
    if n == 0:
        body = items[1:]
    else:
        if len(items) != 2:
            return False
        spread = seq_chain(flatten(gates.copy_bundle(n)))
        inner = seq_chain(items[1])
        if inner == spread:
            body = [ID, ID]  # both branches were the bare wire and flattened away
        elif len(inner) == len(spread) + 1 and inner[:-1] == spread:
            body = par_chain(inner[-1])
        else:
            return False
    for split in range(1, len(body)):
        b = nest_par(body[:split])
        d = nest_par(body[split:])
        if b.type.inputs == n and b.type.outputs == 1 and d.type.outputs == 1:
            if is_boolean(b) and is_pre_normal_form(d):
                return True
    return False


# --- bending wires ----------------------------------------------------------


def bend(c: Circuit) -> Circuit:
    """``m -> n`` to ``0 -> m + n``: feed each input from a fair coin that is
    also kept as an output, so ``bend(c)(x, y) = 2^-m c(y | x)``."""
    m = c.inputs
    if m == 0:
        return c
    cups = gates.bundle(flip(HALF) >> COPY, m)
    order = [2 * i for i in range(m)] + [2 * i + 1 for i in range(m)]
    return cups >> gates.permutation(order) >> (identity(m) @ c)


def unbend(d: Circuit, m: int) -> Circuit:
    """``0 -> m + n`` to ``m -> n``: match the first ``m`` outputs against new
    inputs with ``cond`` and discard them.  ``unbend(bend(c), m)`` is ``2^-m c``."""
    if d.inputs != 0:
        raise TypeMismatch(f"unbend expects a circuit with no inputs, got {d.type}")
    total = d.outputs
    if not 0 <= m <= total:
        raise TypeMismatch(f"cannot bend {m} of {total} outputs")
    if m == 0:
        return d
    n = total - m
    order = [i for j in range(m) for i in (j, m + j)] + list(range(2 * m, 2 * m + n))
    caps = gates.bundle(COND >> DEL, m) @ identity(n)
    return (identity(m) @ d) >> gates.permutation(order) >> caps


def bent_matrix(M: SubStochMatrix) -> SubStochMatrix:
    """Reshape an ``m -> n`` matrix into the ``0 -> m + n`` joint of :func:`bend`."""
    m, n = M.in_wires, M.out_wires
    scale = Fraction(1, 1 << m)
    col = {(x << n) | y: M[y, x] * scale for x in range(1 << m) for y in range(1 << n) if M[y, x]}
    return SubStochMatrix.from_columns(0, m + n, [col])


# --- conditioning -----------------------------------------------------------


def eliminate_conditioning(c: Circuit, cap: int = DEFAULT_CAP) -> Circuit:
    """A canonical representative of ``c`` up to scaling.

    Failing circuits become :func:`gates.failure_circuit`.  Otherwise the bent
    semantics is normalized into a distribution, put in causal normal form and
    bent back; closed circuits come out with no ``cond`` at all.
    """
    t = typecheck(c)
    m, n = t.inputs, t.outputs
    cls = canonical_class(evaluate(c, cap))
    if cls.is_bottom:
        return gates.failure_circuit(m, n)
    joint = bent_matrix(cls.matrix)
    dist = joint.scale(1 / joint.total())
    return flatten(unbend(from_matrix(dist, cap), m))


NF_CROSS_CHECK_WIRES = 6


def equiv(c: Circuit, d: Circuit, cap: int = DEFAULT_CAP) -> bool:
    """Semantic equality up to scaling.

    For two causal circuits of at most :data:`NF_CROSS_CHECK_WIRES` wires in
    total the answer is also confirmed by comparing normal forms.
    """
    tc, td = typecheck(c), typecheck(d)
    if tc != td:
        raise TypeMismatch(f"cannot compare {tc} with {td}")
    answer = prop_equal(evaluate(c, cap), evaluate(d, cap))
    if is_causal(c) and is_causal(d) and tc.inputs + tc.outputs <= NF_CROSS_CHECK_WIRES:
        same_nf = normal_form(c, cap) == normal_form(d, cap)
        if same_nf != answer:  # pragma: no cover - would mean the normal forms are wrong
            raise AssertionError("normal forms disagree with the semantics")
    return answer


# --- Bayesian inversion -----------------------------------------------------


def bayes_inverse(f: Circuit, prior: Circuit, cap: int = DEFAULT_CAP) -> SubStochMatrix:
    """The conditional ``y -> x`` of the joint ``prior ; copy ; (id x f)``.

    Outputs of ``f`` with zero probability map to ``|0...0>``.
    """
    if not (is_causal(f) and is_causal(prior)):
        raise NotCausal("Bayesian inversion needs conditioning-free circuits")
    m, n = f.inputs, f.outputs
    if prior.type.inputs != 0 or prior.type.outputs != m:
        raise TypeMismatch(f"prior must be 0->{m}, got {prior.type}")
    J = evaluate(joint_circuit(f, prior), cap)
    columns = []
    for y in range(1 << n):
        weights = {x: J[(x << n) | y, 0] for x in range(1 << m) if J[(x << n) | y, 0]}
        total = sum(weights.values(), ZERO)
        columns.append({x: w / total for x, w in weights.items()} if total else {0: ONE})
    return SubStochMatrix.from_columns(n, m, columns)


def joint_circuit(f: Circuit, prior: Circuit) -> Circuit:
    """``prior ; copy ; (id x f)``: the joint over (input, output)."""
    m = f.inputs
    return prior >> gates.copy_bundle(m) >> (identity(m) @ f)


def reverse_joint(f: Circuit, prior: Circuit, cap: int = DEFAULT_CAP) -> SubStochMatrix:
    """``prior ; f ; copy ; (inverse x id)`` reordered as a joint over (input, output)."""
    m, n = f.inputs, f.outputs
    marginal = evaluate(prior >> f, cap)
    inv = bayes_inverse(f, prior, cap)
    col = {}
    for y in range(1 << n):
        py = marginal[y, 0]
        for x in range(1 << m):
            v = py * inv[x, y]
            if v:
                col[(x << n) | y] = v
    return SubStochMatrix.from_columns(0, m + n, [col])

