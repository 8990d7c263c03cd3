"""Exact semantics of circuits as substochastic matrices over the rationals.

Bit-vectors are indexed by their binary value with the top wire as the most
significant bit.  Entry ``(y, x)`` of the matrix of ``c : m -> n`` is the
probability ``c(y | x)``.

>>> from probcirc.circuit import flip
>>> evaluate(flip("1/3")).column(0)
(Fraction(2, 3), Fraction(1, 3))
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from probcirc.circuit import Circuit, Gen, Id, Id0, Par, Seq, Swap, typecheck
from probcirc.errors import CapExceeded, DimensionMismatch

DEFAULT_CAP = 1 << 20

ZERO = Fraction(0)
ONE = Fraction(1)


class SubStochMatrix:
    """Dense ``2^n x 2^m`` matrix of Fractions, stored row-major."""

    __slots__ = ("in_wires", "out_wires", "rows")

    def __init__(self, in_wires: int, out_wires: int, rows: Sequence[Sequence[Fraction]]):
        rows = tuple(tuple(Fraction(v) for v in row) for row in rows)
        if len(rows) != 1 << out_wires or any(len(r) != 1 << in_wires for r in rows):
            raise DimensionMismatch(
                f"expected a {1 << out_wires}x{1 << in_wires} matrix for {in_wires}->{out_wires}"
            )
        self.in_wires = in_wires
        self.out_wires = out_wires
        self.rows = rows

    @classmethod
    def from_columns(cls, in_wires: int, out_wires: int, columns) -> "SubStochMatrix":
        """Build from per-input sparse columns, ``columns[x] = {y: weight}``."""
        rows = [[ZERO] * (1 << in_wires) for _ in range(1 << out_wires)]
        for x, col in enumerate(columns):
            for y, w in col.items():
                rows[y][x] = w
        return cls(in_wires, out_wires, rows)

    @classmethod
    def zero(cls, in_wires: int, out_wires: int) -> "SubStochMatrix":
        return cls.from_columns(in_wires, out_wires, [{}] * (1 << in_wires))

    @property
    def shape(self) -> tuple[int, int]:
        return (1 << self.out_wires, 1 << self.in_wires)

    def __getitem__(self, yx: tuple[int, int]) -> Fraction:
        y, x = yx
        return self.rows[y][x]

    def column(self, x: int) -> tuple[Fraction, ...]:
        return tuple(row[x] for row in self.rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(x) for x in range(1 << self.in_wires)]

    def column_sums(self) -> list[Fraction]:
        return [sum(col, ZERO) for col in self.columns()]

    def total(self) -> Fraction:
        return sum((sum(row, ZERO) for row in self.rows), ZERO)

    def is_zero(self) -> bool:
        return all(v == 0 for row in self.rows for v in row)

    def scale(self, factor) -> "SubStochMatrix":
        f = Fraction(factor)
        return SubStochMatrix(self.in_wires, self.out_wires, [[v * f for v in row] for row in self.rows])

    def __matmul__(self, other: "SubStochMatrix") -> "SubStochMatrix":
        """Ordinary matrix product ``self . other`` (apply ``other`` first)."""
        if self.in_wires != other.out_wires:
            raise DimensionMismatch("inner dimensions differ")
        cols = other.columns()
        rows = [
            [sum((a * b for a, b in zip(row, col) if a and b), ZERO) for col in cols]
            for row in self.rows
        ]
        return SubStochMatrix(other.in_wires, self.out_wires, rows)

    def kron(self, other: "SubStochMatrix") -> "SubStochMatrix":
        """Tensor product; ``self`` occupies the top (most significant) wires."""
        rows = [
            [a * b for a in ra for b in rb]
            for ra in self.rows
            for rb in other.rows
        ]
        return SubStochMatrix(self.in_wires + other.in_wires, self.out_wires + other.out_wires, rows)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SubStochMatrix)
            and self.in_wires == other.in_wires
            and self.out_wires == other.out_wires
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.in_wires, self.out_wires, self.rows))

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(v) for v in row) for row in self.rows)
        return f"SubStochMatrix({self.in_wires}->{self.out_wires}: [{body}])"

    def to_json(self) -> dict:
        return {
            "in": self.in_wires,
            "out": self.out_wires,
            "entries": [[v.numerator, v.denominator] for row in self.rows for v in row],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SubStochMatrix":
        m, n = data["in"], data["out"]
        flat = [Fraction(a, b) for a, b in data["entries"]]
        width = 1 << m
        return cls(m, n, [flat[i : i + width] for i in range(0, len(flat), width)])


def is_substochastic(M: SubStochMatrix) -> bool:
    return all(v >= 0 for row in M.rows for v in row) and all(s <= 1 for s in M.column_sums())


def is_stochastic(M: SubStochMatrix) -> bool:
    return all(v >= 0 for row in M.rows for v in row) and all(s == 1 for s in M.column_sums())


def is_deterministic(M: SubStochMatrix) -> bool:
    return is_stochastic(M) and all(v in (0, 1) for row in M.rows for v in row)


def _gen_kernel(g: Gen, x: int) -> dict[int, Fraction]:
    kind = g.kind
    if kind == "copy":
        return {x * 3: ONE}
    if kind == "del":
        return {0: ONE}
    if kind == "and":
        return {1 if x == 3 else 0: ONE}
    if kind == "not":
        return {1 - x: ONE}
    if kind == "flip":
        p = g.param
        out = {}
        if p:
            out[1] = p
        if p != 1:
            out[0] = ONE - p
        return out
    # cond: (x1, x2) -> x when x1 == x2, else nothing
    if x == 3:
        return {1: ONE}
    if x == 0:
        return {0: ONE}
    return {}


class _Evaluator:
    """Sparse column-at-a-time evaluation, memoized per (subterm, input)."""

    def __init__(self, cap: int):
        self.cap = cap
        self.memo: dict[tuple[int, int], dict[int, Fraction]] = {}
        self.chains: dict[tuple[int, type], list] = {}
        self.keep: list[Circuit] = []  # pin subterms so id() keys stay valid

    def chain(self, c: Circuit, kind: type) -> list:
        """Elements of the ``kind`` chain rooted at ``c``, cached.

        Par chains come as ``((inputs, outputs), item)`` with runs of bare
        wires merged into one entry whose item is ``None``.
        """
        key = (id(c), kind)
        hit = self.chains.get(key)
        if hit is not None:
            return hit
        items = []
        node = c
        while isinstance(node, kind):
            items.append(node.children()[0])
            node = node.children()[1]
        items.append(node)
        if kind is Par:
            merged: list = []
            for item in items:
                if isinstance(item, Id0):
                    continue
                if isinstance(item, Id):
                    if merged and merged[-1][1] is None:
                        w = merged[-1][0][0] + 1
                        merged[-1] = ((w, w), None)
                    else:
                        merged.append(((1, 1), None))
                else:
                    merged.append(((item.inputs, item.outputs), item))
            items = merged
        self.chains[key] = items
        self.keep.append(c)
        return items

    def column(self, c: Circuit, x: int) -> dict[int, Fraction]:
        key = (id(c), x)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        if isinstance(c, Gen):
            out = _gen_kernel(c, x)
        elif isinstance(c, Id):
            out = {x: ONE}
        elif isinstance(c, Id0):
            out = {0: ONE}
        elif isinstance(c, Swap):
            out = {((x & 1) << 1) | (x >> 1): ONE}
        elif isinstance(c, Seq):
            # push the distribution through the whole chain, layer by layer
            out = {x: ONE}
            for layer in self.chain(c, Seq):
                step: dict[int, Fraction] = {}
                for z, w in out.items():
                    for y, v in self.column(layer, z).items():
                        step[y] = step.get(y, ZERO) + (w if v is ONE else w * v)
                out = {y: v for y, v in step.items() if v}
        elif isinstance(c, Par):
            out = {0: ONE}
            pos = c.inputs
            for item, ident in self.chain(c, Par):
                m, n = item
                pos -= m
                xi = (x >> pos) & ((1 << m) - 1)
                if ident is None:
                    out = {(acc << n) | xi: w for acc, w in out.items()}
                    continue
                col = self.column(ident, xi)
                if not col:
                    out = {}
                    break
                out = {
                    (acc << n) | y: (w if v is ONE else v if w is ONE else w * v)
                    for acc, w in out.items()
                    for y, v in col.items()
                }
        else:  # pragma: no cover - closed set of node classes
            raise TypeError(f"not a circuit: {c!r}")
        if len(out) > self.cap:
            raise CapExceeded(f"intermediate support of {len(out)} outcomes exceeds the cap {self.cap}")
        self.memo[key] = out
        self.keep.append(c)
        return out


def eval_columns(c: Circuit, cap: int = DEFAULT_CAP) -> list[dict[int, Fraction]]:
    """Sparse columns of the semantics: ``result[x] = {y: c(y|x)}`` with zeros omitted."""
    t = typecheck(c)
    if (1 << (t.inputs + t.outputs)) > cap:
        raise CapExceeded(
            f"a {t} circuit has 2^{t.inputs + t.outputs} matrix cells, above the cap {cap}"
        )
    ev = _Evaluator(cap)
    return [ev.column(c, x) for x in range(1 << t.inputs)]


def evaluate(c: Circuit, cap: int = DEFAULT_CAP) -> SubStochMatrix:
    """The substochastic matrix denoted by ``c``."""
    t = typecheck(c)
    return SubStochMatrix.from_columns(t.inputs, t.outputs, eval_columns(c, cap))


@dataclass(frozen=True)
class ProjClass:
    """A matrix up to a positive scalar: normalized to total mass 1, or Bottom."""

    in_wires: int
    out_wires: int
    matrix: Optional[SubStochMatrix]  # None for Bottom

    @property
    def is_bottom(self) -> bool:
        return self.matrix is None

    def to_json(self) -> dict:
        if self.matrix is None:
            return {"class": "bottom", "in": self.in_wires, "out": self.out_wires}
        return {"class": "canonical", **self.matrix.to_json()}


def canonical_class(M: SubStochMatrix) -> ProjClass:
    total = M.total()
    if total == 0:
        return ProjClass(M.in_wires, M.out_wires, None)
    return ProjClass(M.in_wires, M.out_wires, M.scale(1 / total))


def prop_equal(M: SubStochMatrix, N: SubStochMatrix) -> bool:
    """Whether ``M = lambda * N`` for some ``lambda > 0`` (or both are zero)."""
    if (M.in_wires, M.out_wires) != (N.in_wires, N.out_wires):
        raise DimensionMismatch(
            f"cannot compare {M.in_wires}->{M.out_wires} with {N.in_wires}->{N.out_wires}"
        )
    return canonical_class(M) == canonical_class(N)


def marginalize(M: SubStochMatrix, keep: int) -> SubStochMatrix:
    """Sum out all but the first ``keep`` output wires of a ``0 -> n`` matrix."""
    if M.in_wires != 0:
        raise DimensionMismatch("marginalize expects a matrix with no inputs")
    if not 0 <= keep <= M.out_wires:
        raise DimensionMismatch(f"cannot keep {keep} of {M.out_wires} wires")
    drop = M.out_wires - keep
    rows = [[ZERO] for _ in range(1 << keep)]
    for y, row in enumerate(M.rows):
        rows[y >> drop][0] += row[0]
    return SubStochMatrix(0, keep, rows)


def matrix_from_function(in_wires: int, out_wires: int, fn) -> SubStochMatrix:
    """Deterministic matrix of a function on bit-vector indices."""
    return SubStochMatrix.from_columns(in_wires, out_wires, [{fn(x): ONE} for x in range(1 << in_wires)])


def identity_matrix(n: int) -> SubStochMatrix:
    return matrix_from_function(n, n, lambda x: x)


def bits(value: int, width: int) -> str:
    """Bit string of ``value``, most significant first (``""`` for width 0)."""
    return format(value, f"0{width}b") if width else ""


def distribution(M: SubStochMatrix) -> dict[str, Fraction]:
    """Nonzero entries keyed by ``"y"`` (closed) or ``"y|x"`` (open)."""
    out = {}
    for y, row in enumerate(M.rows):
        for x, v in enumerate(row):
            if v:
                key = bits(y, M.out_wires)
                if M.in_wires:
                    key += "|" + bits(x, M.in_wires)
                out[key] = v
    return out


def from_distribution(weights: Iterable[tuple[int, Fraction]], width: int) -> SubStochMatrix:
    return SubStochMatrix.from_columns(0, width, [dict(weights)])
