"""Circuit terms: generators, sequential/parallel composition and typing.

A circuit ``c : m -> n`` has ``m`` input wires and ``n`` output wires.  Terms
are immutable trees; ``c >> d`` builds the sequential composite and ``c @ d``
the parallel one.

>>> from probcirc.circuit import COPY, NOT, ID
>>> (COPY >> (ID @ NOT)).type
CircType(inputs=1, outputs=2)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from probcirc.errors import TypeMismatch

# generator kind -> (inputs, outputs)
GENERATOR_TYPES = {
    "copy": (1, 2),
    "del": (1, 0),
    "and": (2, 1),
    "not": (1, 1),
    "flip": (0, 1),
    "cond": (2, 1),
}


@dataclass(frozen=True)
class CircType:
    inputs: int
    outputs: int

    def __str__(self) -> str:
        return f"{self.inputs}->{self.outputs}"


def as_rational(value) -> Fraction:
    """Exact rational from an int, Fraction, ``"1/3"`` or a decimal literal like ``"0.1"``.

    Floats are refused: ``0.1`` as a float is not one tenth.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not probabilities")
    if isinstance(value, float):
        raise TypeError(f"refusing float {value!r}; pass a string or Fraction")
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return Fraction(int(value[0]), int(value[1]))
    return Fraction(value)


class Circuit:
    """Base class of circuit terms.  Equality is structural."""

    __slots__ = ("_hash", "_type")
    arity = 0

    def children(self) -> tuple["Circuit", ...]:
        return ()

    def _key(self) -> tuple:
        raise NotImplementedError

    def __hash__(self) -> int:
        try:
            return self._hash
        except AttributeError:
            h = hash(self._key())
            object.__setattr__(self, "_hash", h)
            return h

    def __eq__(self, other) -> bool:
        # explicit stack: generated normal forms nest deeply
        stack = [(self, other)]
        while stack:
            a, b = stack.pop()
            if a is b:
                continue
            if type(a) is not type(b) or hash(a) != hash(b):
                return False
            kids = a.children()
            if kids:
                stack.extend(zip(kids, b.children()))
            elif a._key() != b._key():
                return False
        return True

    def __setattr__(self, name, value):
        raise AttributeError("circuits are immutable")

    @property
    def type(self) -> CircType:
        try:
            return self._type
        except AttributeError:
            return typecheck(self)

    @property
    def inputs(self) -> int:
        return self.type.inputs

    @property
    def outputs(self) -> int:
        return self.type.outputs

    def __rshift__(self, other: "Circuit") -> "Circuit":
        return Seq(self, other)

    def __matmul__(self, other: "Circuit") -> "Circuit":
        return Par(self, other)

    def __repr__(self) -> str:
        from probcirc.syntax import serialize

        return f"<Circuit {serialize(self, flat=False)} : {self.type}>"


class Gen(Circuit):
    __slots__ = ("kind", "param")

    def __init__(self, kind: str, param=None):
        if kind not in GENERATOR_TYPES:
            raise ValueError(f"unknown generator {kind!r}")
        if kind == "flip":
            p = as_rational(param)
            if not 0 <= p <= 1:
                raise ValueError(f"flip parameter {p} outside [0, 1]")
        elif param is not None:
            raise ValueError(f"generator {kind!r} takes no parameter")
        else:
            p = None
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "param", p)
        object.__setattr__(self, "_type", CircType(*GENERATOR_TYPES[kind]))

    def _key(self):
        return ("gen", self.kind, self.param)


class Id(Circuit):
    """The single wire, ``1 -> 1``."""

    __slots__ = ()

    def __init__(self):
        object.__setattr__(self, "_type", CircType(1, 1))

    def _key(self):
        return ("id",)


class Id0(Circuit):
    """The empty diagram, ``0 -> 0``."""

    __slots__ = ()

    def __init__(self):
        object.__setattr__(self, "_type", CircType(0, 0))

    def _key(self):
        return ("id0",)


class Swap(Circuit):
    __slots__ = ()

    def __init__(self):
        object.__setattr__(self, "_type", CircType(2, 2))

    def _key(self):
        return ("swap",)


class Seq(Circuit):
    __slots__ = ("left", "right")
    arity = 2

    def __init__(self, left: Circuit, right: Circuit):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "_hash", hash(("seq", hash(left), hash(right))))
        ta, tb = getattr(left, "_type", None), getattr(right, "_type", None)
        if ta is not None and tb is not None and ta.outputs == tb.inputs:
            object.__setattr__(self, "_type", CircType(ta.inputs, tb.outputs))

    def children(self):
        return (self.left, self.right)

    def _key(self):
        return ("seq", self.left, self.right)


class Par(Circuit):
    __slots__ = ("top", "bottom")
    arity = 2

    def __init__(self, top: Circuit, bottom: Circuit):
        object.__setattr__(self, "top", top)
        object.__setattr__(self, "bottom", bottom)
        object.__setattr__(self, "_hash", hash(("par", hash(top), hash(bottom))))
        ta, tb = getattr(top, "_type", None), getattr(bottom, "_type", None)
        if ta is not None and tb is not None:
            object.__setattr__(self, "_type", CircType(ta.inputs + tb.inputs, ta.outputs + tb.outputs))

    def children(self):
        return (self.top, self.bottom)

    def _key(self):
        return ("par", self.top, self.bottom)


COPY = Gen("copy")
DEL = Gen("del")
AND = Gen("and")
NOT = Gen("not")
COND = Gen("cond")
ID = Id()
ID0 = Id0()
SWAP = Swap()


def flip(p) -> Gen:
    return Gen("flip", p)


def typecheck(c: Circuit) -> CircType:
    """Compute (and cache on every subterm) the unique type of ``c``.

    Raises :class:`TypeMismatch` with the path of the offending ``Seq`` node,
    where path entries 0/1 select the left/right (top/bottom) child.
    """
    # explicit stack: generated normal forms nest deeply
    stack: list[tuple[Circuit, tuple[int, ...], bool]] = [(c, (), False)]
    while stack:
        node, path, expanded = stack.pop()
        if hasattr(node, "_type"):
            continue
        if not expanded:
            stack.append((node, path, True))
            for i, child in enumerate(node.children()):
                stack.append((child, path + (i,), False))
            continue
        a, b = node.children()
        ta, tb = a._type, b._type
        if isinstance(node, Seq):
            if ta.outputs != tb.inputs:
                raise TypeMismatch(
                    f"cannot compose {ta} with {tb}: {ta.outputs} outputs vs {tb.inputs} inputs",
                    path,
                )
            t = CircType(ta.inputs, tb.outputs)
        else:
            t = CircType(ta.inputs + tb.inputs, ta.outputs + tb.outputs)
        object.__setattr__(node, "_type", t)
    return c._type


def subterms(c: Circuit) -> Iterator[Circuit]:
    """Pre-order traversal of all subterms."""
    stack = [c]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children()))


def generators(c: Circuit) -> Iterator[Gen]:
    return (t for t in subterms(c) if isinstance(t, Gen))


def count_generators(c: Circuit) -> int:
    return sum(1 for _ in generators(c))


def has_conditioning(c: Circuit) -> bool:
    return any(g.kind == "cond" for g in generators(c))


def is_causal(c: Circuit) -> bool:
    return not has_conditioning(c)


def is_boolean(c: Circuit) -> bool:
    """No conditioning and every flip is one of the constants 0 or 1."""
    for g in generators(c):
        if g.kind == "cond":
            return False
        if g.kind == "flip" and g.param not in (0, 1):
            return False
    return True


def subterm_at(c: Circuit, path) -> Circuit:
    from probcirc.errors import BadPath

    node = c
    for depth, step in enumerate(path):
        kids = node.children()
        if step not in (0, 1) or not kids:
            raise BadPath(f"path {list(path)} leaves the term at depth {depth}")
        node = kids[step]
    return node


def replace_at(c: Circuit, path, new: Circuit) -> Circuit:
    from probcirc.errors import BadPath

    if not path:
        return new
    step, rest = path[0], path[1:]
    kids = c.children()
    if step not in (0, 1) or not kids:
        raise BadPath(f"path {list(path)} leaves the term")
    a, b = kids
    if step == 0:
        a = replace_at(a, rest, new)
    else:
        b = replace_at(b, rest, new)
    return type(c)(a, b)


def seq_chain(c: Circuit) -> list[Circuit]:
    """Elements of a right-nested sequential chain (``[c]`` if ``c`` is not a Seq)."""
    out = []
    while isinstance(c, Seq):
        out.append(c.left)
        c = c.right
    out.append(c)
    return out


def par_chain(c: Circuit) -> list[Circuit]:
    out = []
    while isinstance(c, Par):
        out.append(c.top)
        c = c.bottom
    out.append(c)
    return out


def _is_identity_bundle(c: Circuit) -> bool:
    return all(isinstance(e, (Id, Id0)) for e in par_chain(c))


def identity(n: int) -> Circuit:
    """``n`` parallel wires (``ID0`` for ``n == 0``)."""
    return nest_par([ID] * n) if n else ID0


def nest_seq(items: list[Circuit]) -> Circuit:
    out = items[-1]
    for item in reversed(items[:-1]):
        out = Seq(item, out)
    return out


def nest_par(items: list[Circuit]) -> Circuit:
    if not items:
        return ID0
    out = items[-1]
    for item in reversed(items[:-1]):
        out = Par(item, out)
    return out


def flatten(c: Circuit) -> Circuit:
    """Right-associate Seq/Par chains and drop unit identities.

    Semantics-preserving and idempotent; used before serialisation and for
    matching in the rewrite engine.
    """
    memo: dict[int, Circuit] = {}

    def go(node: Circuit) -> Circuit:
        key = id(node)
        if key in memo:
            return memo[key]
        # children come back flattened, so only a chain on the left needs re-nesting
        if isinstance(node, Seq):
            a, b = go(node.left), go(node.right)
            if _is_identity_bundle(a):
                out = b if not _is_identity_bundle(b) else identity(node.type.inputs)
            elif _is_identity_bundle(b):
                out = a
            elif isinstance(a, Seq):
                out = nest_seq(seq_chain(a) + [b])
            else:
                out = Seq(a, b)
        elif isinstance(node, Par):
            a, b = go(node.top), go(node.bottom)
            if isinstance(a, Id0):
                out = b
            elif isinstance(b, Id0):
                out = a
            elif isinstance(a, Par):
                out = nest_par(par_chain(a) + [b])
            else:
                out = Par(a, b)
        else:
            out = node
        typecheck(out)
        memo[key] = out
        return out

    typecheck(c)
    return go(c)
