"""Reference implementations used only as test oracles.

Both avoid the package's matrix algebra: the circuit oracle compiles a term to a
netlist and enumerates every assignment of its coins; the program oracle
enumerates every world of a surface program directly.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from probcirc.circuit import Circuit, Gen, Id, Id0, Par, Seq, Swap
from probcirc.semantics import SubStochMatrix


def netlist(c: Circuit):
    """Compile ``c`` into (number of inputs, gate list, output wire ids)."""
    gates = []
    counter = itertools.count()

    def fresh():
        return next(counter)

    def build(node, wires):
        if isinstance(node, Seq):
            return build(node.right, build(node.left, wires))
        if isinstance(node, Par):
            m1 = node.top.inputs
            return build(node.top, wires[:m1]) + build(node.bottom, wires[m1:])
        if isinstance(node, (Id, Id0)):
            return list(wires)
        if isinstance(node, Swap):
            return [wires[1], wires[0]]
        assert isinstance(node, Gen)
        if node.kind == "del":
            return []
        out = [fresh()]
        if node.kind == "copy":
            return [wires[0], wires[0]]
        gates.append((node.kind, node.param, list(wires), out[0]))
        return out

    inputs = [fresh() for _ in range(c.inputs)]
    outputs = build(c, inputs)
    return inputs, gates, outputs


def oracle_matrix(c: Circuit) -> SubStochMatrix:
    """Semantics by summing over every coin outcome, one input at a time."""
    inputs, gates, outputs = netlist(c)
    coins = [g for g in gates if g[0] == "flip"]
    m, n = len(inputs), len(outputs)
    rows = [[Fraction(0)] * (1 << m) for _ in range(1 << n)]
    for x in range(1 << m):
        for outcome in itertools.product((0, 1), repeat=len(coins)):
            value = {w: (x >> (m - 1 - i)) & 1 for i, w in enumerate(inputs)}
            weight = Fraction(1)
            coin_values = iter(outcome)
            ok = True
            for kind, param, args, out in gates:
                if kind == "flip":
                    b = next(coin_values)
                    weight *= param if b else 1 - param
                    value[out] = b
                elif kind == "and":
                    value[out] = value[args[0]] & value[args[1]]
                elif kind == "not":
                    value[out] = 1 - value[args[0]]
                elif kind == "cond":
                    if value[args[0]] != value[args[1]]:
                        ok = False
                        break
                    value[out] = value[args[0]]
            if not ok or weight == 0:
                continue
            y = 0
            for w in outputs:
                y = (y << 1) | value[w]
            rows[y][x] += weight
    return SubStochMatrix(m, n, rows)


# --- surface programs -------------------------------------------------------


def _flat(v) -> tuple[int, ...]:
    return (v,) if isinstance(v, int) else _flat(v[0]) + _flat(v[1])


def enumerate_program(program, inputs: dict | None = None) -> dict[tuple[int, ...], Fraction]:
    """Weighted outcomes of a program's main expression, ``{bits: weight}``.

    Values are nested tuples of ints.  Both branches of an ``if`` run (so
    their observations count) and the guard selects the value, matching how
    the circuit translation feeds both branches into a multiplexer.  Boolean
    operators are evaluated directly, so the program may be left unsugared.
    """
    from probcirc.dice import ast

    funcs = {f.name: f for f in program.functions}

    def run(e, env):
        """Yield (value, weight, ok) for every world of ``e``."""
        if isinstance(e, ast.Var):
            yield env[e.name], Fraction(1), True
        elif isinstance(e, ast.Const):
            yield int(e.value), Fraction(1), True
        elif isinstance(e, ast.Flip):
            if e.p:
                yield 1, e.p, True
            if e.p != 1:
                yield 0, 1 - e.p, True
        elif isinstance(e, ast.Pair):
            for a, wa, oka in run(e.first, env):
                for b, wb, okb in run(e.second, env):
                    yield (a, b), wa * wb, oka and okb
        elif isinstance(e, ast.Fst):
            for v, w, ok in run(e.arg, env):
                yield v[0], w, ok
        elif isinstance(e, ast.Snd):
            for v, w, ok in run(e.arg, env):
                yield v[1], w, ok
        elif isinstance(e, ast.Not):
            for v, w, ok in run(e.arg, env):
                yield 1 - v, w, ok
        elif isinstance(e, ast.BinOp):
            op = {"and": lambda a, b: a & b, "or": lambda a, b: a | b, "xor": lambda a, b: a ^ b}[e.op]
            for a, wa, oka in run(e.left, env):
                for b, wb, okb in run(e.right, env):
                    yield op(a, b), wa * wb, oka and okb
        elif isinstance(e, ast.If):
            for g, wg, okg in run(e.guard, env):
                for t, wt, okt in run(e.then, env):
                    for f, wf, okf in run(e.orelse, env):
                        yield (t if g else f), wg * wt * wf, okg and okt and okf
        elif isinstance(e, ast.Let):
            for v, wv, okv in run(e.bound, env):
                for r, wr, okr in run(e.body, {**env, e.name: v}):
                    yield r, wv * wr, okv and okr
        elif isinstance(e, ast.Observe):
            v = env[e.name]
            yield v, Fraction(1), v == 1
        elif isinstance(e, ast.Call):
            f = funcs[e.name]
            for a, wa, oka in run(e.arg, env):
                for r, wr, okr in run(f.body, {f.param: a}):
                    yield r, wa * wr, oka and okr
        else:  # pragma: no cover
            raise TypeError(e)

    out: dict[tuple[int, ...], Fraction] = {}
    for value, weight, ok in run(program.main, dict(inputs or {})):
        if ok and weight:
            key = _flat(value)
            out[key] = out.get(key, Fraction(0)) + weight
    return out
