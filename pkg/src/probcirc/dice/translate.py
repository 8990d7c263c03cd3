"""Translation of surface programs into circuits.

A context ``x_1 : t_1, ..., x_k : t_k`` becomes ``|t_1| + ... + |t_k|`` wires,
and an expression of type ``t`` in that context becomes a circuit from the
context wires to ``|t|`` wires.
"""

from __future__ import annotations

from dataclasses import replace

from probcirc import gates
from probcirc.circuit import COND, ID, Circuit, flip, identity, nest_par
from probcirc.dice import ast
from probcirc.dice.parser import desugar, fresh_name
from probcirc.dice.typecheck import Context, lookup, type_of, typecheck_program
from probcirc.semantics import DEFAULT_CAP, ProjClass, canonical_class, distribution, evaluate


def _width(ctx: Context) -> int:
    return sum(t.width for _, t in ctx)


def rename(e: ast.Expr, old: str, new: str) -> ast.Expr:
    """Rename free occurrences of ``old`` to ``new`` (respecting let-shadowing)."""
    if isinstance(e, ast.Var):
        return ast.Var(new) if e.name == old else e
    if isinstance(e, ast.Observe):
        return ast.Observe(new) if e.name == old else e
    if isinstance(e, (ast.Const, ast.Flip)):
        return e
    if isinstance(e, ast.Let):
        body = e.body if e.name == old else rename(e.body, old, new)
        return ast.Let(e.name, rename(e.bound, old, new), body)
    if isinstance(e, ast.Pair):
        return ast.Pair(rename(e.first, old, new), rename(e.second, old, new))
    if isinstance(e, (ast.Fst, ast.Snd, ast.Not)):
        return type(e)(rename(e.arg, old, new))
    if isinstance(e, ast.If):
        return ast.If(*(rename(x, old, new) for x in (e.guard, e.then, e.orelse)))
    if isinstance(e, ast.BinOp):
        return ast.BinOp(e.op, rename(e.left, old, new), rename(e.right, old, new))
    if isinstance(e, ast.Call):
        return ast.Call(e.name, rename(e.arg, old, new))
    raise TypeError(f"not an expression: {e!r}")


def inline_expr(e: ast.Expr, functions: dict[str, ast.FunDef]) -> ast.Expr:
    """Replace each call ``f(a)`` by ``let p' = a in body_f[p := p']``."""
    if isinstance(e, ast.Call):
        f = functions[e.name]
        param = fresh_name(f.param)
        body = inline_expr(rename(f.body, f.param, param), functions)
        return ast.Let(param, inline_expr(e.arg, functions), body)
    if isinstance(e, (ast.Var, ast.Const, ast.Flip, ast.Observe)):
        return e
    if isinstance(e, ast.Let):
        return ast.Let(e.name, inline_expr(e.bound, functions), inline_expr(e.body, functions))
    if isinstance(e, ast.Pair):
        return ast.Pair(inline_expr(e.first, functions), inline_expr(e.second, functions))
    if isinstance(e, (ast.Fst, ast.Snd, ast.Not)):
        return type(e)(inline_expr(e.arg, functions))
    if isinstance(e, ast.If):
        return ast.If(*(inline_expr(x, functions) for x in (e.guard, e.then, e.orelse)))
    if isinstance(e, ast.BinOp):
        return ast.BinOp(e.op, inline_expr(e.left, functions), inline_expr(e.right, functions))
    raise TypeError(f"not an expression: {e!r}")


def inline_calls(program: ast.Program) -> ast.Program:
    functions: dict[str, ast.FunDef] = {}
    for f in program.functions:
        functions[f.name] = f
    return replace(program, main=inline_expr(program.main, functions), functions=())


def translate_expr(e: ast.Expr, ctx: Context) -> Circuit:
    g = _width(ctx)
    if isinstance(e, ast.Var):
        i = lookup(ctx, e.name)
        before = sum(t.width for _, t in ctx[:i])
        w = ctx[i][1].width
        parts = [gates.discard(before), identity(w), gates.discard(g - before - w)]
        return nest_par([p for p in parts if p.type.inputs or p.type.outputs])
    if isinstance(e, ast.Const):
        return gates.discard(g) >> (gates.TRUE if e.value else gates.FALSE)
    if isinstance(e, ast.Flip):
        return gates.discard(g) >> flip(e.p)
    if isinstance(e, ast.Pair):
        return gates.copy_bundle(g) >> (translate_expr(e.first, ctx) @ translate_expr(e.second, ctx))
    if isinstance(e, (ast.Fst, ast.Snd)):
        t = type_of(e.arg, ctx, {})
        inner = translate_expr(e.arg, ctx)
        if isinstance(e, ast.Fst):
            keep = identity(t.left.width) @ gates.discard(t.right.width)
        else:
            keep = gates.discard(t.left.width) @ identity(t.right.width)
        return inner >> keep
    if isinstance(e, ast.If):
        w = type_of(e.then, ctx, {}).width
        branches = nest_par([translate_expr(x, ctx) for x in (e.guard, e.then, e.orelse)])
        return gates.copy_bundle(g, 3) >> branches >> gates.mux_n(w)
    if isinstance(e, ast.Let):
        t = type_of(e.bound, ctx, {})
        extend = gates.copy_bundle(g) >> (identity(g) @ translate_expr(e.bound, ctx))
        return extend >> translate_expr(e.body, ctx + [(e.name, t)])
    if isinstance(e, ast.Observe):
        return translate_expr(ast.Var(e.name), ctx) >> (ID @ gates.TRUE) >> COND
    raise TypeError(f"cannot translate {type(e).__name__}; desugar and inline first")


def translate(program: ast.Program) -> Circuit:
    """Circuit ``|inputs| -> |main|`` for a (desugared) program."""
    program = desugar(program)
    typecheck_program(program)
    flat = inline_calls(program)
    return translate_expr(flat.main, list(flat.inputs))


def infer(program: ast.Program, cap: int = DEFAULT_CAP) -> ProjClass:
    return canonical_class(evaluate(translate(program), cap))


def infer_json(program: ast.Program, cap: int = DEFAULT_CAP) -> dict:
    cls = infer(program, cap)
    if cls.is_bottom:
        return {"class": "bottom"}
    dist = distribution(cls.matrix)
    return {"class": "canonical", "dist": {k: [v.numerator, v.denominator] for k, v in dist.items()}}
