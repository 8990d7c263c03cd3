"""Typing of surface programs.

Contexts are ordered lists of ``(name, type)``; a name refers to its rightmost
binding.
"""

from __future__ import annotations

from dataclasses import replace

from probcirc.dice import ast
from probcirc.errors import ArityError, TypeMismatch, UnboundVariable

Context = list[tuple[str, ast.DiceType]]


def lookup(ctx: Context, name: str) -> int:
    for i in range(len(ctx) - 1, -1, -1):
        if ctx[i][0] == name:
            return i
    raise UnboundVariable(f"unbound variable {name!r}")


def type_of(e: ast.Expr, ctx: Context, functions: dict[str, ast.FunDef]) -> ast.DiceType:
    if isinstance(e, ast.Var):
        return ctx[lookup(ctx, e.name)][1]
    if isinstance(e, (ast.Const, ast.Flip)):
        return ast.BOOL
    if isinstance(e, ast.Pair):
        return ast.ProdT(type_of(e.first, ctx, functions), type_of(e.second, ctx, functions))
    if isinstance(e, (ast.Fst, ast.Snd)):
        t = type_of(e.arg, ctx, functions)
        if not isinstance(t, ast.ProdT):
            which = "fst" if isinstance(e, ast.Fst) else "snd"
            raise TypeMismatch(f"{which} expects a pair, got {t}")
        return t.left if isinstance(e, ast.Fst) else t.right
    if isinstance(e, ast.If):
        g = type_of(e.guard, ctx, functions)
        if g != ast.BOOL:
            raise TypeMismatch(f"if guard must be B, got {g}")
        t1 = type_of(e.then, ctx, functions)
        t0 = type_of(e.orelse, ctx, functions)
        if t1 != t0:
            raise TypeMismatch(f"if branches differ: {t1} vs {t0}")
        return t1
    if isinstance(e, ast.Let):
        t = type_of(e.bound, ctx, functions)
        return type_of(e.body, ctx + [(e.name, t)], functions)
    if isinstance(e, ast.Observe):
        t = ctx[lookup(ctx, e.name)][1]
        if t != ast.BOOL:
            raise TypeMismatch(f"observe takes a B variable, {e.name!r} has type {t}")
        return t
    if isinstance(e, ast.Call):
        if e.name not in functions:
            raise UnboundVariable(f"function {e.name!r} is not defined before this call")
        f = functions[e.name]
        t = type_of(e.arg, ctx, functions)
        if t != f.param_type:
            raise ArityError(f"{e.name} expects an argument of type {f.param_type}, got {t}")
        return _return_type(f, functions)
    if isinstance(e, ast.Not):
        _expect_bool(type_of(e.arg, ctx, functions), "not")
        return ast.BOOL
    if isinstance(e, ast.BinOp):
        _expect_bool(type_of(e.left, ctx, functions), e.op)
        _expect_bool(type_of(e.right, ctx, functions), e.op)
        return ast.BOOL
    raise TypeError(f"not an expression: {e!r}")


def _expect_bool(t, op):
    if t != ast.BOOL:
        raise TypeMismatch(f"{op} expects B operands, got {t}")


def _return_type(f: ast.FunDef, functions) -> ast.DiceType:
    return type_of(f.body, [(f.param, f.param_type)], functions)


def typecheck_program(program: ast.Program) -> ast.Program:
    """Check every function (against only the functions defined before it) and main.

    Returns the program with ``main_type`` filled in.
    """
    seen: dict[str, ast.FunDef] = {}
    for f in program.functions:
        if f.name in seen:
            raise TypeMismatch(f"function {f.name!r} defined twice")
        t = type_of(f.body, [(f.param, f.param_type)], seen)
        if f.return_type is not None and t != f.return_type:
            raise TypeMismatch(f"{f.name} declared to return {f.return_type}, body has type {t}")
        seen[f.name] = f
    main_type = type_of(program.main, list(program.inputs), seen)
    return replace(program, main_type=main_type)
