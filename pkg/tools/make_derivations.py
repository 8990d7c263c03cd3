"""Regenerate the derivation files shipped in src/probcirc/data/derivations.

Each derivation is written out step by step and replayed by the checker before
it is saved.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from probcirc.axioms import derived_e5_sides
from probcirc.circuit import COND, COPY, DEL, ID, NOT, flatten, nest_par, nest_seq, seq_chain, flip
from probcirc.rewrite import Derivation, RewriteStep, apply_step, check_derivation, save_derivation
from probcirc.syntax import serialize

OUT = Path(__file__).resolve().parent.parent / "src" / "probcirc" / "data" / "derivations"


def at(i: int, n: int) -> list[int]:
    """Path to element ``i`` of a right-nested chain of length ``n``."""
    return [1] * i + ([0] if i < n - 1 else [])


class Builder:
    def __init__(self, start):
        self.start = flatten(start)
        self.term = self.start
        self.steps: list[RewriteStep] = []

    def chain_len(self, path=()):
        from probcirc.circuit import subterm_at

        return len(seq_chain(subterm_at(self.term, path)))

    def step(self, axiom, direction="LR", path=(), params=None, **loc):
        s = RewriteStep(axiom, direction, tuple(path), dict(params or {}), **loc)
        self.term = apply_step(self.term, s)
        self.steps.append(s)
        return self

    def show(self):
        print(serialize(self.term))
        for i, e in enumerate(seq_chain(self.term)):
            print(f"  [{i}] {serialize(e)}")

    def finish(self, end, name):
        d = Derivation(self.start, tuple(self.steps), flatten(end))
        res = check_derivation(d)
        if not res.ok:
            self.show()
            raise SystemExit(f"{name}: {res.error}")
        save_derivation(d, OUT / f"{name}.json")
        print(f"{name}: {len(self.steps)} steps ok")


def von_neumann(p=Fraction(1, 3)):
    """Flip p twice, constrain the first to differ from the second, keep the first."""
    q = 1 - p
    pj, qj = [p.numerator, p.denominator], [q.numerator, q.denominator]
    start = nest_seq([flip(p), COPY, nest_par([ID, nest_seq([nest_par([ID, nest_seq([flip(p), NOT])]), COND, DEL])])])
    b = Builder(start)
    b.step("E1", path=[1, 1, 1, 0, 1], params={"p": pj})
    # pull the inner chain of the second branch out to the top level
    b.step("Interchange", path=[1, 1], params={"at": 1, "top": 0, "bottom": 1})
    b.step("Interchange", path=[1, 1, 1], params={"at": 1, "top": 0, "bottom": 1})
    # slide the second coin in front of the copy, then in line with the first coin
    b.step("Interchange", "RL", window=(1, 2), params={"split": 1, "left": 1, "right": 2})
    b.step("Interchange", "RL", window=(0, 2), params={"split": 1, "left": 1, "right": 1})
    b.step("Interchange", path=[0], params={"at": 1, "top": 1, "bottom": 1})
    b.step("F4", window=(1, 2))
    b.step("A2r", "RL", window=(2, 2))
    b.step("Mult", params={"p": pj, "q": qj})
    b.finish(flip(Fraction(1, 2)), "vonneumann")




def derived_e5():
    r, p, q = Fraction(1, 2), Fraction(1, 4), Fraction(3, 4)
    lhs, rhs = derived_e5_sides(r, p, q, r * p + (1 - r) * q)
    b = Builder(lhs)
    # copy the guard coin and drop the copy again
    b.step("A2r", path=[1, 1, 1, 0, 0], insert=(1, 0))
    b.step("Interchange", path=[1, 1, 1, 0], params={"at": 1, "top": 2, "bottom": 0})
    # route the dropped copy to the bottom wire
    b.step("SymNat", path=[1, 1, 1, 1, 0], pwindow=(1, 3), params={"at": 1})
    b.step("Interchange", path=[1, 1, 1, 1, 0], params={"at": 1, "top": 1, "bottom": 2})
    # move the discard past the multiplexer: this is the left side of E2 followed by a discard
    b.step("Interchange", "RL", window=(5, 7), params={"split": 1, "left": 3, "right": 1})
    b.step("Interchange", path=at(5, 6), params={"at": 1, "top": 6, "bottom": 0})
    b.step("E2", window=(0, 6), params={"r": [1, 2], "p": [1, 4], "q": [3, 4]})
    # discard the second output of E2 and everything that only fed it
    b.step("SymNat", "RL", window=(6, 2), params={"at": 1})
    b.step("Interchange", "RL", window=(5, 2), params={"split": 1, "left": 1, "right": 1})
    b.step("Delete", path=at(5, 6) + [0])
    b.step("Interchange", "RL", window=(4, 2), params={"split": 1, "left": 2, "right": 2})
    b.step("A2l", path=at(4, 5) + [1, 1])
    b.step("Interchange", "RL", window=(3, 2), params={"split": 1, "left": 2, "right": 2})
    b.step("Interchange", "RL", window=(2, 2), params={"split": 1, "left": 2, "right": 2})
    b.step("Interchange", path=at(2, 3), params={"at": 2, "top": 1, "bottom": 0})
    b.step("Interchange", "RL", window=(1, 2), params={"split": 1, "left": 2, "right": 3})
    b.step("Interchange", "RL", path=at(1, 3) + [0], params={"split": 1, "left": 1, "right": 1})
    b.step("SymNat", "RL", path=at(1, 10) + [1, 0], params={"at": 1})
    b.step("Interchange", "RL", window=(0, 2), params={"split": 1, "left": 1, "right": 2})
    b.step("A2l", path=[0, 0])
    b.step("Interchange", "RL", path=[0, 1], params={"split": 1, "left": 1, "right": 2})
    b.step("A2l", path=[0, 1, 0], window=(1, 2))
    b.step("Interchange", "RL", window=(0, 2), params={"split": 1, "left": 1, "right": 1})
    b.finish(rhs, "derived_e5")


if __name__ == "__main__":
    von_neumann()
    derived_e5()
