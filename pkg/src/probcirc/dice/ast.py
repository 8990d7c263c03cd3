"""Abstract syntax of the surface language."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union


@dataclass(frozen=True)
class BoolT:
    @property
    def width(self) -> int:
        return 1

    def __str__(self) -> str:
        return "B"


@dataclass(frozen=True)
class ProdT:
    left: "DiceType"
    right: "DiceType"

    @property
    def width(self) -> int:
        return self.left.width + self.right.width

    def __str__(self) -> str:
        right = f"({self.right})" if isinstance(self.right, ProdT) else str(self.right)
        return f"{self.left} * {right}" if not isinstance(self.left, ProdT) else f"({self.left}) * {right}"


DiceType = Union[BoolT, ProdT]
BOOL = BoolT()


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Flip:
    p: Fraction


@dataclass(frozen=True)
class Pair:
    first: "Expr"
    second: "Expr"


@dataclass(frozen=True)
class Fst:
    arg: "Expr"


@dataclass(frozen=True)
class Snd:
    arg: "Expr"


@dataclass(frozen=True)
class If:
    guard: "Expr"
    then: "Expr"
    orelse: "Expr"


@dataclass(frozen=True)
class Let:
    name: str
    bound: "Expr"
    body: "Expr"


@dataclass(frozen=True)
class Observe:
    name: str


@dataclass(frozen=True)
class Call:
    name: str
    arg: "Expr"


# Boolean sugar; removed by ``desugar`` before typechecking/translation.
@dataclass(frozen=True)
class Not:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str  # "and" | "or" | "xor"
    left: "Expr"
    right: "Expr"


Expr = Union[Var, Const, Flip, Pair, Fst, Snd, If, Let, Observe, Call, Not, BinOp]


@dataclass(frozen=True)
class FunDef:
    name: str
    param: str
    param_type: DiceType
    body: Expr
    return_type: Optional[DiceType] = None


@dataclass(frozen=True)
class Program:
    functions: tuple[FunDef, ...]
    main: Expr
    inputs: tuple[tuple[str, DiceType], ...] = ()
    main_type: Optional[DiceType] = field(default=None, compare=False)

    @property
    def input_width(self) -> int:
        return sum(t.width for _, t in self.inputs)
