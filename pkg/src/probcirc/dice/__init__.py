"""A small first-order probabilistic language compiled to circuits."""

from probcirc.dice.parser import desugar, parse_program
from probcirc.dice.translate import infer, infer_json, inline_calls, translate
from probcirc.dice.typecheck import typecheck_program

__all__ = [
    "desugar",
    "infer",
    "infer_json",
    "inline_calls",
    "parse_program",
    "translate",
    "typecheck_program",
]
