"""Exact semantics, normal forms and equational reasoning for probabilistic circuits."""

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
    CircType,
    Gen,
    Id,
    Id0,
    Par,
    Seq,
    Swap,
    flatten,
    flip,
    typecheck,
)
from probcirc.errors import ProbCircError
from probcirc.normalform import (
    bayes_inverse,
    eliminate_conditioning,
    equiv,
    from_matrix,
    is_normal_form,
    normal_form,
)
from probcirc.semantics import ProjClass, SubStochMatrix, canonical_class, evaluate, prop_equal
from probcirc.syntax import parse_circuit, serialize

__all__ = [
    "AND",
    "COND",
    "COPY",
    "DEL",
    "ID",
    "ID0",
    "NOT",
    "SWAP",
    "CircType",
    "Circuit",
    "Gen",
    "Id",
    "Id0",
    "Par",
    "ProbCircError",
    "ProjClass",
    "Seq",
    "SubStochMatrix",
    "Swap",
    "bayes_inverse",
    "canonical_class",
    "eliminate_conditioning",
    "equiv",
    "evaluate",
    "flatten",
    "flip",
    "from_matrix",
    "is_normal_form",
    "normal_form",
    "parse_circuit",
    "prop_equal",
    "serialize",
    "typecheck",
]
