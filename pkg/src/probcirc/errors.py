"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ProbCircError(Exception):
    """Base class for all errors raised by :mod:`probcirc`."""


class TypeMismatch(ProbCircError):
    """Two circuits (or program expressions) with incompatible types were joined."""

    def __init__(self, message: str, path: tuple[int, ...] = ()):
        self.path = tuple(path)
        where = f" at path {list(self.path)}" if self.path else ""
        super().__init__(f"{message}{where}")


class CapExceeded(ProbCircError):
    """Evaluation would need more matrix cells than the configured cap."""


class DimensionMismatch(ProbCircError):
    pass


class NotBoolean(ProbCircError):
    pass


class BadWire(ProbCircError):
    pass


class NotAJoint(ProbCircError):
    pass


class NotStochastic(ProbCircError):
    pass


class HasConditioning(ProbCircError):
    pass


class NotCausal(ProbCircError):
    pass


class SideConditionViolated(ProbCircError):
    pass


class MissingParam(ProbCircError):
    pass


class BadPath(ProbCircError):
    pass


class PatternMismatch(ProbCircError):
    pass


class ParseError(ProbCircError):
    """Syntax error in circuit text or program text, with a 1-based position."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"{message} (line {line}, column {column})")


class UnboundVariable(ProbCircError):
    pass


class ArityError(ProbCircError):
    pass
