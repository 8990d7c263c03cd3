"""Applying rules at located subterms, and replaying derivations.

Terms are kept flattened (right-nested chains, unit identities dropped), so a
location is a path of child selectors (0 = left/top, 1 = right/bottom) into the
flattened tree, optionally narrowed to a contiguous window of the sequential
chain (``window``) or parallel chain (``pwindow``) rooted there.  A rule whose
source side is a bare identity is applied right-to-left by ``insert``: the
target is spliced into the chain at a cut, on a chosen band of wires.

Structural rules take integer split parameters:

* ``Interchange`` LR on ``(a;b)⊗(c;d)``: ``at`` splits the parallel chain into
  the two factors, ``top`` and ``bottom`` split their sequential chains.
* ``Interchange`` RL on ``(a⊗c);(b⊗d)``: ``split`` cuts the window, ``left`` and
  ``right`` split each half into its top and bottom factor.  A half made of
  several chain elements counts as a single parallel item.
* ``SymNat``: ``at`` splits the parallel element next to the swap.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from probcirc import gates
from probcirc.axioms import CATALOG, complete_params, rule
from probcirc.circuit import (
    ID0,
    SWAP,
    Circuit,
    Par,
    Seq,
    flatten,
    identity,
    is_boolean,
    is_causal,
    nest_par,
    nest_seq,
    par_chain,
    replace_at,
    seq_chain,
    subterm_at,
)
from probcirc.errors import BadPath, MissingParam, PatternMismatch, ProbCircError, SideConditionViolated
from probcirc.semantics import DEFAULT_CAP, canonical_class, evaluate
from probcirc.syntax import format_rational, parse_circuit, serialize

DIRECTIONS = ("LR", "RL")


@dataclass(frozen=True)
class RewriteStep:
    axiom: str
    direction: str = "LR"
    path: tuple[int, ...] = ()
    params: dict = field(default_factory=dict, hash=False)
    window: tuple[int, int] | None = None
    pwindow: tuple[int, int] | None = None
    insert: tuple[int, int] | None = None
    with_: str | None = None  # target circuit for schematic rules that need one

    def to_json(self) -> dict:
        out: dict = {"axiom": self.axiom, "dir": self.direction, "path": list(self.path)}
        if self.params:
            out["params"] = {k: _param_json(v) for k, v in self.params.items()}
        for name in ("window", "pwindow", "insert"):
            value = getattr(self, name)
            if value is not None:
                out[name] = list(value)
        if self.with_ is not None:
            out["with"] = self.with_
        return out

    @classmethod
    def from_json(cls, data: dict) -> "RewriteStep":
        def pair(key):
            value = data.get(key)
            return None if value is None else (int(value[0]), int(value[1]))

        return cls(
            axiom=data["axiom"],
            direction=data.get("dir", "LR"),
            path=tuple(int(i) for i in data.get("path", ())),
            params=dict(data.get("params", {})),
            window=pair("window"),
            pwindow=pair("pwindow"),
            insert=pair("insert"),
            with_=data.get("with"),
        )


def _param_json(value):
    if isinstance(value, Fraction):
        return [value.numerator, value.denominator]
    return value


@dataclass(frozen=True)
class Derivation:
    start: Circuit
    steps: tuple[RewriteStep, ...]
    end: Circuit

    def to_json(self) -> dict:
        return {
            "start": serialize(self.start),
            "end": serialize(self.end),
            "steps": [s.to_json() for s in self.steps],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Derivation":
        return cls(
            parse_circuit(data["start"]),
            tuple(RewriteStep.from_json(s) for s in data["steps"]),
            parse_circuit(data["end"]),
        )


def load_derivation(path) -> Derivation:
    return Derivation.from_json(json.loads(Path(path).read_text()))


def dump_derivation(d: Derivation) -> str:
    """JSON text with one step per line."""
    data = d.to_json()
    steps = ",\n".join("  " + json.dumps(s, ensure_ascii=False) for s in data["steps"])
    return (
        "{\n"
        f' "start": {json.dumps(data["start"])},\n'
        f' "end": {json.dumps(data["end"])},\n'
        f' "steps": [\n{steps}\n ]\n'
        "}\n"
    )


def save_derivation(d: Derivation, path) -> None:
    Path(path).write_text(dump_derivation(d))


# ------------------------------------------------------------------ locating


def _int_param(params: dict, name: str, default: int | None = None) -> int:
    if name not in params:
        if default is None:
            raise MissingParam(f"structural step needs integer parameter {name!r}")
        return default
    value = params[name]
    if isinstance(value, (list, tuple)):
        if int(value[1]) != 1:
            raise SideConditionViolated(f"{name} must be an integer")
        value = value[0]
    return int(value)


def _window(items: list[Circuit], window: tuple[int, int] | None, what: str) -> tuple[int, int]:
    if window is None:
        return 0, len(items)
    start, length = window
    if start < 0 or length < 1 or start + length > len(items):
        raise BadPath(f"{what} window {list(window)} out of range for a chain of {len(items)}")
    return start, length


def _select(term: Circuit, step: RewriteStep):
    """The addressed subterm and a function rebuilding the term around a replacement."""
    try:
        node = subterm_at(term, step.path)
    except BadPath as e:
        raise BadPath(f"{e}") from None
    if step.window is not None and step.pwindow is not None:
        raise BadPath("a step takes either a window or a pwindow, not both")
    if step.pwindow is not None:
        items = par_chain(node)
        s, n = _window(items, step.pwindow, "parallel")
        sub = nest_par(items[s : s + n])

        def rebuild(new):
            return replace_at(term, step.path, nest_par(items[:s] + [new] + items[s + n :]))

        return sub, rebuild
    items = seq_chain(node)
    s, n = _window(items, step.window, "sequential")
    sub = nest_seq(items[s : s + n])

    def rebuild(new):
        return replace_at(term, step.path, nest_seq(items[:s] + [new] + items[s + n :]))

    return sub, rebuild


def _insert(term: Circuit, step: RewriteStep, target: Circuit) -> Circuit:
    node = subterm_at(term, step.path)
    items = seq_chain(node)
    cut, wire = step.insert
    if not 0 <= cut <= len(items):
        raise BadPath(f"insertion cut {cut} out of range for a chain of {len(items)}")
    width = node.inputs if cut == 0 else items[cut - 1].outputs
    if not 0 <= wire or wire + target.inputs > width:
        raise BadPath(f"insertion on wires {wire}..{wire + target.inputs - 1} but the cut has {width} wires")
    layer = nest_par([p for p in (identity(wire), target, identity(width - wire - target.inputs)) if p is not ID0] or [ID0])
    return replace_at(term, step.path, nest_seq(items[:cut] + [layer] + items[cut:]))


# ---------------------------------------------------------- structural rules


def _mismatch(rule_name: str, expected: str, found: Circuit) -> PatternMismatch:
    return PatternMismatch(f"{rule_name}: expected {expected}, found {serialize(found)}")


def _split_par(items: list[Circuit], k: int, what: str) -> tuple[Circuit | None, Circuit | None]:
    if not 0 <= k <= len(items):
        raise SideConditionViolated(f"{what} split {k} out of range 0..{len(items)}")
    top = nest_par(items[:k]) if k else None
    bottom = nest_par(items[k:]) if k < len(items) else None
    return top, bottom


def _split_seq(c: Circuit, k: int, what: str) -> tuple[Circuit, Circuit]:
    items = seq_chain(c)
    if not 0 <= k <= len(items):
        raise SideConditionViolated(f"{what} split {k} out of range 0..{len(items)}")
    first = nest_seq(items[:k]) if k else identity(c.inputs)
    second = nest_seq(items[k:]) if k < len(items) else identity(c.outputs)
    return first, second


def _interchange_lr(sub: Circuit, params: dict) -> Circuit:
    items = par_chain(sub)
    if len(items) < 2:
        raise _mismatch("Interchange", "a parallel composition (a;b)⊗(c;d)", sub)
    top, bottom = _split_par(items, _int_param(params, "at", 1), "at")
    if top is None or bottom is None:
        raise SideConditionViolated("Interchange: both parallel factors must be non-empty")
    a, b = _split_seq(top, _int_param(params, "top"), "top")
    c, d = _split_seq(bottom, _int_param(params, "bottom"), "bottom")
    return Seq(Par(a, c), Par(b, d))


def _half(elements: list[Circuit], k: int, what: str):
    items = par_chain(elements[0]) if len(elements) == 1 else [nest_seq(elements)]
    return _split_par(items, k, what)


def _interchange_rl(sub: Circuit, params: dict) -> Circuit:
    elements = seq_chain(sub)
    if len(elements) < 2:
        raise _mismatch("Interchange", "a sequential composition (a⊗c);(b⊗d)", sub)
    s = _int_param(params, "split", 1)
    if not 1 <= s < len(elements):
        raise SideConditionViolated(f"Interchange: split {s} out of range 1..{len(elements) - 1}")
    a, c = _half(elements[:s], _int_param(params, "left"), "left")
    b, d = _half(elements[s:], _int_param(params, "right"), "right")
    # an empty factor is the identity on the wires its partner needs
    if a is None:
        a = identity(b.inputs if b is not None else 0)
    if b is None:
        b = identity(a.outputs)
    if c is None:
        c = identity(d.inputs if d is not None else 0)
    if d is None:
        d = identity(c.outputs)
    if a.outputs != b.inputs or c.outputs != d.inputs:
        raise PatternMismatch(
            f"Interchange: factors do not line up ({a.type} then {b.type}, {c.type} then {d.type})"
        )
    return Par(Seq(a, b), Seq(c, d))


def _swap_chain(a: int, b: int) -> list[Circuit]:
    sw = flatten(gates.swap_bundle(a, b))
    return [] if sw.inputs == 0 or _is_identity(sw) else seq_chain(sw)


def _is_identity(c: Circuit) -> bool:
    return all(e == identity(1) or e is ID0 for e in par_chain(c))


def _symnat_lr(sub: Circuit, params: dict) -> Circuit:
    elements = seq_chain(sub)
    c, d = _split_par(par_chain(elements[0]), _int_param(params, "at", 1), "at")
    if c is None or d is None:
        raise SideConditionViolated("SymNat: both parallel factors must be non-empty")
    expected = _swap_chain(c.outputs, d.outputs)
    if elements[1:] != expected:
        raise _mismatch("SymNat", f"(c⊗d) followed by the swap of {c.outputs} and {d.outputs} wires", sub)
    return Seq(gates.swap_bundle(c.inputs, d.inputs), Par(d, c))


def _symnat_rl(sub: Circuit, params: dict) -> Circuit:
    elements = seq_chain(sub)
    d, c = _split_par(par_chain(elements[-1]), _int_param(params, "at", 1), "at")
    if c is None or d is None:
        raise SideConditionViolated("SymNat: both parallel factors must be non-empty")
    expected = _swap_chain(c.inputs, d.inputs)
    if elements[:-1] != expected:
        raise _mismatch("SymNat", f"the swap of {c.inputs} and {d.inputs} wires followed by (d⊗c)", sub)
    return Seq(Par(c, d), gates.swap_bundle(c.outputs, d.outputs))


def _with(step: RewriteStep) -> Circuit:
    if step.with_ is None:
        raise MissingParam(f"{step.axiom} {step.direction} needs a 'with' circuit")
    return parse_circuit(step.with_)


def _delete(sub: Circuit, step: RewriteStep) -> Circuit:
    if step.direction == "RL":
        c = _with(step)
        if flatten(gates.discard(c.inputs)) != flatten(sub):
            raise _mismatch("Delete", f"a discard of {c.inputs} wires", sub)
        if not is_causal(c):
            raise SideConditionViolated("Delete needs a conditioning-free circuit")
        return Seq(c, gates.discard(c.outputs))
    elements = seq_chain(sub)
    if len(elements) >= 2 and elements[-1] == flatten(gates.discard(elements[-1].inputs)):
        c = nest_seq(elements[:-1])
    elif sub.outputs == 0:
        c = sub
    else:
        raise _mismatch("Delete", "c followed by a full discard", sub)
    if not is_causal(c):
        raise SideConditionViolated("Delete needs a conditioning-free circuit")
    return gates.discard(c.inputs)


def _copy_bool(sub: Circuit, step: RewriteStep) -> Circuit:
    elements = seq_chain(sub)
    if step.direction == "LR":
        if sub.outputs % 2:
            raise _mismatch("CopyBool", "c followed by a copy bundle", sub)
        n = sub.outputs // 2
        tail = seq_chain(flatten(gates.copy_bundle(n)))
        if len(elements) <= len(tail) or elements[-len(tail) :] != tail:
            raise _mismatch("CopyBool", f"c followed by copy_bundle({n})", sub)
        c = nest_seq(elements[: -len(tail)])
        if not is_boolean(c):
            raise SideConditionViolated("CopyBool needs a Boolean circuit")
        return Seq(gates.copy_bundle(c.inputs), Par(c, c))
    m = sub.inputs
    head = seq_chain(flatten(gates.copy_bundle(m))) if m else []
    if elements[: len(head)] != head or len(elements) != len(head) + 1:
        raise _mismatch("CopyBool", f"copy_bundle({m}) followed by c⊗c", sub)
    items = par_chain(elements[-1])
    for k in range(1, len(items)):
        c, c2 = nest_par(items[:k]), nest_par(items[k:])
        if c == c2:
            if not is_boolean(c):
                raise SideConditionViolated("CopyBool needs a Boolean circuit")
            return Seq(c, gates.copy_bundle(c.outputs))
    raise _mismatch("CopyBool", "two equal parallel copies", sub)


def _fail(sub: Circuit, step: RewriteStep) -> Circuit:
    if step.direction == "RL":
        c = _with(step)
        if flatten(gates.failure_circuit(c.inputs, c.outputs)) != flatten(sub):
            raise _mismatch("Fail", f"failure_circuit({c.inputs}, {c.outputs})", sub)
        source, target = sub, c
        check = c
    else:
        source, target = sub, gates.failure_circuit(sub.inputs, sub.outputs)
        check = source
    if not evaluate(check).is_zero():
        raise SideConditionViolated("Fail needs a circuit with zero semantics")
    return target


def _bool(sub: Circuit, step: RewriteStep) -> Circuit:
    d = _with(step)
    if not (is_boolean(sub) and is_boolean(d)):
        raise SideConditionViolated("Bool needs Boolean circuits on both sides")
    if sub.type != d.type or evaluate(sub) != evaluate(d):
        raise SideConditionViolated("Bool needs equal truth tables")
    return d


def _structural(sub: Circuit, step: RewriteStep) -> Circuit:
    tag, params = step.axiom, step.params
    if tag == "SeqAssoc":
        if len(seq_chain(sub)) < 3:
            raise _mismatch("SeqAssoc", "a sequential chain of at least three terms", sub)
        return sub
    if tag == "ParAssoc":
        if len(par_chain(sub)) < 3:
            raise _mismatch("ParAssoc", "a parallel chain of at least three terms", sub)
        return sub
    if tag in ("SeqUnit", "ParUnit"):
        # the units are invisible once the term is flattened
        return sub
    if tag == "Interchange":
        return _interchange_lr(sub, params) if step.direction == "LR" else _interchange_rl(sub, params)
    if tag == "SymNat":
        return _symnat_lr(sub, params) if step.direction == "LR" else _symnat_rl(sub, params)
    if tag == "SymInv":
        if step.direction == "LR":
            if flatten(sub) != flatten(Seq(SWAP, SWAP)):
                raise _mismatch("SymInv", "swap;swap", sub)
            return identity(2)
        raise PatternMismatch("SymInv RL inserts swap;swap; use an insert location")
    if tag == "Delete":
        return _delete(sub, step)
    if tag == "CopyBool":
        return _copy_bool(sub, step)
    if tag == "Fail":
        return _fail(sub, step)
    if tag == "Bool":
        return _bool(sub, step)
    raise KeyError(tag)


# ------------------------------------------------------------------- steps


def _concrete_sides(step: RewriteStep) -> tuple[Circuit, Circuit]:
    r = rule(step.axiom)
    full = complete_params(step.axiom, step.params)
    lhs, rhs = r.sides(full)
    return (lhs, rhs) if step.direction == "LR" else (rhs, lhs)


def apply_step(term: Circuit, step: RewriteStep) -> Circuit:
    """Rewrite the addressed subterm of ``flatten(term)`` and return the flattened result."""
    if step.axiom not in CATALOG:
        raise PatternMismatch(f"unknown axiom {step.axiom!r}")
    if step.direction not in DIRECTIONS:
        raise PatternMismatch(f"direction must be LR or RL, got {step.direction!r}")
    term = flatten(term)
    r = rule(step.axiom)
    if step.insert is not None:
        if r.schematic:
            if step.axiom != "SymInv" or step.direction != "RL":
                raise PatternMismatch(f"{step.axiom} {step.direction} cannot be inserted")
            target = Seq(SWAP, SWAP)
        else:
            source, target = _concrete_sides(step)
            source = flatten(source)
            if not _is_identity(source):
                raise PatternMismatch(
                    f"{step.axiom} {step.direction}: only an identity source can be inserted, "
                    f"source is {serialize(source)}"
                )
        return flatten(_insert(term, step, target))
    sub, rebuild = _select(term, step)
    if r.schematic:
        return flatten(rebuild(_structural(sub, step)))
    source, target = _concrete_sides(step)
    source = flatten(source)
    if flatten(sub) != source:
        raise PatternMismatch(
            f"{step.axiom} {step.direction}: expected {serialize(source)}, found {serialize(sub)}"
        )
    return flatten(rebuild(target))


# -------------------------------------------------------------- derivations


class DerivationError(ProbCircError):
    def __init__(self, step: int, cause: Exception):
        super().__init__(f"step {step}: {type(cause).__name__}: {cause}")
        self.step = step
        self.cause = cause


@dataclass
class DerivationResult:
    ok: bool
    trace: list[dict]
    error: str | None = None
    failed_step: int | None = None
    final: Circuit | None = None

    def to_json(self) -> dict:
        out = {"ok": self.ok, "trace": self.trace}
        if self.error is not None:
            out["error"] = self.error
            out["failed_step"] = self.failed_step
        return out


def _class_json(c: Circuit, cap: int) -> dict:
    cls = canonical_class(evaluate(c, cap))
    if cls.is_bottom:
        return {"class": "bottom"}
    from probcirc.semantics import distribution

    return {"class": "canonical", "dist": {k: format_rational(v) for k, v in distribution(cls.matrix).items()}}


def check_derivation(d: Derivation, cap: int = DEFAULT_CAP, audit: bool = True) -> DerivationResult:
    """Replay ``d``; ok iff every step applies, every intermediate term has the
    starting class (when ``audit``) and the last term is ``flatten(d.end)``.

    Step indices in the trace and in errors are 0-based.
    """
    term = flatten(d.start)
    start_class = canonical_class(evaluate(term, cap)) if audit else None
    trace = [{"step": None, "term": serialize(term), **(_class_json(term, cap) if audit else {})}]
    for i, step in enumerate(d.steps):
        try:
            term = apply_step(term, step)
        except (ProbCircError, KeyError, ValueError) as e:
            err = DerivationError(i, e)
            return DerivationResult(False, trace, str(err), i, term)
        entry = {"step": i, "axiom": step.axiom, "dir": step.direction, "term": serialize(term)}
        if audit:
            entry.update(_class_json(term, cap))
            if canonical_class(evaluate(term, cap)) != start_class:
                return DerivationResult(False, trace + [entry], f"step {i}: class changed", i, term)
        trace.append(entry)
    end = flatten(d.end)
    if term != end:
        return DerivationResult(
            False,
            trace,
            f"final term {serialize(term)} differs from the stated end {serialize(end)}",
            len(d.steps),
            term,
        )
    return DerivationResult(True, trace, final=term)


def shipped_derivations() -> dict[str, Path]:
    """The derivation files bundled with the package, by stem."""
    root = Path(__file__).parent / "data" / "derivations"
    return {p.stem: p for p in sorted(root.glob("*.json"))}
