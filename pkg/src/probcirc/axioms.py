"""The equational theory as data.

Each rule has a tag, a list of rational parameters, a builder producing the
two sides as concrete circuits, and a sampler for the soundness harness.
Structural rules (the symmetric monoidal laws and the derived schematic
lemmas) quantify over circuits; their sides are built from sampled
metavariables.
"""

from __future__ import annotations

import random as _random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from probcirc import gates
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
    Par,
    Seq,
    as_rational,
    flip,
    identity,
    is_boolean,
    is_causal,
    nest_par,
    nest_seq,
)
from probcirc.errors import MissingParam, SideConditionViolated
from probcirc.gates import FALSE, FLIP_BOT, MUX, TRUE, permutation, swap_bundle
from probcirc.random import random_circuit, random_rat
from probcirc.semantics import canonical_class, evaluate, prop_equal

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)

# ASCII spellings accepted for the tilde parameters of E2 and E3
ALIASES = {"p̃": "pt", "q̃": "qt", "r̃": "rt", "p~": "pt", "q~": "qt", "r~": "rt"}


def _par(*items: Circuit) -> Circuit:
    return nest_par(list(items))


def _seq(*items: Circuit) -> Circuit:
    return nest_seq(list(items))


def select(p) -> Circuit:
    """``(a, x) -> if a then flip p else x``."""
    return _seq(_par(ID, flip(p), ID), MUX)


def convex(p) -> Circuit:
    """``(x0, x1) -> p|x0> + (1-p)|x1>``."""
    return _seq(_par(flip(p), ID, ID), MUX)


def branch(p, q) -> Circuit:
    """``y -> if y then flip p else flip q``."""
    return _seq(_par(ID, flip(p), flip(q)), MUX)


# ---------------------------------------------------------------- E-block sides


def e2_sides(r, p, q, rt, pt, qt) -> tuple[Circuit, Circuit]:
    # inputs (a, x1, x2); the guard g ~ flip r picks between the two selects
    lhs = _seq(
        _par(COPY, ID, ID),
        _par(ID, SWAP, ID),
        _par(select(p), select(q)),
        _par(_seq(flip(r), COPY), ID, ID),
        _par(ID, swap_bundle(1, 2)),
        _par(MUX, ID),
    )
    # (a', g', ...) feed the second output, (a, g, x1, x2) the first
    rhs = _seq(
        _par(COPY, _seq(flip(r), COPY), ID, ID),
        _par(ID, SWAP, ID, ID, ID),
        _par(ID, ID, ID, MUX),
        _par(ID, ID, select(rt)),
        _par(ID, ID, COPY),
        _par(_seq(_par(ID, SWAP), _par(ID, branch(pt, qt), ID), MUX), ID),
        SWAP,
    )
    return lhs, rhs


def derived_e5_sides(r, p, q, rt) -> tuple[Circuit, Circuit]:
    lhs = _seq(
        _par(COPY, ID, ID),
        _par(ID, SWAP, ID),
        _par(select(p), select(q)),
        _par(flip(r), ID, ID),
        MUX,
    )
    rhs = _seq(_par(ID, _seq(_par(flip(r), ID, ID), MUX)), select(rt))
    return lhs, rhs


def e3_sides(p, q, pt, qt) -> tuple[Circuit, Circuit]:
    lhs = _seq(_par(convex(q), ID), convex(p))
    rhs = _seq(_par(ID, convex(qt)), convex(pt))
    return lhs, rhs


def e4_sides(p, q) -> tuple[Circuit, Circuit]:
    # inputs (x0, x1, x2, x3); output (g, if g then (if h then x0 else x2) else (if h then x1 else x3))
    lhs = _seq(
        _par(_seq(flip(q), COPY), _seq(flip(p), COPY), identity(4)),
        permutation([1, 0, 2, 4, 6, 3, 5, 7]),
        _par(ID, ID, MUX, MUX),
        _par(ID, MUX),
    )
    rhs = _seq(
        _par(_seq(flip(q), COPY), identity(4)),
        permutation([0, 1, 2, 4, 3, 5]),
        _par(ID, ID, convex(p), convex(p)),
        _par(ID, MUX),
    )
    return lhs, rhs


def f7_sides(p0, p1, p2, r) -> tuple[Circuit, Circuit]:
    lhs = _seq(flip(p0), COPY, _par(ID, branch(p1, p2)), COND)
    return lhs, flip(r)


# ------------------------------------------------------------- side conditions


def e2_params(params: dict) -> dict:
    r, p, q = (params[k] for k in ("r", "p", "q"))
    rt = r * p + (1 - r) * q
    if "rt" in params and params["rt"] != rt:
        raise SideConditionViolated(f"E2 needs r~ = rp+(1-r)q = {rt}, got {params['rt']}")
    out = {"r": r, "p": p, "q": q, "rt": rt}
    for name, degenerate, value in (
        ("pt", rt == 0, None if rt == 0 else r * p / rt),
        ("qt", rt == 1, None if rt == 1 else r * (1 - p) / (1 - rt)),
    ):
        given = params.get(name)
        if degenerate:
            out[name] = ZERO if given is None else given
        else:
            formula = "p~ = rp/r~" if name == "pt" else "q~ = r(1-p)/(1-r~)"
            if given is not None and given != value:
                raise SideConditionViolated(f"E2 needs {formula} = {value}, got {given}")
            out[name] = value
    return out


def e3_params(params: dict) -> dict:
    p, q = params["p"], params["q"]
    if p * q == 1:
        raise SideConditionViolated("E3 needs pq != 1")
    pt = p * q
    qt = p * (1 - q) / (1 - p * q)
    for name, value, formula in (("pt", pt, "p~ = pq"), ("qt", qt, "q~ = p(1-q)/(1-pq)")):
        if name in params and params[name] != value:
            raise SideConditionViolated(f"E3 needs {formula} = {value}, got {params[name]}")
    return {"p": p, "q": q, "pt": pt, "qt": qt}


def f7_params(params: dict) -> dict:
    p0, p1, p2 = params["p0"], params["p1"], params["p2"]
    norm = p0 * p1 + (1 - p0) * (1 - p2)
    if norm == 0:
        raise SideConditionViolated("F7 needs p0p1+(1-p0)(1-p2) != 0")
    r = p0 * p1 / norm
    if "r" in params and params["r"] != r:
        raise SideConditionViolated(f"F7 needs r = p0p1/(p0p1+(1-p0)(1-p2)) = {r}, got {params['r']}")
    return {"p0": p0, "p1": p1, "p2": p2, "r": r}


def mult_params(params: dict) -> dict:
    p, q = params["p"], params["q"]
    norm = p * q + (1 - p) * (1 - q)
    if norm == 0:
        raise SideConditionViolated("mult needs pq+(1-p)(1-q) != 0")
    r = p * q / norm
    if "r" in params and params["r"] != r:
        raise SideConditionViolated(f"mult needs r = pq/(pq+(1-p)(1-q)) = {r}, got {params['r']}")
    return {"p": p, "q": q, "r": r}


def derived_e5_params(params: dict) -> dict:
    r, p, q = params["r"], params["p"], params["q"]
    rt = r * p + (1 - r) * q
    if "rt" in params and params["rt"] != rt:
        raise SideConditionViolated(f"derived E5 needs r~ = rp+(1-r)q = {rt}, got {params['rt']}")
    return {"r": r, "p": p, "q": q, "rt": rt}


# ----------------------------------------------------------------- the catalog


@dataclass(frozen=True)
class Rule:
    tag: str
    group: str  # "SMC", "A".."F", or "derived"
    params: tuple[str, ...] = ()
    sides: Callable[[dict], tuple[Circuit, Circuit]] | None = None
    complete: Callable[[dict], dict] | None = None  # fills derived params, checks side conditions
    sampler: Callable[[_random.Random], dict] | None = None
    metavars: Callable[[_random.Random], tuple[dict, Circuit, Circuit]] | None = None
    exact: bool = True  # soundness under raw matrix equality (else up to scaling)
    primitive: bool = True
    description: str = ""

    @property
    def schematic(self) -> bool:
        return self.metavars is not None


def _const(lhs: Circuit, rhs: Circuit):
    return lambda params: (lhs, rhs)


def _draw(*names, open_interval=False):
    return lambda rng: {n: random_rat(rng, open_interval=open_interval) for n in names}


def _draw_valid(names, complete, open_interval=False):
    def draw(rng):
        while True:
            params = {n: random_rat(rng, open_interval=open_interval) for n in names}
            try:
                complete(params)
            except SideConditionViolated:
                continue
            return params

    return draw


def _small_type(rng, lo=0, hi=2) -> tuple[int, int]:
    return rng.randint(lo, hi), rng.randint(lo, hi)


def _rc(rng, m, n, kind="full"):
    return random_circuit(rng, m, n, size=rng.randint(1, 4), kind=kind, max_width=3)


def _mv_seq_assoc(rng):
    a, b, c, d = (rng.randint(0, 2) for _ in range(4))
    x, y, z = _rc(rng, a, b), _rc(rng, b, c), _rc(rng, c, d)
    return {"a": x, "b": y, "c": z}, Seq(Seq(x, y), z), Seq(x, Seq(y, z))


def _mv_par_assoc(rng):
    x, y, z = (_rc(rng, *_small_type(rng, 0, 1)) for _ in range(3))
    return {"a": x, "b": y, "c": z}, Par(Par(x, y), z), Par(x, Par(y, z))


def _mv_interchange(rng):
    m1, k1, n1, m2, k2, n2 = (rng.randint(0, 2) for _ in range(6))
    a, b = _rc(rng, m1, k1), _rc(rng, k1, n1)
    c, d = _rc(rng, m2, k2), _rc(rng, k2, n2)
    return {"a": a, "b": b, "c": c, "d": d}, Par(Seq(a, b), Seq(c, d)), Seq(Par(a, c), Par(b, d))


def _mv_seq_unit(rng):
    m, n = _small_type(rng)
    c = _rc(rng, m, n)
    if rng.random() < 0.5:
        return {"c": c}, Seq(identity(m), c), c
    return {"c": c}, Seq(c, identity(n)), c


def _mv_par_unit(rng):
    c = _rc(rng, *_small_type(rng))
    if rng.random() < 0.5:
        return {"c": c}, Par(ID0, c), c
    return {"c": c}, Par(c, ID0), c


def _mv_sym_nat(rng):
    m1, n1, m2, n2 = (rng.randint(0, 2) for _ in range(4))
    c, d = _rc(rng, m1, n1), _rc(rng, m2, n2)
    return {"c": c, "d": d}, Seq(Par(c, d), swap_bundle(n1, n2)), Seq(swap_bundle(m1, m2), Par(d, c))


def _mv_sym_inv(rng):
    return {}, Seq(SWAP, SWAP), identity(2)


def _mv_delete(rng):
    m, n = _small_type(rng, 0, 3)
    c = _rc(rng, m, n, kind="causal")
    return {"c": c}, Seq(c, gates.discard(n)), gates.discard(m)


def _mv_copy_bool(rng):
    m, n = _small_type(rng, 0, 2)
    c = _rc(rng, m, n, kind="boolean")
    return {"c": c}, Seq(c, gates.copy_bundle(n)), Seq(gates.copy_bundle(m), Par(c, c))


def _mv_fail(rng):
    m, n = _small_type(rng, 0, 2)
    c = _rc(rng, m, n)
    failing = Par(Seq(FLIP_BOT, DEL), c) if rng.random() < 0.5 else Seq(c, Par(identity(n), Seq(FLIP_BOT, DEL)))
    return {"c": failing}, failing, gates.failure_circuit(m, n)


def _mv_bool(rng):
    m = rng.randint(0, 3)
    c = _rc(rng, m, 1, kind="boolean")
    from probcirc.normalform import truth_table

    d = gates.truth_table_circuit(truth_table(c), m)
    return {"c": c, "d": d}, c, d


def _rules() -> list[Rule]:
    rules: list[Rule] = []

    def add(tag, group, lhs=None, rhs=None, **kw):
        if lhs is not None:
            kw["sides"] = _const(lhs, rhs)
        rules.append(Rule(tag, group, **kw))

    smc = "SMC"
    add("SeqAssoc", smc, metavars=_mv_seq_assoc, description="(a;b);c = a;(b;c)")
    add("ParAssoc", smc, metavars=_mv_par_assoc, description="(a⊗b)⊗c = a⊗(b⊗c)")
    add("Interchange", smc, metavars=_mv_interchange, description="(a;b)⊗(c;d) = (a⊗c);(b⊗d)")
    add("SeqUnit", smc, metavars=_mv_seq_unit, description="id;c = c = c;id")
    add("ParUnit", smc, metavars=_mv_par_unit, description="id0⊗c = c = c⊗id0")
    add("SymNat", smc, metavars=_mv_sym_nat, description="(c⊗d);σ = σ;(d⊗c)")
    add("SymInv", smc, metavars=_mv_sym_inv, description="σ;σ = id")

    add("A1", "A", _seq(COPY, _par(COPY, ID)), _seq(COPY, _par(ID, COPY)), description="copy is coassociative")
    add("A2l", "A", _seq(COPY, _par(DEL, ID)), ID, description="copy;(del⊗id) = id")
    add("A2r", "A", ID, _seq(COPY, _par(ID, DEL)), description="id = copy;(id⊗del)")
    add("A3", "A", _seq(COPY, SWAP), COPY, description="copy is cocommutative")

    add("B1", "B", _seq(_par(AND, ID), AND), _seq(_par(ID, AND), AND), description="and is associative")
    add("B2l", "B", _seq(_par(TRUE, ID), AND), ID, description="(1⊗id);and = id")
    add("B2r", "B", ID, _seq(_par(ID, TRUE), AND), description="id = (id⊗1);and")
    add("B3", "B", _seq(SWAP, AND), AND, description="and is commutative")
    add("B4", "B", _seq(NOT, NOT), ID, description="not;not = id")
    add("B5", "B", _seq(COPY, AND), ID, description="copy;and = id")
    add("B6", "B", _seq(COPY, _par(ID, NOT), AND), _seq(DEL, FALSE), description="x and not x = 0")
    add(
        "B7",
        "B",
        _seq(_par(AND, ID), gates.OR),
        _seq(_par(ID, ID, COPY), _par(ID, SWAP, ID), _par(gates.OR, gates.OR), AND),
        description="(x and y) or z = (x or z) and (y or z)",
    )

    add("C0", "C", _seq(FALSE, COPY), _par(FALSE, FALSE), description="copying 0")
    add("C1", "C", _seq(TRUE, COPY), _par(TRUE, TRUE), description="copying 1")
    add(
        "C2",
        "C",
        _seq(AND, COPY),
        _seq(_par(COPY, COPY), _par(ID, SWAP, ID), _par(AND, AND)),
        description="and distributes over copy",
    )
    add("C3", "C", _seq(NOT, COPY), _seq(COPY, _par(NOT, NOT)), description="not distributes over copy")

    add("D1", "D", _seq(AND, DEL), _par(DEL, DEL), description="and;del = del⊗del")
    add("D2", "D", _seq(NOT, DEL), DEL, description="not;del = del")

    def sides_d3(ps):
        return _seq(flip(ps["p"]), DEL), ID0

    add("D3", "D", params=("p",), sides=sides_d3, sampler=_draw("p"), description="flip p;del = empty")

    def sides_e1(ps):
        return _seq(flip(ps["p"]), NOT), flip(1 - ps["p"])

    add("E1", "E", params=("p",), sides=sides_e1, sampler=_draw("p"), description="flip p;not = flip (1-p)")
    add(
        "E2",
        "E",
        params=("r", "p", "q"),
        sides=lambda ps: e2_sides(*(ps[k] for k in ("r", "p", "q", "rt", "pt", "qt"))),
        complete=e2_params,
        sampler=_draw("r", "p", "q"),
        description="two disintegrations of a joint, conditioned on an input",
    )
    add(
        "E3",
        "E",
        params=("p", "q"),
        sides=lambda ps: e3_sides(*(ps[k] for k in ("p", "q", "pt", "qt"))),
        complete=e3_params,
        sampler=_draw_valid(("p", "q"), e3_params),
        description="convex sums are associative up to reweighting",
    )
    add(
        "E4",
        "E",
        params=("p", "q"),
        sides=lambda ps: e4_sides(ps["p"], ps["q"]),
        sampler=_draw("p", "q"),
        description="a shared guard under a selecting guard can be split",
    )

    add("F1", "F", _seq(_par(COND, ID), COND), _seq(_par(ID, COND), COND), exact=False, description="cond is associative")
    add("F2l", "F", _seq(_par(flip(HALF), ID), COND), ID, exact=False, description="(flip 1/2⊗id);cond = id")
    add("F2r", "F", ID, _seq(_par(ID, flip(HALF)), COND), exact=False, description="id = (id⊗flip 1/2);cond")
    add("F3", "F", _seq(SWAP, COND), COND, exact=False, description="cond is commutative")
    add(
        "F4",
        "F",
        _seq(_par(COPY, ID), _par(ID, COND)),
        _seq(COND, COPY),
        exact=False,
        description="Frobenius law, left form",
    )
    add(
        "F5",
        "F",
        _seq(COND, COPY),
        _seq(_par(ID, COPY), _par(COND, ID)),
        exact=False,
        description="Frobenius law, right form",
    )
    add("F6", "F", _seq(COPY, COND), ID, exact=False, description="copy;cond = id")
    add(
        "F7",
        "F",
        params=("p0", "p1", "p2"),
        sides=lambda ps: f7_sides(ps["p0"], ps["p1"], ps["p2"], ps["r"]),
        complete=f7_params,
        sampler=_draw_valid(("p0", "p1", "p2"), f7_params),
        exact=False,
        description="conditioning a two-variable joint on equality",
    )
    add(
        "F8",
        "F",
        _par(_seq(FLIP_BOT, DEL), ID),
        _par(_seq(FLIP_BOT, DEL), _seq(DEL, FALSE)),
        exact=False,
        description="failure absorbs a parallel wire",
    )

    derived = dict(primitive=False)
    add(
        "DerivedE5",
        "derived",
        params=("r", "p", "q"),
        sides=lambda ps: derived_e5_sides(ps["r"], ps["p"], ps["q"], ps["rt"]),
        complete=derived_e5_params,
        sampler=_draw("r", "p", "q"),
        description="single-output form of E2",
        **derived,
    )
    add(
        "Mult",
        "derived",
        params=("p", "q"),
        sides=lambda ps: (_seq(_par(flip(ps["p"]), flip(ps["q"])), COND), flip(ps["r"])),
        complete=mult_params,
        sampler=_draw_valid(("p", "q"), mult_params),
        exact=False,
        description="(flip p⊗flip q);cond = flip (pq/(pq+(1-p)(1-q)))",
        **derived,
    )
    add("Delete", "derived", metavars=_mv_delete, description="c;del_n = del_m for causal c", **derived)
    add("CopyBool", "derived", metavars=_mv_copy_bool, description="Boolean c commutes with copy", **derived)
    add("Fail", "derived", metavars=_mv_fail, exact=False, description="any failing circuit equals fail", **derived)
    add("Bool", "derived", metavars=_mv_bool, description="Boolean circuits with equal truth tables are equal", **derived)
    return rules


CATALOG: dict[str, Rule] = {r.tag: r for r in _rules()}
PRIMITIVE_TAGS: tuple[str, ...] = tuple(t for t, r in CATALOG.items() if r.primitive)
DERIVED_TAGS: tuple[str, ...] = tuple(t for t, r in CATALOG.items() if not r.primitive)
SMC_TAGS: tuple[str, ...] = tuple(t for t, r in CATALOG.items() if r.group == "SMC")


def rule(tag: str) -> Rule:
    try:
        return CATALOG[tag]
    except KeyError:
        raise KeyError(f"unknown axiom {tag!r}; known: {', '.join(CATALOG)}") from None


# -------------------------------------------------------------- instantiation


@dataclass(frozen=True)
class AxiomInstance:
    axiom: str
    params: dict = field(hash=False)
    lhs: Circuit
    rhs: Circuit


def normalize_params(params: dict | None) -> dict:
    """Canonical keys (``pt`` for ``p̃``) and exact rationals (circuits pass through)."""
    out = {}
    for key, value in (params or {}).items():
        key = ALIASES.get(key, key)
        if isinstance(value, Circuit):
            out[key] = value
        elif isinstance(value, (list, tuple)) and len(value) == 2:
            out[key] = Fraction(int(value[0]), int(value[1]))
        else:
            out[key] = as_rational(value)
    return out


def complete_params(tag: str, params: dict | None) -> dict:
    """Check presence and range of the free parameters and fill in derived ones."""
    r = rule(tag)
    params = normalize_params(params)
    missing = [p for p in r.params if p not in params]
    if missing:
        raise MissingParam(f"{tag} needs parameter(s) {', '.join(missing)}")
    for name in r.params:
        if not 0 <= params[name] <= 1:
            raise SideConditionViolated(f"{tag}: {name} = {params[name]} is not in [0, 1]")
    if r.complete is not None:
        return r.complete(params)
    return {k: params[k] for k in r.params}


def instantiate(tag: str, params: dict | None = None, check: bool = True) -> AxiomInstance:
    """Both sides of a rule at concrete parameters.

    Schematic rules take their metavariables (circuits) through ``params``;
    with ``check`` the two sides are verified to denote the same class.
    """
    r = rule(tag)
    if r.schematic:
        lhs, rhs = _schematic_sides(tag, normalize_params(params))
        full = normalize_params(params)
    else:
        full = complete_params(tag, params)
        lhs, rhs = r.sides(full)
    if check and not sides_agree(r, lhs, rhs):
        raise SideConditionViolated(f"{tag} instance is not sound at {full}")
    return AxiomInstance(tag, full, lhs, rhs)


def _need(params: dict, *names: str) -> list[Circuit]:
    missing = [n for n in names if n not in params]
    if missing:
        raise MissingParam(f"missing metavariable(s) {', '.join(missing)}")
    return [params[n] for n in names]


def _schematic_sides(tag: str, params: dict) -> tuple[Circuit, Circuit]:
    if tag == "SeqAssoc":
        a, b, c = _need(params, "a", "b", "c")
        return Seq(Seq(a, b), c), Seq(a, Seq(b, c))
    if tag == "ParAssoc":
        a, b, c = _need(params, "a", "b", "c")
        return Par(Par(a, b), c), Par(a, Par(b, c))
    if tag == "Interchange":
        a, b, c, d = _need(params, "a", "b", "c", "d")
        return Par(Seq(a, b), Seq(c, d)), Seq(Par(a, c), Par(b, d))
    if tag == "SeqUnit":
        (c,) = _need(params, "c")
        return Seq(identity(c.inputs), c), c
    if tag == "ParUnit":
        (c,) = _need(params, "c")
        return Par(ID0, c), c
    if tag == "SymNat":
        c, d = _need(params, "c", "d")
        return Seq(Par(c, d), swap_bundle(c.outputs, d.outputs)), Seq(swap_bundle(c.inputs, d.inputs), Par(d, c))
    if tag == "SymInv":
        return Seq(SWAP, SWAP), identity(2)
    if tag == "Delete":
        (c,) = _need(params, "c")
        if not is_causal(c):
            raise SideConditionViolated("Delete needs a conditioning-free circuit")
        return Seq(c, gates.discard(c.outputs)), gates.discard(c.inputs)
    if tag == "CopyBool":
        (c,) = _need(params, "c")
        if not is_boolean(c):
            raise SideConditionViolated("CopyBool needs a Boolean circuit")
        return Seq(c, gates.copy_bundle(c.outputs)), Seq(gates.copy_bundle(c.inputs), Par(c, c))
    if tag == "Fail":
        (c,) = _need(params, "c")
        if not evaluate(c).is_zero():
            raise SideConditionViolated("Fail needs a circuit with zero semantics")
        return c, gates.failure_circuit(c.inputs, c.outputs)
    if tag == "Bool":
        c, d = _need(params, "c", "d")
        if not (is_boolean(c) and is_boolean(d)):
            raise SideConditionViolated("Bool needs two Boolean circuits")
        if c.type != d.type or evaluate(c) != evaluate(d):
            raise SideConditionViolated("Bool needs equal truth tables")
        return c, d
    raise KeyError(tag)


def sides_agree(r: Rule, lhs: Circuit, rhs: Circuit, exact: bool | None = None) -> bool:
    if lhs.type != rhs.type:
        return False
    a, b = evaluate(lhs), evaluate(rhs)
    if exact if exact is not None else r.exact:
        return a == b
    return prop_equal(a, b) and canonical_class(a) == canonical_class(b)


# ---------------------------------------------------------------- soundness


@dataclass
class SoundnessReport:
    axiom: str
    trials: int
    passed: int
    mode: str  # "eval" or "prop"
    counterexample: dict | None = None

    @property
    def ok(self) -> bool:
        return self.passed == self.trials

    def to_json(self) -> dict:
        out = {"axiom": self.axiom, "trials": self.trials, "passed": self.passed, "mode": self.mode, "ok": self.ok}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


def _describe(params: dict) -> dict:
    from probcirc.syntax import format_rational, serialize

    return {
        k: serialize(v) if isinstance(v, Circuit) else format_rational(v) for k, v in params.items()
    }


def sample_instance(tag: str, rng: _random.Random) -> tuple[dict, Circuit, Circuit]:
    r = rule(tag)
    if r.schematic:
        return r.metavars(rng)
    if r.sampler is None:
        lhs, rhs = r.sides({})
        return {}, lhs, rhs
    full = complete_params(tag, r.sampler(rng))
    lhs, rhs = r.sides(full)
    return full, lhs, rhs


def check_soundness(tag: str, trials: int = 100, seed: int = 0, exact: bool | None = None) -> SoundnessReport:
    """Evaluate both sides of ``trials`` random instances.

    Rules flagged ``exact`` are compared as matrices; the others (conditioning)
    up to a positive scalar.  ``exact`` overrides the rule's own mode.
    """
    r = rule(tag)
    mode_exact = r.exact if exact is None else exact
    rng = _random.Random(f"{seed}:{tag}")
    passed = 0
    counterexample = None
    for _ in range(trials):
        params, lhs, rhs = sample_instance(tag, rng)
        if sides_agree(r, lhs, rhs, exact=mode_exact):
            passed += 1
        elif counterexample is None:
            counterexample = _describe(params)
    return SoundnessReport(tag, trials, passed, "eval" if mode_exact else "prop", counterexample)


def check_catalog(trials: int = 100, seed: int = 0, tags=None) -> list[SoundnessReport]:
    return [check_soundness(t, trials, seed) for t in (tags or CATALOG)]
