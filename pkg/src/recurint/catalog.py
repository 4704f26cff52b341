"""The relation catalog: loading, template compilation and instantiation.

Every relation is stored as text of the form
``k1*INT(I1, x) + k2*INT(I2, x) + G = 0``. At load time the bases of the
family are replaced by role symbols, the text is parsed, and the pieces are
compiled into evaluators. Instantiation evaluates them on a concrete integrand
and folds ``k2`` into the partner's cofactor, so every instance reads
``k1*INT(f1) + INT(f2) + G = 0`` with ``G`` a tuple of :class:`AlgTerm`.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import ONE, X, ZERO, Poly, canonical_split, rat_str, solve_linear
from .errors import (CofactorTooLarge, GuardViolated, NoRuleForCase, SolvedCoefficientZero,
                     UnsupportedForm)
from .expr import Compiled, PSum, free_symbols, parse_template, signed_terms, split_call
from .model import Integrand, PowerFactor, TranscFactor
from .sections import FORMS, Section

_TRANSC_SYMBOL = {"exp": "EXP", "cos": "COS", "sin": "SIN"}
_SYMBOL_TRANSC = {v: k for k, v in _TRANSC_SYMBOL.items()}
_COFACTOR_SYMBOLS = ("A", "B", "C")


# ----------------------------------------------------------------- AlgTerm --

@dataclass(frozen=True)
class AlgTerm:
    """``weight * multiplier(x) * prod(base_i ^ e_i) * transc``."""

    weight: Fraction
    multiplier: Poly
    factors: Tuple[PowerFactor, ...] = ()
    transc: Optional[TranscFactor] = None

    @property
    def key(self):
        return (self.factors, self.transc)

    def scaled(self, s: Fraction) -> "AlgTerm":
        return AlgTerm(self.weight * s, self.multiplier, self.factors, self.transc)

    def is_zero(self) -> bool:
        return self.weight == 0 or self.multiplier.is_zero()

    def canonical(self) -> "AlgTerm":
        """Primitive integer multiplier with positive lowest coefficient; zero exponents dropped."""
        w, m = canonical_split(self.multiplier)
        factors = tuple(sorted((f for f in self.factors if f.exponent != 0),
                               key=lambda f: (f.base.degree, f.base.coeffs)))
        if w == 0 or self.weight == 0:
            return AlgTerm(Fraction(0), ZERO, factors, self.transc)
        return AlgTerm(self.weight * w, m, factors, self.transc)


def merge_algterms(terms: Sequence[AlgTerm]) -> List[AlgTerm]:
    """Sum terms sharing the same power product and transcendental factor."""
    acc: Dict = {}
    order = []
    for t in terms:
        t = t.canonical()
        if t.is_zero():
            continue
        if t.key not in acc:
            acc[t.key] = ZERO
            order.append(t)
        acc[t.key] = acc[t.key] + t.multiplier * t.weight
    out = []
    for t in order:
        merged = AlgTerm(Fraction(1), acc[t.key], t.factors, t.transc).canonical()
        if not merged.is_zero():
            out.append(merged)
    return out


# -------------------------------------------------------------------- Rule --

@dataclass(frozen=True)
class RelationInstance:
    rule: str
    k1: Fraction
    integrand1: Integrand
    integrand2: Optional[Integrand]  # None when the folded partner coefficient vanishes
    alg_terms: Tuple[AlgTerm, ...]
    ordering: Tuple[int, ...] = ()

    @property
    def algTerm(self) -> Optional[AlgTerm]:
        return self.alg_terms[0] if self.alg_terms else None

    @property
    def partner_cofactor(self) -> Poly:
        return self.integrand2.cofactor if self.integrand2 else ZERO


@dataclass(frozen=True)
class _Piece:
    coeff: Compiled
    arg: Compiled
    exps: Tuple[Compiled, ...]  # exponent expression per role
    kind: Optional[str]


@dataclass
class Rule:
    id: str
    form: str
    case: str
    reversible: bool
    anchor: str
    relation: str
    where: Tuple[str, ...]
    index: int
    section: Section = field(repr=False)
    shift: Tuple[int, ...] = ()
    transc_in: Optional[str] = None
    transc_out: Optional[str] = None
    cofactor_dim: int = 0  # 0 means the relation carries no A/B/C cofactor
    guards: Tuple[str, ...] = ()  # must be nonzero
    requires_zero: Tuple[str, ...] = ()  # must vanish
    _locals: Tuple[Tuple[str, Compiled], ...] = field(default=(), repr=False)
    _i1: Optional[_Piece] = field(default=None, repr=False)
    _i2: Optional[_Piece] = field(default=None, repr=False)
    _g: Optional[Compiled] = field(default=None, repr=False)

    @property
    def max_cofactor_degree(self) -> int:
        return max(self.cofactor_dim - 1, 0)

    def accepts_cofactor(self, cof: Poly) -> bool:
        return cof.degree <= self.max_cofactor_degree

    def to_record(self) -> dict:
        return {
            "id": self.id, "form": self.form, "case": self.case,
            "guards": list(self.guards), "requires_zero": list(self.requires_zero),
            "shift": list(self.shift), "transc_in": self.transc_in, "transc_out": self.transc_out,
            "cofactor_dim": self.cofactor_dim, "reversible": self.reversible,
            "anchor": self.anchor, "relation": self.relation, "where": list(self.where),
        }


def _template_text(relation: str, sec: Section) -> str:
    text = relation.strip()
    if not text.endswith("= 0"):
        raise ValueError(f"relation does not end in '= 0': {relation[:60]}")
    text = text[: -len("= 0")].strip()
    if sec.transc:
        for kind, sym in _TRANSC_SYMBOL.items():
            text = text.replace(f"{kind}(a + b*x)", sym)
    for idx in sorted(range(sec.nroles), key=lambda k: -len(sec.roles[k].text)):
        text = text.replace(sec.roles[idx].text, f"F{idx}")
    return text


def _product_items(node) -> List:
    if node[0] == "mul":
        return _product_items(node[1]) + _product_items(node[2])
    return [node]


def _piece(sign: int, coeff_node, args, sec: Section, label: str) -> _Piece:
    if len(args) != 2 or args[1] != ("sym", "x"):
        raise ValueError(f"{label}: integral must be INT(..., x)")
    arg = args[0]
    exps: List = [None] * sec.nroles
    kind = None
    for item in _product_items(arg):
        if item[0] == "sym" and item[1] in _SYMBOL_TRANSC:
            kind = _SYMBOL_TRANSC[item[1]]
        elif item[0] == "sym" and item[1].startswith("F"):
            exps[int(item[1][1:])] = ("num", Fraction(1))
        elif item[0] == "pow" and item[1][0] == "sym" and item[1][1].startswith("F"):
            exps[int(item[1][1][1:])] = item[2]
    if any(e is None for e in exps):
        raise ValueError(f"{label}: integrand does not mention every base")
    if sign < 0:
        coeff_node = ("neg", coeff_node)
    return _Piece(Compiled(coeff_node, f"<{label} coefficient>"), Compiled(arg, f"<{label} integrand>"),
                  tuple(Compiled(e, f"<{label} exponent>") for e in exps), kind)


def _sum_node(terms):
    node = None
    for sign, t in terms:
        if node is None:
            node = t if sign > 0 else ("neg", t)
        else:
            node = ("add" if sign > 0 else "sub", node, t)
    return node


def _order_locals(where: Sequence[str], rid: str) -> List[Tuple[str, object]]:
    defs = []
    for w in where:
        name, _, rhs = w.partition("=")
        defs.append((name.strip(), parse_template(rhs.strip())))
    names = {n for n, _ in defs}
    out, done = [], set()
    pending = list(defs)
    while pending:
        progressed = False
        for item in list(pending):
            deps = free_symbols(item[1]) & names
            if deps <= done | {item[0]} and item[0] not in deps:
                out.append(item)
                done.add(item[0])
                pending.remove(item)
                progressed = True
        if not progressed:
            raise ValueError(f"rule {rid}: cyclic local definitions")
    return out


def _closure(symbols, local_nodes: Dict[str, object]) -> set:
    seen = set(symbols)
    stack = list(symbols)
    while stack:
        s = stack.pop()
        if s in local_nodes:
            for t in free_symbols(local_nodes[s]):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
    return seen


def compile_rule(rec: dict, index: int) -> Rule:
    sec = FORMS[rec["form"]]
    rid = rec["id"]
    case = sec.case(rec["case"])
    text = _template_text(rec["relation"], sec)
    tree = parse_template(text)
    ints, others = [], []
    for sign, term in signed_terms(tree):
        coeff, args = split_call(term, "INT")
        if args is None:
            others.append((sign, term))
        else:
            ints.append(_piece(sign, coeff, args, sec, f"{rid} I{len(ints) + 1}"))
    if len(ints) != 2:
        raise ValueError(f"rule {rid}: expected two integrals, found {len(ints)}")
    i1, i2 = ints
    local_defs = _order_locals(rec["where"], rid)
    local_nodes = dict(local_defs)
    allsyms = set()
    for node in [tree] + [n for _, n in local_defs]:
        allsyms |= _closure(free_symbols(node), local_nodes)
    dim = 0
    for k, s in enumerate(_COFACTOR_SYMBOLS):
        if s in allsyms:
            dim = k + 1
    if _closure(i1.coeff.symbols, local_nodes) & set(_COFACTOR_SYMBOLS):
        raise ValueError(f"rule {rid}: first coefficient depends on the cofactor")
    for name, node in local_defs:
        if "x" in free_symbols(node):
            raise ValueError(f"rule {rid}: local {name} depends on x")
    # exponent shift: I2 exponent minus I1 exponent, checked at two sample points
    shift = []
    for r, role in enumerate(sec.roles):
        if i1.exps[r].symbols != {role.exponent}:
            raise ValueError(f"rule {rid}: first integral must carry plain exponents")
        diffs = set()
        for probe in (Fraction(3, 7), Fraction(-11, 5)):
            env = {rr.exponent: probe + j for j, rr in enumerate(sec.roles)}
            diffs.add(i2.exps[r](env) - i1.exps[r](env))
        (d,) = diffs
        if d.denominator != 1 or abs(d) > 1:
            raise ValueError(f"rule {rid}: unexpected exponent shift {d}")
        shift.append(int(d))
    if not any(shift):
        raise ValueError(f"rule {rid}: relation does not move any exponent")
    g = Compiled(_sum_node(others), f"<{rid} G>") if others else None
    if sec.transc and i1.kind is None:
        raise ValueError(f"rule {rid}: transcendental family without transcendental factor")
    return Rule(
        id=rid, form=rec["form"], case=rec["case"], reversible=bool(rec["reversible"]),
        anchor=rec["anchor"], relation=rec["relation"], where=tuple(rec["where"]), index=index,
        section=sec, shift=tuple(shift), transc_in=i1.kind, transc_out=i2.kind, cofactor_dim=dim,
        guards=case.nonzero, requires_zero=case.zero,
        _locals=tuple((n, Compiled(node, f"<{rid} {n}>")) for n, node in local_defs),
        _i1=i1, _i2=i2, _g=g,
    )


# ----------------------------------------------------------------- catalog --

class Catalog:
    def __init__(self, rules: List[Rule]):
        self.rules = rules
        self.by_id = {r.id: r for r in rules}
        self.by_case: Dict[Tuple[str, str], List[Rule]] = {}
        for r in rules:
            self.by_case.setdefault((r.form, r.case), []).append(r)

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def __getitem__(self, rid: str) -> Rule:
        return self.by_id[rid]

    def export(self, path) -> None:
        with open(path, "w") as fh:
            json.dump([r.to_record() for r in self.rules], fh, indent=1)


def load_records(path=None) -> List[dict]:
    if path is None:
        with resources.files("recurint").joinpath("data/catalog.json").open() as fh:
            return json.load(fh)
    with open(path) as fh:
        return json.load(fh)


def load_catalog(path=None) -> Catalog:
    return Catalog([compile_rule(rec, k) for k, rec in enumerate(load_records(path))])


@lru_cache(maxsize=1)
def default_catalog() -> Catalog:
    return load_catalog()


def rules_for(form: str, case: str, want: Optional[Sequence[int]] = None,
              catalog: Optional[Catalog] = None) -> List[Tuple[Rule, int]]:
    """Rules of ``(form, case)`` as ``(rule, solveFor)`` pairs in catalog order.

    ``want`` is the desired per-role exponent move. Solving for the first
    integral moves exponents by ``+shift``; solving for the second by ``-shift``.
    """
    cat = catalog or default_catalog()
    sec = FORMS[form]
    if case not in {c.label for c in sec.cases}:
        raise NoRuleForCase(f"{form} has no case {case!r}")
    out = []
    for r in cat.by_case.get((form, case), []):
        if want is None:
            out.append((r, 1))
            continue
        want_t = tuple(want)
        if r.shift == want_t:
            out.append((r, 1))
        elif tuple(-s for s in r.shift) == want_t:
            out.append((r, 2))
    if not out:
        raise NoRuleForCase(f"no {form} relation in case {case} moves exponents by {tuple(want or ())}")
    return out


# ------------------------------------------------------------ instantiate --

def _check_shape(rule: Rule, i: Integrand, ordering: Sequence[int]):
    sec = rule.section
    if len(ordering) != sec.nroles or len(i.factors) != sec.nroles:
        raise UnsupportedForm(f"rule {rule.id} needs {sec.nroles} power factors")
    for role, k in zip(sec.roles, ordering):
        if i.factors[k].degree != role.degree:
            raise UnsupportedForm(f"rule {rule.id}: factor {k} has degree {i.factors[k].degree}, "
                                  f"role needs {role.degree}")
    if sec.transc != (i.transc is not None):
        raise UnsupportedForm(f"rule {rule.id}: transcendental factor mismatch")


def _env(rule: Rule, i: Integrand, ordering: Sequence[int]) -> dict:
    sec = rule.section
    env = sec.base_env([i.factors[k].base for k in ordering], i.transc.arg if i.transc else None)
    values = sec.guard_values(env)
    for gname in rule.requires_zero:
        if values[gname] != 0:
            raise GuardViolated(f"rule {rule.id} (case {rule.case}) needs {gname} = 0, "
                                f"got {rat_str(values[gname])}")
    for gname in rule.guards:
        if values[gname] == 0:
            raise GuardViolated(f"rule {rule.id} (case {rule.case}) needs {gname} != 0")
    for role, k in zip(sec.roles, ordering):
        env[role.exponent] = i.factors[k].exponent
    env["x"] = X
    for r in range(sec.nroles):
        env[f"F{r}"] = PSum.role(r, sec.nroles)
    if sec.transc:
        for kind, sym in _TRANSC_SYMBOL.items():
            env[sym] = PSum.transc(kind, sec.nroles)
    return env


def _alg_terms(g: PSum, i: Integrand, ordering: Sequence[int], nroles: int) -> Tuple[AlgTerm, ...]:
    bases = [i.factors[k].base for k in ordering]
    by_kind: Dict = {}
    for (kind, exps), poly in g.terms.items():
        by_kind.setdefault(kind, []).append((exps, poly))
    out = []
    for kind in sorted(by_kind, key=lambda k: (k is not None, k or "")):
        items = by_kind[kind]
        lows = [min(e[r] for e, _ in items) for r in range(nroles)]
        mult = ZERO
        for exps, poly in items:
            term = poly
            for r in range(nroles):
                d = exps[r] - lows[r]
                if d.denominator != 1:
                    raise ValueError("algebraic part mixes exponent classes")
                term = term * bases[r] ** int(d)
            mult = mult + term
        factors = [None] * nroles
        for r, k in enumerate(ordering):
            factors[k] = PowerFactor(bases[r], lows[r])
        transc = TranscFactor(kind, i.transc.arg) if kind else None
        out.append(AlgTerm(Fraction(1), mult, tuple(factors), transc))
    return tuple(out)


def _evaluate(rule: Rule, env: dict, cofactor: Poly, require_k1: bool):
    """``(k1, partner PSum, G PSum or None)`` for one cofactor on a prepared environment."""
    env = dict(env)
    if rule.cofactor_dim:
        if cofactor.degree >= rule.cofactor_dim:
            raise CofactorTooLarge(f"rule {rule.id} accepts cofactor degree <= {rule.cofactor_dim - 1}")
        for k, s in enumerate(_COFACTOR_SYMBOLS[: rule.cofactor_dim]):
            env[s] = cofactor.coeff(k)
        scale = None
    else:
        if cofactor.degree > 0:
            raise CofactorTooLarge(f"rule {rule.id} needs a constant cofactor")
        scale = cofactor.coeff(0)
    for name, fn in rule._locals:
        env[name] = fn(env)
    k1 = Fraction(rule._i1.coeff(env))
    if require_k1 and k1 == 0:
        raise SolvedCoefficientZero(f"rule {rule.id}: first coefficient vanishes")
    p2 = rule._i2.coeff(env) * rule._i2.arg(env)
    g = rule._g(env) if rule._g is not None else None
    if scale is not None and scale != 1:
        p2 = p2 * scale
        g = g * scale if g is not None else None
    return k1, p2, g


def _assemble(rule: Rule, i: Integrand, ordering, k1, p2: PSum, g) -> RelationInstance:
    kind2, exps2, poly2 = p2.single() if p2.terms else (rule.transc_out, None, ZERO)
    if poly2.is_zero():
        integrand2 = None
    else:
        new_exps = list(i.exponents)
        for r, k in enumerate(ordering):
            new_exps[k] = exps2[r]
        transc2 = i.transc.with_kind(kind2) if kind2 else None
        integrand2 = Integrand(poly2, transc2, tuple(f.with_exponent(e) for f, e in zip(i.factors, new_exps)))
    algs = _alg_terms(g, i, ordering, rule.section.nroles) if g is not None else ()
    return RelationInstance(rule.id, k1, i, integrand2, algs, ordering)


def instantiate(rule: Rule, i: Integrand, ordering: Optional[Sequence[int]] = None,
                require_k1: bool = False) -> RelationInstance:
    """Evaluate ``rule`` on ``i`` (role r played by factor ``ordering[r]``).

    Raises :class:`GuardViolated` when ``i`` is outside the rule's case and,
    with ``require_k1``, :class:`SolvedCoefficientZero` as soon as ``k1 = 0``.
    """
    sec = rule.section
    ordering = tuple(range(sec.nroles)) if ordering is None else tuple(ordering)
    _check_shape(rule, i, ordering)
    if i.kind != rule.transc_in:
        raise UnsupportedForm(f"rule {rule.id} applies to {rule.transc_in or 'no'} transcendental factor")
    k1, p2, g = _evaluate(rule, _env(rule, i, ordering), i.cofactor, require_k1)
    return _assemble(rule, i, ordering, k1, p2, g)


def instantiate_for_partner(rule: Rule, target: Integrand, ordering: Optional[Sequence[int]] = None,
                            require_k1: bool = False) -> RelationInstance:
    """Instance whose *second* integrand equals ``target`` exactly.

    The first integrand's exponents are ``target``'s minus the shift; its
    cofactor is found by solving the linear system that maps the cofactor
    symbols to the partner cofactor (both sides are linear in the cofactor).
    """
    sec = rule.section
    ordering = tuple(range(sec.nroles)) if ordering is None else tuple(ordering)
    _check_shape(rule, target, ordering)
    if target.kind != rule.transc_out:
        raise UnsupportedForm(f"rule {rule.id} produces {rule.transc_out or 'no'} transcendental factor")
    exps = list(target.exponents)
    for r, k in enumerate(ordering):
        exps[k] = exps[k] - rule.shift[r]
    transc1 = target.transc.with_kind(rule.transc_in) if target.transc else None
    skeleton = Integrand(ONE, transc1, tuple(f.with_exponent(e) for f, e in zip(target.factors, exps)))
    env = _env(rule, skeleton, ordering)
    dim = max(rule.cofactor_dim, 1)
    evals = [_evaluate(rule, env, Poly([0] * j + [1]), require_k1) for j in range(dim)]
    images = [p2.single()[2] if p2.terms else ZERO for _, p2, _ in evals]
    size = max([target.cofactor.degree] + [p.degree for p in images if p]) + 1
    rows = [[images[j].coeff(d) for j in range(dim)] for d in range(size)]
    rhs = [target.cofactor.coeff(d) for d in range(size)]
    lam = solve_linear(rows, rhs)
    if lam is None or not any(lam):
        raise SolvedCoefficientZero(f"rule {rule.id}: partner cofactor {target.cofactor} is not reachable")
    p2 = PSum({})
    g = PSum({}) if rule._g is not None else None
    for c, (_, p2j, gj) in zip(lam, evals):
        if c:
            p2 = p2 + p2j * c
            if g is not None:
                g = g + gj * c
    inst = _assemble(rule, skeleton.with_cofactor(Poly(lam)), ordering, evals[0][0], p2, g)
    if inst.integrand2 is None or inst.integrand2.cofactor != target.cofactor:
        raise SolvedCoefficientZero(f"rule {rule.id}: partner cofactor mismatch")
    return inst
