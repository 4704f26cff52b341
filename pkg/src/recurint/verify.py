"""Exact differentiation checks for relation instances, steps and whole reductions.

A check collects signed terms ``poly * prod(base^e) * T`` and asks whether
their sum vanishes identically. Terms are grouped by transcendental factor and
by the fractional parts of the exponents (distinct classes are linearly
independent); within a group every term is brought to the common minimal
exponents, leaving a polynomial numerator that must be zero.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .arith import ONE, ZERO, Poly, poly_derivative
from .errors import CatalogDefect, GuardViolated
from .model import Integrand, TranscFactor

# term: (transc or None, ((base, exponent), ...) with nonzero exponents, poly)
_Term = Tuple[Optional[TranscFactor], Tuple[Tuple[Poly, Fraction], ...], Poly]

_DERIV = {"exp": ("exp", 1), "cos": ("sin", -1), "sin": ("cos", 1)}


@dataclass(frozen=True)
class Residual:
    """Nonvanishing group numerators; empty means the identity holds."""

    parts: Tuple[Tuple[object, Poly], ...] = ()

    def is_zero(self) -> bool:
        return not self.parts

    @property
    def numerator(self) -> Poly:
        return self.parts[0][1] if self.parts else ZERO

    def __bool__(self):
        return not self.is_zero()

    def __str__(self):
        if not self.parts:
            return "0"
        return "; ".join(str(p) for _, p in self.parts)


def _integrand_term(i: Integrand, coef: Fraction = Fraction(1)) -> _Term:
    return (i.transc, tuple((f.base, f.exponent) for f in i.factors if f.exponent != 0), i.cofactor * coef)


def _derivative_terms(transc, factors, poly: Poly) -> List[_Term]:
    """d/dx of ``poly * prod(base^e) * transc`` as terms at exponents ``e - 1``."""
    bases = [b for b, _ in factors]
    lowered = tuple((b, e - 1) for b, e in factors)
    prod_all = ONE
    for b in bases:
        prod_all = prod_all * b
    inner = poly_derivative(poly) * prod_all
    for k, (b, e) in enumerate(factors):
        others = ONE
        for j, c in enumerate(bases):
            if j != k:
                others = others * c
        inner = inner + poly * poly_derivative(b) * others * e
    out = [(transc, lowered, inner)]
    if transc is not None:
        kind, sign = _DERIV[transc.kind]
        out.append((transc.with_kind(kind), lowered, poly * prod_all * (transc.arg.coeff(1) * sign)))
    return out


def algterm_terms(g) -> List[_Term]:
    """Derivative of an :class:`~recurint.catalog.AlgTerm` as verifier terms."""
    if g.is_zero():
        return []
    factors = tuple((f.base, f.exponent) for f in g.factors if f.exponent != 0)
    return _derivative_terms(g.transc, factors, g.multiplier * g.weight)


def differentiate_algterm(g) -> List[_Term]:
    return algterm_terms(g)


def combine(terms: Iterable[_Term]) -> Residual:
    groups: Dict = {}
    for transc, factors, poly in terms:
        if poly.is_zero():
            continue
        merged: Dict[Poly, Fraction] = {}
        for b, e in factors:  # equal bases in distinct roles multiply
            merged[b] = merged.get(b, Fraction(0)) + e
        fr = frozenset((b, e - math.floor(e)) for b, e in merged.items() if e.denominator != 1)
        groups.setdefault((transc, fr), []).append((merged, poly))
    parts = []
    for key, items in groups.items():
        bases = []
        for fs, _ in items:
            for b in fs:
                if b not in bases:
                    bases.append(b)
        lows = {b: min(fs.get(b, Fraction(0)) for fs, _ in items) for b in bases}
        num = ZERO
        for fs, poly in items:
            t = poly
            for b in bases:
                t = t * b ** int(fs.get(b, Fraction(0)) - lows[b])
            num = num + t
        if not num.is_zero():
            parts.append((key, num))
    return Residual(tuple(parts))


def relation_residual(inst) -> Residual:
    """``k1*f1 + f2 + d/dx G`` for a relation instance."""
    terms = [_integrand_term(inst.integrand1, inst.k1)]
    if inst.integrand2 is not None:
        terms.append(_integrand_term(inst.integrand2))
    for g in inst.alg_terms:
        terms.extend(algterm_terms(g))
    return combine(terms)


def step_residual(step) -> Residual:
    """``d/dx alg + scale*next - current`` for an engine step."""
    terms = [_integrand_term(step.current, Fraction(-1))]
    if step.next is not None and step.scale != 0:
        terms.append(_integrand_term(step.next, step.scale))
    for g in step.alg_terms:
        terms.extend(algterm_terms(g))
    return combine(terms)


def verify_result(original: Integrand, result) -> Residual:
    """``d/dx(algebraic) + sum(coef*residual) - original``; zero iff the reduction is exact."""
    terms = [_integrand_term(original, Fraction(-1))]
    for g in result.algebraic:
        terms.extend(algterm_terms(g))
    for coef, i in result.residuals:
        terms.append(_integrand_term(i, coef))
    return combine(terms)


# --------------------------------------------------------------- selftest --

@dataclass
class RuleReport:
    rule_id: str
    case: str
    checked: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.checked > 0 and not self.failures


def selftest_rule(rule, samples: int, rng: random.Random, max_tries: int = 50) -> RuleReport:
    from .catalog import instantiate
    from .sampling import sample_for_rule

    rep = RuleReport(rule.id, rule.case)
    tries = 0
    while rep.checked < samples and tries < samples * max_tries:
        tries += 1
        i = sample_for_rule(rule, rng)
        try:
            inst = instantiate(rule, i)
        except (GuardViolated, ZeroDivisionError):
            continue
        if inst.k1 == 0:
            continue
        rep.checked += 1
        res = relation_residual(inst)
        if not res.is_zero():
            rep.failures.append(f"{i}: residual {res}")
    return rep


def selftest_catalog(samples: int = 25, seed: int = 0, catalog=None,
                     rule_ids: Optional[Sequence[str]] = None, strict: bool = False) -> List[RuleReport]:
    """Check every relation on ``samples`` random instances of its case."""
    from .catalog import default_catalog

    cat = catalog or default_catalog()
    rng = random.Random(seed)
    reports = []
    for rule in cat:
        if rule_ids is not None and rule.id not in rule_ids:
            continue
        rep = selftest_rule(rule, samples, rng)
        if strict and rep.failures:
            raise CatalogDefect(rule.id, rep.failures[0])
        reports.append(rep)
    return reports
