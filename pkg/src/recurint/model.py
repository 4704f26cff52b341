"""Integrand representation, normalization, form classification and degeneracy profiling."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import ONE, Poly, rat
from .errors import CofactorTooLarge, UnsupportedDegeneracy, UnsupportedForm, UnsupportedMerge
from .sections import SHAPES, Section, section_for

TRANSC_KINDS = ("exp", "cos", "sin")


@dataclass(frozen=True)
class PowerFactor:
    base: Poly
    exponent: Fraction

    def __post_init__(self):
        if not isinstance(self.exponent, Fraction):
            object.__setattr__(self, "exponent", rat(self.exponent))
        if self.base.degree < 1:
            raise UnsupportedForm(f"power factor base must be nonconstant, got {self.base}")

    @property
    def degree(self) -> int:
        return self.base.degree

    def with_exponent(self, e: Fraction) -> "PowerFactor":
        return PowerFactor(self.base, e)


@dataclass(frozen=True)
class TranscFactor:
    kind: str
    arg: Poly

    def __post_init__(self):
        if self.kind not in TRANSC_KINDS:
            raise UnsupportedForm(f"unknown transcendental factor {self.kind!r}")
        if self.arg.degree != 1:
            raise UnsupportedForm(f"{self.kind} argument must be linear, got {self.arg}")

    def with_kind(self, kind: str) -> "TranscFactor":
        return TranscFactor(kind, self.arg)


@dataclass(frozen=True)
class Integrand:
    """``cofactor * transc * prod(base_i ^ exponent_i)``."""

    cofactor: Poly = ONE
    transc: Optional[TranscFactor] = None
    factors: Tuple[PowerFactor, ...] = ()

    def __post_init__(self):
        if not isinstance(self.factors, tuple):
            object.__setattr__(self, "factors", tuple(self.factors))
        if self.cofactor.is_zero():
            raise UnsupportedForm("integrand with zero cofactor")

    @property
    def exponents(self) -> Tuple[Fraction, ...]:
        return tuple(f.exponent for f in self.factors)

    @property
    def bases(self) -> Tuple[Poly, ...]:
        return tuple(f.base for f in self.factors)

    @property
    def kind(self) -> Optional[str]:
        return self.transc.kind if self.transc else None

    def with_exponents(self, exps: Sequence[Fraction]) -> "Integrand":
        return Integrand(self.cofactor, self.transc,
                         tuple(f.with_exponent(e) for f, e in zip(self.factors, exps)))

    def with_cofactor(self, cof: Poly) -> "Integrand":
        return Integrand(cof, self.transc, self.factors)

    def drop_zero_exponents(self) -> "Integrand":
        return Integrand(self.cofactor, self.transc, tuple(f for f in self.factors if f.exponent != 0))


# ------------------------------------------------------------ normalize --

def _iroot(n: int, k: int) -> Optional[int]:
    """Exact k-th root of a nonnegative integer, or None."""
    if n < 2:
        return n
    r = 1 << ((n.bit_length() + k - 1) // k)  # overestimate; Newton descends to floor root
    while True:
        nxt = ((k - 1) * r + n // r ** (k - 1)) // k
        if nxt >= r:
            break
        r = nxt
    return r if r ** k == n else None


def rational_power(r: Fraction, e: Fraction) -> Optional[Fraction]:
    """``r ** e`` for positive rational ``r`` if the result is rational, else None."""
    if r <= 0:
        return None
    s, t = e.numerator, e.denominator
    num, den = _iroot(r.numerator, t), _iroot(r.denominator, t)
    if num is None or den is None:
        return None
    return Fraction(num, den) ** s


def _ratio(p: Poly, q: Poly) -> Optional[Fraction]:
    """r with q = r * p, or None when the bases are not proportional."""
    if p.degree != q.degree:
        return None
    r = q.lc / p.lc
    return r if q == p * r else None


def _sort_key(f: PowerFactor):
    return (f.base.degree, f.base.coeffs)


def normalize(raw: Integrand, strict: bool = False) -> Integrand:
    """Canonical form: merge equal or positively proportional bases, drop zero exponents, sort.

    Proportional bases ``p`` and ``r*p`` merge when ``r > 0`` and ``r**e`` is
    rational. Otherwise they stay separate factors (so the dedicated degenerate
    relations can act on them); with ``strict=True`` that situation raises
    :class:`UnsupportedMerge` instead.
    """
    cof = raw.cofactor
    merged: List[PowerFactor] = []
    for f in sorted(raw.factors, key=_sort_key):
        if f.base.degree < 1:
            raise UnsupportedForm(f"power factor base must be nonconstant, got {f.base}")
        for idx, g in enumerate(merged):
            r = _ratio(g.base, f.base)
            if r is None:
                continue
            scale = rational_power(r, f.exponent)
            if scale is None:
                if strict:
                    why = "non-positive ratio" if r <= 0 else f"irrational scale ({r})^({f.exponent})"
                    raise UnsupportedMerge(f"cannot merge {g.base} and {f.base}: {why}")
                continue
            cof = cof * scale
            merged[idx] = g.with_exponent(g.exponent + f.exponent)
            break
        else:
            merged.append(f)
    factors = tuple(sorted((f for f in merged if f.exponent != 0), key=_sort_key))
    return Integrand(cof, raw.transc, factors)


# --------------------------------------------------------------- classify --

@dataclass(frozen=True)
class DegeneracyProfile:
    guards: Dict[str, Fraction]
    case: str
    ordering: Tuple[int, ...] = ()  # role i is played by factor ordering[i]
    #: every (ordering, case labels) combination whose conditions hold
    matches: Tuple[Tuple[Tuple[int, ...], Tuple[str, ...]], ...] = ()

    def describe(self) -> str:
        vals = " ".join(f"{k}={_fmt(v)}" for k, v in self.guards.items())
        return f"case {self.case}" + (f", {vals}" if vals else "")


def _fmt(v: Fraction) -> str:
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


@dataclass(frozen=True)
class FormClass:
    tag: str
    profile: Optional[DegeneracyProfile] = field(default=None, compare=False)

    @property
    def section(self) -> Section:
        return section_for(self.tag)

    @property
    def max_cofactor(self) -> int:
        return self.section.max_cofactor


def has_linear_factor(i: Integrand) -> bool:
    return any(f.degree == 1 for f in i.factors)


def classify(i: Integrand) -> FormClass:
    """Form tag from the factor-degree multiset and presence of a transcendental factor."""
    degs = tuple(sorted(f.degree for f in i.factors))
    tag = SHAPES.get((degs, i.transc is not None))
    if tag is None:
        what = "+".join(map(str, degs)) or "none"
        extra = " with transcendental factor" if i.transc else ""
        raise UnsupportedForm(f"no relation family for factor degrees {what}{extra}")
    sec = section_for(tag)
    if i.cofactor.degree > sec.max_cofactor and not has_linear_factor(i):
        raise CofactorTooLarge(
            f"cofactor degree {i.cofactor.degree} exceeds {sec.max_cofactor} for {tag} "
            "and there is no linear factor to absorb it")
    return FormClass(tag)


def role_orderings(i: Integrand, sec: Section) -> List[Tuple[int, ...]]:
    """Assignments of factors to roles, permuting only within equal-degree groups."""
    groups: Dict[int, List[int]] = {}
    for idx, f in enumerate(i.factors):
        groups.setdefault(f.degree, []).append(idx)
    per_role = [r.degree for r in sec.roles]
    options = []
    for deg in sorted(set(per_role)):
        options.append(list(itertools.permutations(groups.get(deg, []))))
    out = []
    for combo in itertools.product(*options):
        pools = {deg: list(p) for deg, p in zip(sorted(set(per_role)), combo)}
        out.append(tuple(pools[d].pop(0) for d in per_role))
    return out


def guard_env(i: Integrand, sec: Section, ordering: Sequence[int]):
    env = sec.base_env([i.factors[k].base for k in ordering], i.transc.arg if i.transc else None)
    values = sec.guard_values(env)
    return env, values


def case_plan(i: Integrand, form: FormClass):
    """All ``(ordering, [Case...])`` pairs whose stated conditions hold."""
    sec = form.section
    plan = []
    for ordering in role_orderings(i, sec):
        _, values = guard_env(i, sec, ordering)
        cases = sec.matching_cases(values)
        if cases:
            plan.append((ordering, values, cases))
    return plan


def degeneracy_profile(i: Integrand, form: Optional[FormClass] = None) -> DegeneracyProfile:
    """Select the case label whose conditions match.

    When conditions of several cases hold (for some role ordering), the case
    with the most vanishing conditions is the most specific and wins; ties go
    to the earlier ordering and then the earlier listed case.
    """
    form = form or classify(i)
    sec = form.section
    plan = case_plan(i, form)
    if not plan:
        raise UnsupportedDegeneracy(f"no {form.tag} case matches {_guard_summary(i, sec)}")
    best = None
    for rank, (ordering, values, cases) in enumerate(plan):
        for cidx, c in enumerate(cases):
            key = (-len(c.zero), rank, cidx)
            if best is None or key < best[0]:
                best = (key, ordering, values, c)
    _, ordering, values, case = best
    matches = tuple((o, tuple(c.label for c in cs)) for o, _, cs in plan)
    return DegeneracyProfile(dict(values), case.label, tuple(ordering), matches)


def _guard_summary(i: Integrand, sec: Section) -> str:
    ordering = tuple(range(len(i.factors)))
    try:
        _, values = guard_env(i, sec, ordering)
    except Exception:  # pragma: no cover - defensive
        return "(guards unavailable)"
    return " ".join(f"{k}={_fmt(v)}" for k, v in values.items()) or "(no guards)"


def classify_full(i: Integrand) -> FormClass:
    form = classify(i)
    return FormClass(form.tag, degeneracy_profile(i, form))


def potential(exps: Sequence[Fraction], window: Tuple[Fraction, Fraction]) -> int:
    """Sum over exponents of the number of unit steps needed to enter ``(lo, hi]``."""
    lo, hi = window
    total = 0
    for e in exps:
        if e > hi:
            total += math.ceil(e - hi)
        elif e <= lo:
            total += math.floor(lo - e) + 1
    return total
