"""Random integrands for every family and degeneracy case.

Degenerate cases are built from their root structure (shared roots, repeated
roots, proportional bases) rather than by rejection, then confirmed against the
case conditions.
"""
from __future__ import annotations

import random
from fractions import Fraction
from typing import List, Optional, Tuple

from .arith import ONE, Poly, X
from .model import Integrand, PowerFactor, TranscFactor
from .sections import FORMS, Section


def small_rat(rng: random.Random, nonzero: bool = True, size: int = 5, maxden: int = 3) -> Fraction:
    while True:
        v = Fraction(rng.randint(-size, size), rng.randint(1, maxden))
        if v or not nonzero:
            return v


def random_exponent(rng: random.Random, bound: int = 4, dens=(1, 1, 2, 2, 3, 4, 6)) -> Fraction:
    den = rng.choice(dens)
    return Fraction(rng.randint(-bound * den, bound * den), den)


def random_poly(rng: random.Random, degree: int) -> Poly:
    cs = [small_rat(rng, nonzero=False) for _ in range(degree)] + [small_rat(rng)]
    return Poly(cs)


def _lin_root(rng, r) -> Poly:
    return (X - r) * small_rat(rng)


def _distinct(rng, k):
    out = []
    while len(out) < k:
        v = small_rat(rng, nonzero=False)
        if v not in out:
            out.append(v)
    return out


def _square(rng, s) -> Poly:
    return (X - s) ** 2 * small_rat(rng)


def _bases(label: str, rng: random.Random) -> List[Poly]:
    """Bases in role order realising the structure of ``label``."""
    lin = lambda: random_poly(rng, 1)
    quad = lambda: random_poly(rng, 2)
    r, s = _distinct(rng, 2)
    c = small_rat
    table = {
        "1": lambda: [quad()],
        "2A": lambda: [random_poly(rng, 3)],
        "2B": lambda: [(X - r) ** 2 * (X - s) * c(rng)],
        "3A": lambda: [random_poly(rng, 4)],
        "3B": lambda: [(X - r) ** 2 * quad()],
        "3C-1": lambda: [(X - r) ** 3 * (X - s) * c(rng)],
        "3C-2": lambda: [quad() ** 2 * c(rng)],
        "4": lambda: [lin(), lin()],
        "5": lambda: [lin()],
        "6A": lambda: [lin(), quad()],
        "6B-1": lambda: [_lin_root(rng, r), (X - r) * lin()],
        "6B-2": lambda: [lin(), _square(rng, s)],
        "7A": lambda: [quad()],
        "7B": lambda: [_square(rng, s)],
        "8A": lambda: [quad(), quad()],
        "8B": lambda: [(X - r) * lin(), (X - r) * lin()],
        "8C": lambda: [_square(rng, s), quad()],
        "8D-1": lambda: (lambda p: [p, p * c(rng)])(quad()),
        "8D-2": lambda: [_square(rng, r), (X - r) * lin()],
        "8D-3": lambda: [_square(rng, r), _square(rng, s)],
        "9A": lambda: [lin(), lin(), lin()],
        "9B": lambda: [_lin_root(rng, r), _lin_root(rng, r), lin()],
        "10A": lambda: [lin(), lin()],
        "10B": lambda: [_lin_root(rng, r), _lin_root(rng, r)],
        "11A": lambda: [lin(), lin(), quad()],
        "11B": lambda: [_lin_root(rng, r), _lin_root(rng, r), quad()],
        "11C": lambda: [_lin_root(rng, r), lin(), (X - r) * lin()],
        "11D": lambda: [lin(), lin(), _square(rng, s)],
        "11E-1": lambda: [_lin_root(rng, r), _lin_root(rng, r), (X - r) * lin()],
        "11E-2": lambda: [_lin_root(rng, r), _lin_root(rng, r), _square(rng, s)],
        "11E-3": lambda: [_lin_root(rng, r), _lin_root(rng, s), (X - r) * (X - s) * c(rng)],
        "11E-4": lambda: [_lin_root(rng, r), lin(), _square(rng, r)],
        "12A": lambda: [lin(), lin(), lin(), lin()],
        "12B": lambda: [_lin_root(rng, r), _lin_root(rng, r), lin(), lin()],
        "12C-1": lambda: [_lin_root(rng, r), _lin_root(rng, r), _lin_root(rng, r), lin()],
        "12C-2": lambda: [_lin_root(rng, r), _lin_root(rng, r), _lin_root(rng, s), _lin_root(rng, s)],
    }
    return table[label]()


def sample_bases(sec: Section, label: str, rng: random.Random,
                 max_tries: int = 500) -> Tuple[List[Poly], Optional[Poly]]:
    """Bases (role order) and transcendental argument satisfying exactly case ``label``'s conditions."""
    for _ in range(max_tries):
        bases = _bases(label, rng)
        arg = random_poly(rng, 1) if sec.transc else None
        if any(b.degree != role.degree for b, role in zip(bases, sec.roles)):
            continue
        values = sec.guard_values(sec.base_env(bases, arg))
        if label in [c.label for c in sec.matching_cases(values)]:
            return bases, arg
    raise RuntimeError(f"could not sample case {label}")


def sample_integrand(form: str, label: str, rng: random.Random, kind: Optional[str] = None,
                     cofactor_degree: Optional[int] = None, exponent=random_exponent) -> Integrand:
    """Random integrand of ``form`` in case ``label`` with factors in role order."""
    sec = FORMS[form]
    bases, arg = sample_bases(sec, label, rng)
    if cofactor_degree is None:
        cofactor_degree = rng.randint(0, sec.case(label).max_cofactor)
    cof = random_poly(rng, cofactor_degree) if cofactor_degree >= 0 else ONE
    transc = TranscFactor(kind or "exp", arg) if sec.transc else None
    return Integrand(cof, transc, tuple(PowerFactor(b, exponent(rng)) for b in bases))


def sample_for_rule(rule, rng: random.Random) -> Integrand:
    deg = rng.randint(0, rule.max_cofactor_degree)
    return sample_integrand(rule.form, rule.case, rng, kind=rule.transc_in, cofactor_degree=deg)
