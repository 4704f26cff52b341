"""Static description of the twelve integrand families.

Each family fixes the role layout of its power factors (which coefficient
letters and exponent symbol belong to which base), its named abbreviations and
guard expressions, and the zero/nonzero condition sets that define its
degeneracy cases. Conditions are evaluated on concrete base coefficients.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .expr import Compiled, parse_template


@dataclass(frozen=True)
class Role:
    letters: Tuple[str, ...]  # coefficient names, ascending powers
    exponent: str

    @property
    def degree(self) -> int:
        return len(self.letters) - 1

    @property
    def text(self) -> str:
        """The base as it is spelled in relation templates."""
        parts = []
        for k, c in enumerate(self.letters):
            parts.append(c if k == 0 else (f"{c}*x" if k == 1 else f"{c}*x^{k}"))
        return "(" + " + ".join(parts) + ")"


@dataclass(frozen=True)
class Case:
    label: str
    zero: Tuple[str, ...]
    nonzero: Tuple[str, ...]
    max_cofactor: int  # highest cofactor degree any rule of the case accepts


@dataclass
class Section:
    number: int
    form: str
    roles: Tuple[Role, ...]
    transc: bool
    guards: List[Tuple[str, str]]  # ordered (name, expression); abbreviations first
    cases: List[Case]
    max_cofactor: int  # highest cofactor degree of the family
    _compiled: Optional[List[Tuple[str, Compiled]]] = field(default=None, repr=False)

    @property
    def nroles(self) -> int:
        return len(self.roles)

    @property
    def degrees(self) -> Tuple[int, ...]:
        return tuple(r.degree for r in self.roles)

    def case(self, label: str) -> Case:
        for c in self.cases:
            if c.label == label:
                return c
        raise KeyError(label)

    def compiled_guards(self) -> List[Tuple[str, Compiled]]:
        if self._compiled is None:
            self._compiled = [(name, Compiled(parse_template(text), f"<guard {self.form}.{name}>"))
                              for name, text in self.guards]
        return self._compiled

    def base_env(self, bases, transc_arg=None) -> Dict[str, Fraction]:
        """Coefficient symbols for bases given in role order."""
        env: Dict[str, Fraction] = {}
        if self.transc:
            env["a"] = transc_arg.coeff(0)
            env["b"] = transc_arg.coeff(1)
        for role, base in zip(self.roles, bases):
            for k, letter in enumerate(role.letters):
                env[letter] = base.coeff(k)
        return env

    def guard_values(self, env: Dict[str, Fraction]) -> Dict[str, Fraction]:
        """Evaluate all guards in order; the values are also written into ``env``."""
        out = {}
        for name, fn in self.compiled_guards():
            v = fn(env)
            env[name] = v
            out[name] = v
        return out

    def matching_cases(self, values: Dict[str, Fraction]) -> List[Case]:
        return [c for c in self.cases
                if all(values[g] == 0 for g in c.zero) and all(values[g] != 0 for g in c.nonzero)]


def _lin(a, b, e):
    return Role((a, b), e)


def _quad(a, b, c, e):
    return Role((a, b, c), e)


SECTIONS: Dict[int, Section] = {}


def _add(sec: Section):
    SECTIONS[sec.number] = sec


_add(Section(1, "Q2", (_quad("a", "b", "c", "n"),), False,
             [("disc2", "4*a*c - b^2")],
             [Case("1", (), ("disc2",), 0)], 0))

_add(Section(2, "C3", (Role(("a", "b", "c", "d"), "n"),), False,
             [("ra", "2*(3*b*d - c^2)"), ("rb", "9*a*d - b*c"), ("rc", "2*(3*a*c - b^2)"),
              ("disc", "ra*rc - rb^2")],
             [Case("2A", (), ("disc",), 1),
              Case("2B", ("disc",), ("ra",), 0)], 1))

_add(Section(3, "Q4", (Role(("a", "b", "c", "d", "e"), "n"),), False,
             [("ra", "8*c*e - 3*d^2"), ("rb", "6*b*e - c*d"), ("rc1", "16*a*e - b*d"),
              ("rc2", "4*a*e + 2*b*d - c^2"), ("rd", "6*a*d - b*c"), ("re", "8*a*c - 3*b^2"),
              ("sa", "ra*rc2 - rb^2"), ("sb", "1/2*(ra*rd - rb*rc1)"), ("sc", "rb*rd - rc1*rc2"),
              ("sd", "1/2*(rb*re - rc1*rd)"), ("se", "rc2*re - rd^2"),
              ("disc", "sa*re - 2*sb*rd + sc*rc1"),
              ("tr1", "6*ra*a - 3*rb*b + rc1*c"), ("tr2", "rc1 - rc2"),
              ("dd1", "ra*d - 4*rb*e"), ("dd2", "rb*d - 4*rc2*e")],
             [Case("3A", (), ("disc",), 2),
              Case("3B", ("disc",), ("sa",), 1),
              Case("3C-1", ("tr1", "tr2"), ("ra",), 0),
              Case("3C-2", ("dd1", "dd2"), ("ra",), 0)], 2))

_add(Section(4, "LL", (_lin("a", "b", "m"), _lin("c", "d", "n")), False,
             [("res_ab_cd", "a*d - b*c")],
             [Case("4", (), ("res_ab_cd",), 0)], 0))

_add(Section(5, "EL", (_lin("c", "d", "n"),), True,
             [],
             [Case("5", (), (), 0)], 0))

_add(Section(6, "LQ", (_lin("a", "b", "m"), _quad("c", "d", "e", "n")), False,
             [("ra", "2*a*e - b*d"), ("rb", "a*d - 2*b*c"),
              ("res_lq", "ra*a - rb*b"), ("disc2", "4*c*e - d^2")],
             [Case("6A", (), ("res_lq", "disc2"), 1),
              Case("6B-1", ("res_lq",), ("ra",), 0),
              Case("6B-2", ("disc2",), ("ra",), 0)], 1))

_add(Section(7, "EQ", (_quad("c", "d", "e", "n"),), True,
             [("disc2", "4*c*e - d^2")],
             [Case("7A", (), ("disc2",), 1),
              Case("7B", ("disc2",), (), 0)], 1))

_add(Section(8, "QQ", (_quad("a", "b", "c", "m"), _quad("d", "e", "f", "n")), False,
             [("ra", "b*f - c*e"), ("rb", "a*f - c*d"), ("rc", "a*e - b*d"),
              ("sa", "ra*b - 2*rb*c"), ("sb", "ra*a - rc*c"), ("sc", "2*rb*a - rc*b"),
              ("sd", "2*rb*f - ra*e"), ("se", "rc*f - ra*d"),
              ("res_qq", "ra*rc - rb^2"), ("disc1", "4*a*c - b^2"), ("disc2", "4*d*f - e^2"),
              ("kappa", "2*a*f - b*e + 2*c*d")],
             [Case("8A", (), ("res_qq", "disc1", "disc2"), 2),
              Case("8B", ("res_qq",), ("kappa", "ra"), 1),
              Case("8C", ("disc1",), ("kappa", "disc2"), 1),
              Case("8D-1", ("ra", "rb"), ("kappa",), 0),
              Case("8D-2", ("disc1", "kappa"), ("disc2",), 0),
              Case("8D-3", ("disc1", "disc2"), ("ra",), 0)], 2))

_add(Section(9, "LLL", (_lin("a", "b", "m"), _lin("c", "d", "n"), _lin("e", "f", "p")), False,
             [("ra", "(c*f + d*e)*b - a*d*f"), ("rb", "b*c*e"),
              ("res_ab_cd", "a*d - b*c"), ("res_ab_ef", "a*f - b*e"), ("res_cd_ef", "c*f - d*e")],
             [Case("9A", (), ("res_ab_cd", "res_ab_ef", "res_cd_ef"), 1),
              Case("9B", ("res_ab_cd",), ("res_ab_ef",), 0)], 1))

_add(Section(10, "ELL", (_lin("c", "d", "m"), _lin("e", "f", "n")), True,
             [("res_cd_ef", "c*f - d*e")],
             [Case("10A", (), ("res_cd_ef",), 1),
              Case("10B", ("res_cd_ef",), (), 0)], 1))

_add(Section(11, "LLQ", (_lin("a", "b", "m"), _lin("c", "d", "n"), _quad("e", "f", "g", "p")), False,
             [("ra", "2*a*g - b*f"), ("rb", "a*f - 2*b*e"), ("rc", "2*c*g - d*f"), ("rd", "c*f - 2*d*e"),
              ("re", "1/2*(ra*d + rc*b)"), ("rf", "1/2*(ra*c + rd*b)"), ("rg", "1/2*(rb*c + rd*a)"),
              ("se", "2*rf*g - re*f"), ("sf", "rg*g - re*e"), ("sg", "rg*f - 2*rf*e"),
              ("res_ab_cd", "a*d - b*c"), ("res_ab_q", "ra*a - rb*b"), ("res_cd_q", "rc*c - rd*d"),
              ("disc2", "4*e*g - f^2")],
             [Case("11A", (), ("res_ab_cd", "res_ab_q", "res_cd_q", "disc2"), 2),
              Case("11B", ("res_ab_cd",), ("res_ab_q", "disc2"), 1),
              Case("11C", ("res_ab_q",), ("res_ab_cd", "disc2"), 1),
              Case("11D", ("disc2",), ("ra", "rc"), 1),
              Case("11E-1", ("res_ab_cd", "res_ab_q"), ("ra",), 0),
              Case("11E-2", ("res_ab_cd", "disc2"), ("ra",), 0),
              Case("11E-3", ("re", "rf"), ("res_ab_cd",), 0),
              Case("11E-4", ("ra", "rb"), ("res_ab_cd",), 0)], 2))

_add(Section(12, "LLLL",
             (_lin("a", "b", "m"), _lin("c", "d", "n"), _lin("e", "f", "p"), _lin("g", "h", "q")), False,
             [("ra", "(e*h + f*g)*b - a*f*h"), ("rb", "b*e*g"),
              ("re", "(a*h + b*g)*f - b*e*h"), ("rf", "a*f*g"),
              ("saa", "b*c*f*h + ra*d"), ("sab", "a*c*f*h + ra*c + rb*d"), ("sbb", "rb*c"),
              ("res_ab_cd", "a*d - b*c"), ("res_ab_ef", "a*f - b*e"), ("res_ab_gh", "a*h - b*g"),
              ("res_cd_ef", "c*f - d*e"), ("res_cd_gh", "c*h - d*g"), ("res_ef_gh", "e*h - f*g")],
             [Case("12A", (), ("res_ab_cd", "res_ab_ef", "res_ab_gh", "res_cd_ef", "res_cd_gh", "res_ef_gh"), 2),
              Case("12B", ("res_ab_cd",), ("res_ab_ef", "res_ab_gh", "res_ef_gh"), 1),
              Case("12C-1", ("res_ab_cd", "res_ab_ef"), ("res_ab_gh",), 0),
              Case("12C-2", ("res_ab_cd", "res_ef_gh"), ("res_ab_ef",), 0)], 2))

FORMS: Dict[str, Section] = {s.form: s for s in SECTIONS.values()}

#: (sorted factor degrees, has transcendental factor) -> form tag
SHAPES: Dict[Tuple[Tuple[int, ...], bool], str] = {
    (tuple(sorted(s.degrees)), s.transc): s.form for s in SECTIONS.values()
}


def section_for(form: str) -> Section:
    return FORMS[form]


def case_label_section(label: str) -> Section:
    """The family owning a case label such as ``"8D-2"``."""
    head = label.split("-")[0].rstrip("ABCDE")
    return SECTIONS[int(head)]
