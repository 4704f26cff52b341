"""Integrand text notation and JSON serialization of reduction results.

Grammar (``^`` binds tighter than ``*``; exponent parentheses are required for
negative and fractional exponents)::

    integrand := factor ("*" factor)*
    factor    := "(" poly ")" ["^" exponent] | ("exp"|"cos"|"sin") "(" poly ")" | ["-"] rational
    exponent  := integer | "(" ["-"] rational ")"
    poly      := ["-"] term (("+"|"-") term)*
    term      := rational ["*" var ["^" integer]] | var ["^" integer]

``(poly)`` alone is a cofactor piece; ``(poly)^e`` is a power factor.
"""
from __future__ import annotations

import json
from fractions import Fraction
from typing import List, Optional

from .arith import ONE, Poly, poly_str, rat_str
from .catalog import AlgTerm
from .errors import ExprSyntaxError, SymbolicExponent
from .expr import Token, tokenize
from .model import TRANSC_KINDS, Integrand, PowerFactor, TranscFactor, classify, normalize


class _TextParser:
    def __init__(self, text: str, var: str):
        self.toks = tokenize(text)
        self.i = 0
        self.var = var

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.kind == "op" and t.text == text

    def fail(self, what: str, *expected: str):
        t = self.peek()
        found = repr(t.text) if t.kind != "end" else "end of input"
        raise ExprSyntaxError(f"{what}, found {found}", t.pos, expected)

    def expect(self, op: str):
        if not self.at(op):
            self.fail(f"expected {op!r}", repr(op))
        self.take()

    def integer(self) -> int:
        t = self.peek()
        if t.kind != "num":
            self.fail("expected an integer", "integer")
        self.take()
        return int(t.text)

    def rational(self) -> Fraction:
        n = self.integer()
        if self.at("/"):
            self.take()
            d = self.integer()
            if d == 0:
                raise ExprSyntaxError("zero denominator", self.toks[self.i - 1].pos)
            return Fraction(n, d)
        return Fraction(n)

    def monomial_power(self) -> int:
        self.take()  # the variable
        if self.at("^"):
            self.take()
            return self.integer()
        return 1

    def is_var(self) -> bool:
        t = self.peek()
        return t.kind == "id" and t.text == self.var

    def term(self) -> Poly:
        if self.is_var():
            k = self.monomial_power()
            return Poly([0] * k + [1])
        t = self.peek()
        if t.kind == "id":
            raise ExprSyntaxError(f"unknown symbol {t.text!r} in polynomial", t.pos, (self.var, "number"))
        c = self.rational()
        if self.at("*") and self.toks[self.i + 1].kind == "id" and self.toks[self.i + 1].text == self.var:
            self.take()
            k = self.monomial_power()
            return Poly([0] * k + [c])
        return Poly([c])

    def poly(self) -> Poly:
        sign = 1
        if self.at("-"):
            self.take()
            sign = -1
        p = self.term() * sign
        while self.at("+") or self.at("-"):
            s = 1 if self.take().text == "+" else -1
            p = p + self.term() * s
        return p

    def exponent(self) -> Fraction:
        t = self.peek()
        if t.kind == "id":
            raise SymbolicExponent(f"symbolic exponent {t.text!r} at position {t.pos}; exponents must be rational literals")
        if t.kind == "num":
            return Fraction(self.integer())
        if not self.at("("):
            self.fail("expected an exponent", "integer", "(")
        self.take()
        t = self.peek()
        if t.kind == "id" or (t.kind == "op" and t.text == "-" and self.toks[self.i + 1].kind == "id"):
            name = t.text if t.kind == "id" else self.toks[self.i + 1].text
            raise SymbolicExponent(f"symbolic exponent {name!r} at position {t.pos}; exponents must be rational literals")
        sign = 1
        if self.at("-"):
            self.take()
            sign = -1
        e = self.rational() * sign
        self.expect(")")
        return e

    def parse(self) -> Integrand:
        cof = ONE
        transc = None
        factors: List[PowerFactor] = []
        while True:
            t = self.peek()
            if t.kind == "id" and t.text in TRANSC_KINDS:
                self.take()
                self.expect("(")
                arg = self.poly()
                self.expect(")")
                if transc is not None:
                    raise ExprSyntaxError("more than one transcendental factor", t.pos)
                if arg.degree != 1:
                    raise ExprSyntaxError(f"{t.text} argument must be linear", t.pos)
                transc = TranscFactor(t.text, arg)
            elif self.at("("):
                self.take()
                p = self.poly()
                self.expect(")")
                if self.at("^"):
                    self.take()
                    e = self.exponent()
                    if p.degree < 1:
                        raise ExprSyntaxError("power factor base must be nonconstant", t.pos)
                    factors.append(PowerFactor(p, e))
                else:
                    cof = cof * p
            elif t.kind == "num" or self.at("-"):
                sign = 1
                if self.at("-"):
                    self.take()
                    sign = -1
                cof = cof * (self.rational() * sign)
            elif t.kind == "id":
                raise ExprSyntaxError(f"unexpected symbol {t.text!r}", t.pos, ("(", "exp", "cos", "sin", "number"))
            else:
                self.fail("expected a factor", "(", "exp", "cos", "sin", "number")
            if self.at("*"):
                self.take()
                continue
            if self.peek().kind == "end":
                break
            self.fail("expected '*' or end of input", "*", "end of input")
        if cof.is_zero():
            raise ExprSyntaxError("integrand is identically zero", 0)
        return Integrand(cof, transc, tuple(factors))


def parse_expr(text: str, var: str = "x", check_form: bool = True) -> Integrand:
    """Parse, normalize and (unless ``check_form`` is false) classify an integrand."""
    i = normalize(_TextParser(text, var).parse())
    if check_form:
        classify(i)
    return i


def parse_poly(text: str, var: str = "x") -> Poly:
    p = _TextParser(text, var)
    out = p.poly()
    if p.peek().kind != "end":
        p.fail("expected end of polynomial", "end of input")
    return out


def _exp_str(e: Fraction) -> str:
    return rat_str(e) if e.denominator == 1 and e >= 0 else f"({rat_str(e)})"


def print_expr(i: Integrand, var: str = "x") -> str:
    parts = []
    if i.cofactor != ONE:
        parts.append(rat_str(i.cofactor.coeff(0)) if i.cofactor.is_const() else f"({poly_str(i.cofactor, var)})")
    if i.transc is not None:
        parts.append(f"{i.transc.kind}({poly_str(i.transc.arg, var)})")
    for f in i.factors:
        parts.append(f"({poly_str(f.base, var)})^{_exp_str(f.exponent)}")
    return " * ".join(parts) if parts else "1"


def print_algterm(g: AlgTerm, var: str = "x") -> str:
    body = Integrand(g.multiplier, g.transc, g.factors) if not g.multiplier.is_zero() else None
    if body is None:
        return "0"
    text = print_expr(body, var)
    return text if g.weight == 1 else f"{rat_str(g.weight)} * {text}"


# ------------------------------------------------------------------- JSON --

def _transc_json(t: Optional[TranscFactor]):
    return None if t is None else {"kind": t.kind, "arg": poly_str(t.arg)}


def algterm_json(g: AlgTerm) -> dict:
    return {
        "weight": rat_str(g.weight),
        "multiplier": poly_str(g.multiplier),
        "factors": [{"base": poly_str(f.base), "exponent": rat_str(f.exponent)} for f in g.factors],
        "transc": _transc_json(g.transc),
    }


def result_json(r) -> dict:
    return {
        "input": print_expr(r.input),
        "form": r.form,
        "case": r.case,
        "status": r.status,
        "reason": r.reason,
        "algebraic": [algterm_json(g) for g in r.algebraic],
        "residuals": [{"coefficient": rat_str(c), "integrand": print_expr(i)} for c, i in r.residuals],
        "trace": [{
            "rule": s.rule,
            "solveFor": s.solve_for,
            "scale": rat_str(s.scale),
            "algTerm": [algterm_json(g) for g in s.alg_terms],
            "current": print_expr(s.current),
            "next": print_expr(s.next) if s.next is not None else None,
        } for s in r.trace],
    }


def serialize_result(r, indent: Optional[int] = 2) -> str:
    return json.dumps(result_json(r), indent=indent)


def algterm_from_json(d: dict) -> AlgTerm:
    t = d.get("transc")
    return AlgTerm(
        Fraction(d["weight"]), parse_poly(d["multiplier"]),
        tuple(PowerFactor(parse_poly(f["base"]), Fraction(f["exponent"])) for f in d["factors"]),
        TranscFactor(t["kind"], parse_poly(t["arg"])) if t else None,
    )


def deserialize_result(text_or_obj):
    """Rebuild a :class:`~recurint.engine.ReductionResult` (trace omitted) from JSON."""
    from .engine import ReductionResult

    d = json.loads(text_or_obj) if isinstance(text_or_obj, str) else text_or_obj
    return ReductionResult(
        input=parse_expr(d["input"], check_form=False),
        status=d["status"],
        algebraic=[algterm_from_json(g) for g in d["algebraic"]],
        residuals=[(Fraction(x["coefficient"]), parse_expr(x["integrand"], check_form=False))
                   for x in d["residuals"]],
        reason=d.get("reason"),
        form=d.get("form"),
        case=d.get("case"),
    )
