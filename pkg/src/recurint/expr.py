"""Tokenizer, Pratt parser and compiler for relation templates.

Templates are written in the listing notation used for the catalog, e.g.
``(n + 1)*(4*a*c - b^2)*INT(F0^n, x) - 2*(2*n + 3)*c*INT(F0^(n + 1), x)``.
Role symbols ``F0..F3`` stand for the power-factor bases and ``EXP``/``COS``/
``SIN`` for the transcendental factor; they evaluate to :class:`PSum` values so
that a whole term like ``(b + 2*c*x)*F0^(n + 1)`` evaluates to a map from
(exponent vector, transcendental kind) to its polynomial coefficient.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .arith import ONE, Poly
from .errors import ExprSyntaxError

# ---------------------------------------------------------------- tokens --

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


@dataclass(frozen=True)
class Token:
    kind: str  # "num", "id", "op", "end"
    text: str
    pos: int


def tokenize(text: str) -> List[Token]:
    out = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        num, ident, op = m.groups()
        start = m.start(m.lastindex)
        if num is not None:
            out.append(Token("num", num, start))
        elif ident is not None:
            out.append(Token("id", ident, start))
        else:
            if op not in "+-*/^(),":
                raise ExprSyntaxError(f"unexpected character {op!r}", start, ("operator", "operand"))
            out.append(Token("op", op, start))
        pos = m.end()
    out.append(Token("end", "", n))
    return out


# ------------------------------------------------------------------- AST --
# Nodes are tuples: ("num", Fraction) ("sym", name) ("neg", a)
# ("add", a, b) ("sub", a, b) ("mul", a, b) ("div", a, b) ("pow", a, b)
# ("call", name, (args...))

_BINARY = {"+": (10, "add"), "-": (10, "sub"), "*": (20, "mul"), "/": (20, "div"), "^": (40, "pow")}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = tokenize(text)
        self.i = 0

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op: str) -> Token:
        t = self.take()
        if t.kind != "op" or t.text != op:
            raise ExprSyntaxError(f"expected {op!r}, found {t.text or 'end of input'!r}", t.pos, (op,))
        return t

    def parse(self):
        node = self.expr(0)
        t = self.peek()
        if t.kind != "end":
            raise ExprSyntaxError(f"unexpected {t.text!r}", t.pos, ("operator", "end of input"))
        return node

    def expr(self, rbp: int):
        left = self.prefix()
        while True:
            t = self.peek()
            if t.kind != "op" or t.text not in _BINARY:
                return left
            lbp, name = _BINARY[t.text]
            if lbp <= rbp:
                return left
            self.take()
            # ^ is right associative
            right = self.expr(lbp - 1 if name == "pow" else lbp)
            left = (name, left, right)

    def prefix(self):
        t = self.take()
        if t.kind == "num":
            return ("num", Fraction(int(t.text)))
        if t.kind == "id":
            if self.peek().kind == "op" and self.peek().text == "(":
                self.take()
                args = [self.expr(0)]
                while self.peek().kind == "op" and self.peek().text == ",":
                    self.take()
                    args.append(self.expr(0))
                self.expect(")")
                return ("call", t.text, tuple(args))
            return ("sym", t.text)
        if t.kind == "op" and t.text == "(":
            node = self.expr(0)
            self.expect(")")
            return node
        if t.kind == "op" and t.text == "-":
            # unary minus binds looser than ^ and tighter than * /
            return ("neg", self.expr(30))
        if t.kind == "op" and t.text == "+":
            return self.expr(30)
        raise ExprSyntaxError(f"unexpected {t.text or 'end of input'!r}", t.pos, ("number", "symbol", "("))


def parse_template(text: str):
    return _Parser(text).parse()


def free_symbols(node) -> set:
    tag = node[0]
    if tag == "sym":
        return {node[1]}
    if tag == "num":
        return set()
    if tag == "call":
        out = set()
        for a in node[2]:
            out |= free_symbols(a)
        return out
    out = set()
    for child in node[1:]:
        out |= free_symbols(child)
    return out


def signed_terms(node, sign: int = 1) -> List[Tuple[int, object]]:
    """Flatten a top-level sum into ``(sign, term)`` pairs."""
    tag = node[0]
    if tag == "add":
        return signed_terms(node[1], sign) + signed_terms(node[2], sign)
    if tag == "sub":
        return signed_terms(node[1], sign) + signed_terms(node[2], -sign)
    if tag == "neg":
        return signed_terms(node[1], -sign)
    return [(sign, node)]


def split_call(term, name: str):
    """Remove the single ``name(...)`` factor from a product chain.

    Returns ``(coefficient_node, call_args)``; ``call_args`` is ``None`` when
    the term contains no such call.
    """
    found = []

    def walk(node):
        tag = node[0]
        if tag == "call" and node[1] == name:
            found.append(node[2])
            return ("num", Fraction(1))
        if tag == "mul":
            return ("mul", walk(node[1]), walk(node[2]))
        if tag == "div":
            return ("div", walk(node[1]), node[2])
        if tag == "neg":
            return ("neg", walk(node[1]))
        return node

    coeff = walk(term)
    if len(found) > 1:
        raise ValueError(f"term contains {len(found)} {name} calls")
    return coeff, (found[0] if found else None)


# ------------------------------------------------------------- compiling --

# literal constants shared by all compiled templates
_GLOBALS: dict = {"__builtins__": {}}


def to_python(node) -> str:
    """Fully parenthesised Python source for a template node.

    Integer literals become named ``Fraction`` constants so division stays exact.
    """
    tag = node[0]
    if tag == "num":
        v = node[1]
        name = f"_q{v.numerator}" if v.denominator == 1 else f"_q{v.numerator}_{v.denominator}"
        _GLOBALS[name] = v
        return name
    if tag == "sym":
        return node[1]
    if tag == "neg":
        return f"(-{to_python(node[1])})"
    if tag == "call":
        raise ValueError(f"call {node[1]!r} cannot be compiled")
    op = {"add": "+", "sub": "-", "mul": "*", "div": "/", "pow": "**"}[tag]
    return f"({to_python(node[1])} {op} {to_python(node[2])})"


class Compiled:
    """A compiled template expression evaluated against an environment dict."""

    __slots__ = ("source", "code", "symbols")

    def __init__(self, node, label: str = "<template>"):
        self.source = to_python(node)
        self.code = compile(self.source, label, "eval")
        self.symbols = frozenset(free_symbols(node))

    def __call__(self, env: dict):
        return eval(self.code, _GLOBALS, env)


# ------------------------------------------------------------------ PSum --

class PSum:
    """Sum of terms ``poly * prod(F_i ^ e_i) * T`` keyed by ``(kind, exps)``.

    ``kind`` is ``None`` or one of ``"exp"``, ``"cos"``, ``"sin"``.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Tuple[Optional[str], tuple], Poly]):
        self.terms = {k: v for k, v in terms.items() if v}

    @classmethod
    def role(cls, i: int, nroles: int) -> "PSum":
        exps = tuple(Fraction(1) if j == i else Fraction(0) for j in range(nroles))
        return cls({(None, exps): ONE})

    @classmethod
    def transc(cls, kind: str, nroles: int) -> "PSum":
        return cls({(kind, (Fraction(0),) * nroles): ONE})

    def __repr__(self):
        return f"PSum({self.terms!r})"

    def _scaled(self, s):
        return PSum({k: v * s for k, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            return self._scaled(other)
        if not isinstance(other, PSum):
            return NotImplemented
        out: Dict = {}
        for (k1, e1), p1 in self.terms.items():
            for (k2, e2), p2 in other.terms.items():
                if k1 is not None and k2 is not None:
                    raise ValueError("product of two transcendental factors")
                key = (k1 or k2, tuple(a + b for a, b in zip(e1, e2)))
                out[key] = out.get(key, Poly()) + p1 * p2
        return PSum(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._scaled(1 / Fraction(other))
        return NotImplemented

    def __neg__(self):
        return self._scaled(Fraction(-1))

    def _as_psum(self, other):
        if isinstance(other, PSum):
            return other
        if isinstance(other, (int, Fraction, Poly)):
            nroles = len(next(iter(self.terms))[1]) if self.terms else 0
            p = other if isinstance(other, Poly) else Poly.const(other)
            return PSum({(None, (Fraction(0),) * nroles): p})
        return None

    def __add__(self, other):
        o = self._as_psum(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for k, v in o.terms.items():
            out[k] = out.get(k, Poly()) + v
        return PSum(out)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._as_psum(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __pow__(self, e):
        if not isinstance(e, (int, Fraction)):
            return NotImplemented
        if len(self.terms) != 1:
            raise ValueError("only a single role symbol may be raised to a power")
        (kind, exps), poly = next(iter(self.terms.items()))
        if kind is not None or poly != ONE or sum(1 for v in exps if v) != 1:
            raise ValueError("only a single role symbol may be raised to a power")
        return PSum({(None, tuple(v * e for v in exps)): ONE})

    def single(self):
        """The one ``(kind, exps, poly)`` term (raises unless exactly one)."""
        if len(self.terms) != 1:
            raise ValueError(f"expected a single power product, got {len(self.terms)}")
        (kind, exps), poly = next(iter(self.terms.items()))
        return kind, exps, poly
