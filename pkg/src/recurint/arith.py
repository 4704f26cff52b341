"""Exact rational scalars and dense univariate polynomials.

``Rat`` is :class:`fractions.Fraction`, which already keeps values in lowest
terms with a positive denominator. ``Poly`` stores ascending coefficients as a
tuple of ``Rat`` with no trailing zeros, so the zero polynomial is ``()``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce as _fold
from typing import Iterable, Sequence, Union

from .errors import BothZero, DivisionByZeroPoly

Rat = Fraction
Scalar = Union[int, Fraction]

#: degree of the zero polynomial
NEG_INF = -math.inf


def rat(value) -> Fraction:
    """Coerce an int, Fraction or ``"p/q"`` string to ``Rat``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    raise TypeError(f"cannot make an exact rational from {value!r}")


def rat_str(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


class Poly:
    """Immutable dense polynomial in the integration variable."""

    __slots__ = ("coeffs", "_hash")

    def __init__(self, coeffs: Iterable[Scalar] = ()):
        cs = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple = tuple(cs)
        self._hash = None

    @classmethod
    def _raw(cls, cs: list) -> "Poly":
        # cs already Fractions; strips trailing zeros
        while cs and not cs[-1]:
            cs.pop()
        p = cls.__new__(cls)
        p.coeffs = tuple(cs)
        p._hash = None
        return p

    @classmethod
    def const(cls, c: Scalar) -> "Poly":
        return cls((c,))

    @classmethod
    def x(cls) -> "Poly":
        return cls((0, 1))

    # -- basic properties -------------------------------------------------
    @property
    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else NEG_INF

    @property
    def lc(self) -> Fraction:
        return self.coeffs[-1] if self.coeffs else Fraction(0)

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def coeff(self, k: int) -> Fraction:
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else Fraction(0)

    def padded(self, n: int) -> list:
        """Coefficients zero-padded to length ``n`` (raises if too long)."""
        if len(self.coeffs) > n:
            raise ValueError(f"degree {self.degree} exceeds {n - 1}")
        return list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == Poly.const(other).coeffs
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(("Poly", self.coeffs))
        return self._hash

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        return f"Poly({self})"

    def __str__(self):
        return poly_str(self)

    # -- ring operations --------------------------------------------------
    def __neg__(self):
        return Poly._raw([-c for c in self.coeffs])

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            if not self.coeffs:
                return Poly.const(other)
            cs = list(self.coeffs)
            cs[0] = cs[0] + other
            return Poly._raw(cs)
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        cs = list(a)
        for i, c in enumerate(b):
            cs[i] = cs[i] + c
        return Poly._raw(cs)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, Poly)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Fraction)):
            return (-self) + other
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                return Poly._raw([])
            return Poly._raw([c * other for c in self.coeffs])
        if not isinstance(other, Poly):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return Poly._raw([])
        cs = [Fraction(0)] * (len(a) + len(b) - 1)
        for i, ca in enumerate(a):
            if not ca:
                continue
            for j, cb in enumerate(b):
                cs[i + j] += ca * cb
        return Poly._raw(cs)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise DivisionByZeroPoly("division of a polynomial by zero")
            inv = 1 / Fraction(other)
            return Poly._raw([c * inv for c in self.coeffs])
        return NotImplemented

    def __pow__(self, k):
        if isinstance(k, Fraction):
            if k.denominator != 1:
                return NotImplemented
            k = k.numerator
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = Poly.const(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other):
        return divrem(self, other)

    def __call__(self, x0: Scalar) -> Fraction:
        return poly_eval(self, x0)


X = Poly.x()
ONE = Poly.const(1)
ZERO = Poly()


def poly_arith(op: str, p: Poly, q: Poly):
    """Ring arithmetic dispatcher: ``add``, ``sub``, ``mul`` or ``divrem``."""
    if op == "add":
        return p + q
    if op == "sub":
        return p - q
    if op == "mul":
        return p * q
    if op == "divrem":
        return divrem(p, q)
    raise ValueError(f"unknown polynomial operation {op!r}")


def divrem(p: Poly, q: Poly):
    if q.is_zero():
        raise DivisionByZeroPoly("polynomial division by the zero polynomial")
    rem = list(p.coeffs)
    dq = len(q.coeffs) - 1
    if len(rem) - 1 < dq:
        return ZERO, p
    inv = 1 / q.coeffs[-1]
    quot = [Fraction(0)] * (len(rem) - dq)
    for k in range(len(rem) - 1 - dq, -1, -1):
        c = rem[k + dq] * inv
        quot[k] = c
        if c:
            for j, qc in enumerate(q.coeffs):
                rem[k + j] -= c * qc
    return Poly._raw(quot), Poly._raw(rem[:dq])


def poly_derivative(p: Poly) -> Poly:
    return Poly._raw([k * c for k, c in enumerate(p.coeffs)][1:])


def poly_eval(p: Poly, x0: Scalar) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x0 + c
    return acc


def monic(p: Poly) -> Poly:
    return p / p.lc if p else p


def poly_gcd(p: Poly, q: Poly) -> Poly:
    """Monic gcd by the Euclidean remainder sequence."""
    if p.is_zero() and q.is_zero():
        raise BothZero("gcd of two zero polynomials is undefined")
    while q:
        p, q = q, divrem(p, q)[1]
    return monic(p)


def content(p: Poly) -> Fraction:
    """Positive rational c such that p / c has coprime integer coefficients."""
    if not p:
        return Fraction(0)
    num = _fold(math.gcd, (abs(c.numerator) for c in p.coeffs))
    den = _fold(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in p.coeffs))
    return Fraction(num, den)


def canonical_split(p: Poly):
    """Split p = w * q with q primitive over Z and its lowest nonzero coefficient positive."""
    if not p:
        return Fraction(0), p
    w = content(p)
    first = next(c for c in p.coeffs if c)
    if first < 0:
        w = -w
    return w, p / w


def compose(p: Poly, q: Poly) -> Poly:
    """p(q(x))."""
    out = ZERO
    for c in reversed(p.coeffs):
        out = out * q + c
    return out


def solve_linear(rows: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
    """One exact solution of a (possibly non-square) system, or ``None`` if inconsistent.

    Free variables are set to zero.
    """
    n = len(rows[0]) if rows else 0
    m = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][col]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
    if any(row[-1] != 0 for row in m[r:]):
        return None
    sol = [Fraction(0)] * n
    for i, col in enumerate(pivots):
        sol[col] = m[i][-1]
    return sol


def _coef_str(c: Fraction) -> str:
    return rat_str(c)


def poly_str(p: Poly, var: str = "x") -> str:
    """Ascending-power text, e.g. ``1 - x + 3*x^2``."""
    if not p:
        return "0"
    parts = []
    for k, c in enumerate(p.coeffs):
        if not c:
            continue
        mag = -c if c < 0 else c
        if k == 0:
            body = _coef_str(mag)
        else:
            mono = var if k == 1 else f"{var}^{k}"
            body = mono if mag == 1 else f"{_coef_str(mag)}*{mono}"
        if not parts:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append((" - " if c < 0 else " + ") + body)
    return "".join(parts)
