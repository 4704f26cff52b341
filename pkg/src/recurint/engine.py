"""Reduction driver: steps, cofactor absorption and the potential-guided loop."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .arith import ONE, ZERO, canonical_split, rat_str
from .catalog import (AlgTerm, Catalog, RelationInstance, default_catalog, instantiate,
                      instantiate_for_partner, merge_algterms)
from .errors import (CatalogDefect, CofactorTooLarge, GuardViolated, MaxStepsExceeded, NoLinearFactor,
                     SolvedCoefficientZero, UnsupportedForm)
from .model import Integrand, case_plan, classify, degeneracy_profile, normalize, potential

DEFAULT_WINDOW = (Fraction(-1), Fraction(0))


@dataclass(frozen=True)
class ReduceOptions:
    window: Tuple[Fraction, Fraction] = DEFAULT_WINDOW  # (lo, hi]
    max_steps: int = 512
    verify_steps: bool = True


@dataclass(frozen=True)
class Step:
    """``INT(current) = sum(alg_terms) + scale * INT(next)``."""

    rule: str
    solve_for: int
    current: Integrand
    alg_terms: Tuple[AlgTerm, ...]
    scale: Fraction
    next: Optional[Integrand]
    branch: int = 0

    @property
    def algTerm(self) -> Optional[AlgTerm]:
        return self.alg_terms[0] if self.alg_terms else None


@dataclass
class ReductionResult:
    input: Integrand
    status: str  # "Terminal" or "Obstructed"
    algebraic: List[AlgTerm] = field(default_factory=list)
    residuals: List[Tuple[Fraction, Integrand]] = field(default_factory=list)
    trace: List[Step] = field(default_factory=list)
    reason: Optional[str] = None
    form: Optional[str] = None
    case: Optional[str] = None

    @property
    def terminal(self) -> bool:
        return self.status == "Terminal"


# ------------------------------------------------------------------ steps --

def apply_step(inst: RelationInstance, solve_for: int) -> Step:
    """Isolate one integral of ``k1*INT(f1) + INT(f2) + G = 0``.

    Both directions need ``k1 != 0``. Solving for the first integral when the
    partner coefficient vanishes gives a closed form (``next`` is None).
    Solving for the second integral needs a nonvanishing partner.
    """
    if solve_for not in (1, 2):
        raise ValueError("solve_for must be 1 or 2")
    if inst.k1 == 0:
        raise SolvedCoefficientZero(f"rule {inst.rule}: first coefficient vanishes at "
                                    f"exponents {_exps_str(inst.integrand1.exponents)}")
    if solve_for == 1:
        algs = tuple(g.scaled(-1 / inst.k1).canonical() for g in inst.alg_terms)
        if inst.integrand2 is None:
            return Step(inst.rule, 1, inst.integrand1, algs, Fraction(0), None)
        w, q = canonical_split(inst.integrand2.cofactor)
        return Step(inst.rule, 1, inst.integrand1, algs, -w / inst.k1, inst.integrand2.with_cofactor(q))
    if inst.integrand2 is None:
        raise SolvedCoefficientZero(f"rule {inst.rule}: partner coefficient vanishes")
    w, q = canonical_split(inst.integrand1.cofactor)
    return Step(inst.rule, 2, inst.integrand2, tuple(g.scaled(Fraction(-1)).canonical() for g in inst.alg_terms),
                -inst.k1 * w, inst.integrand1.with_cofactor(q))


def absorb_cofactor(i: Integrand) -> List[Tuple[Fraction, Integrand]]:
    """Expand the cofactor in powers of the first linear base: ``C = sum c_k L^k``.

    Returns ``(c_k, i with L's exponent raised by k and cofactor 1)`` for nonzero ``c_k``.
    """
    if i.cofactor.degree < 1:
        return [(Fraction(1), i)]
    idx = next((k for k, f in enumerate(i.factors) if f.degree == 1), None)
    if idx is None:
        raise NoLinearFactor(f"cofactor {i.cofactor} has degree {i.cofactor.degree} "
                             "and there is no linear base to absorb it")
    lin = i.factors[idx].base
    a, b = lin.coeff(0), lin.coeff(1)
    rest = i.cofactor
    out = []
    k = 0
    while not rest.is_zero():
        # rest(x) = c + L(x)*q(x) with c = rest(-a/b)
        c = rest(-a / b)
        q, _ = divmod(rest - c, lin)
        if c != 0:
            exps = list(i.exponents)
            exps[idx] += k
            out.append((c, Integrand(ONE, i.transc, tuple(f.with_exponent(e) for f, e in zip(i.factors, exps)))))
        rest = q
        k += 1
    return out


# ----------------------------------------------------------------- reduce --

def _exps_str(exps: Sequence[Fraction]) -> str:
    return "(" + ", ".join(rat_str(e) for e in exps) + ")"


class _Planner:
    """Candidate steps for one integrand form; case plans depend only on bases."""

    def __init__(self, catalog: Catalog, form: str, window):
        self.catalog = catalog
        self.form = form
        self.window = window
        self._plans: Dict = {}

    def plan(self, i: Integrand):
        key = (i.bases, i.transc.arg if i.transc else None)
        if key not in self._plans:
            self._plans[key] = case_plan(i, classify_shape(i))
        return self._plans[key]

    def max_cofactor(self, i: Integrand) -> int:
        return max((c.max_cofactor for _, _, cases in self.plan(i) for c in cases), default=0)

    def candidates(self, i: Integrand):
        phi = potential(i.exponents, self.window)
        out = []
        for rank, (ordering, _, cases) in enumerate(self.plan(i)):
            for case in cases:
                for rule in self.catalog.by_case.get((self.form, case.label), []):
                    for solve_for in (1, 2):
                        if solve_for == 1:
                            if rule.transc_in != i.kind or not rule.accepts_cofactor(i.cofactor):
                                continue
                            sign = 1
                        else:
                            if rule.transc_out != i.kind:
                                continue
                            sign = -1
                        exps = list(i.exponents)
                        for r, k in enumerate(ordering):
                            exps[k] += sign * rule.shift[r]
                        gain = phi - potential(exps, self.window)
                        if gain >= 1:
                            out.append(((-gain, rule.index, solve_for, rank), rule, solve_for, ordering))
        out.sort(key=lambda c: c[0])
        return out


def classify_shape(i: Integrand):
    return classify(i.with_cofactor(ONE))


def _step_for(rule, solve_for, ordering, i: Integrand) -> Step:
    if solve_for == 1:
        return apply_step(instantiate(rule, i, ordering, require_k1=True), 1)
    return apply_step(instantiate_for_partner(rule, i, ordering, require_k1=True), 2)


def reduce(i: Integrand, opts: Optional[ReduceOptions] = None, catalog: Optional[Catalog] = None) -> ReductionResult:
    """Drive every exponent into the window ``(lo, hi]`` by unit steps."""
    from .verify import step_residual

    opts = opts or ReduceOptions()
    cat = catalog or default_catalog()
    i = normalize(i)
    form = classify(i)
    profile = degeneracy_profile(i, form)
    planner = _Planner(cat, form.tag, opts.window)
    result = ReductionResult(i, "Terminal", form=form.tag, case=profile.case)
    algebraic: List[AlgTerm] = []
    residuals: List[Tuple[Fraction, Integrand]] = []
    reasons: List[str] = []
    work: List[Tuple[Fraction, Integrand, int]] = [(Fraction(1), i, 0)]
    branches = 1
    steps = 0
    while work:
        coef, cur, branch = work.pop(0)
        while True:
            if potential(cur.exponents, opts.window) == 0:
                residuals.append((coef, cur))
                break
            if cur.cofactor.degree > planner.max_cofactor(cur):
                try:
                    pieces = absorb_cofactor(cur)
                except NoLinearFactor as exc:
                    reasons.append(f"NoLinearFactor: {exc}")
                    residuals.append((coef, cur))
                    break
                (c0, first), rest = pieces[0], pieces[1:]
                for c, piece in rest:
                    work.append((coef * c, piece, branches))
                    branches += 1
                coef, cur = coef * c0, first
                continue
            step = None
            for _, rule, solve_for, ordering in planner.candidates(cur):
                try:
                    step = _step_for(rule, solve_for, ordering, cur)
                except (SolvedCoefficientZero, GuardViolated, CofactorTooLarge, UnsupportedForm, ZeroDivisionError):
                    continue
                break
            if step is None:
                reasons.append(_blocked(cur))
                residuals.append((coef, cur))
                break
            steps += 1
            if steps > opts.max_steps:
                raise MaxStepsExceeded(f"more than {opts.max_steps} steps")
            step = Step(step.rule, step.solve_for, step.current, step.alg_terms, step.scale, step.next, branch)
            if opts.verify_steps and not step_residual(step).is_zero():
                raise CatalogDefect(step.rule, f"{cur} (solveFor {step.solve_for})")
            result.trace.append(step)
            algebraic.extend(g.scaled(coef) for g in step.alg_terms)
            if step.next is None:  # closed form: nothing left to integrate
                break
            coef, cur = coef * step.scale, step.next
    result.algebraic = merge_algterms([_drop_zero(g) for g in algebraic])
    result.residuals = _merge_residuals(residuals)
    if reasons:
        result.status = "Obstructed"
        result.reason = "; ".join(reasons)
    return result


def _blocked(i: Integrand) -> str:
    if i.kind in ("cos", "sin"):
        return (f"NoApplicableRule: no {i.kind} relation decreases the potential at exponents "
                f"{_exps_str(i.exponents)}; a complex-exponential split would be needed")
    return f"NoApplicableRule: no relation decreases the potential at exponents {_exps_str(i.exponents)}"


def _drop_zero(g: AlgTerm) -> AlgTerm:
    return AlgTerm(g.weight, g.multiplier, tuple(f for f in g.factors if f.exponent != 0), g.transc)


def _merge_residuals(items: List[Tuple[Fraction, Integrand]]) -> List[Tuple[Fraction, Integrand]]:
    acc: Dict = {}
    order = []
    for coef, i in items:
        i = i.drop_zero_exponents()
        key = (i.transc, i.factors)
        if key not in acc:
            acc[key] = ZERO
            order.append(key)
        acc[key] = acc[key] + i.cofactor * coef
    out = []
    for key in order:
        w, q = canonical_split(acc[key])
        if w != 0:
            out.append((w, Integrand(q, key[0], key[1])))
    return out
