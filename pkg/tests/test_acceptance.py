"""Acceptance suite: one PASS/FAIL line per criterion, with pinned thresholds."""
import random
import time
from fractions import Fraction


from recurint.arith import ONE
from recurint.catalog import default_catalog, instantiate
from recurint.cli import main
from recurint.engine import reduce
from recurint.errors import (CofactorTooLarge, GuardViolated, SolvedCoefficientZero, UnsupportedDegeneracy,
                             UnsupportedForm, UnsupportedMerge)
from recurint.model import Integrand, PowerFactor, TranscFactor, classify, degeneracy_profile, normalize, potential, role_orderings
from recurint.sampling import sample_bases, sample_for_rule, sample_integrand
from recurint.sections import FORMS
from recurint.text import parse_expr, print_expr
from recurint.verify import selftest_catalog, verify_result

from conftest import ACCEPTANCE_LINES, P, reversal_defects

# pinned thresholds
RULE_COUNT = 136
SELFTEST_SAMPLES, SELFTEST_SEED, SELFTEST_SECONDS = 25, 42, 60.0
SOUNDNESS_PER_FORM = 100
TERMINATION_INPUTS, TERMINATION_MAX_EXP = 1000, 50
Q2_MINUS_50_SECONDS = 1.0
ROUND_TRIP_INPUTS = 1000
WINDOW = (Fraction(-1), Fraction(0))
INTRO = "(1 - x + 3*x^2) * (1 + x + x^2)^(-2) * (1 - x + x^2)^(-1/2)"


def report(num, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num}: {title} -- {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_c1_catalog_cardinality(capsys):
    n = len(default_catalog())
    main(["rules"])
    last = capsys.readouterr().out.strip().splitlines()[-1]
    report(1, "catalog cardinality", n == RULE_COUNT and last == f"{RULE_COUNT} rules",
           f"catalog holds {n} rules; 'rules' reports '{last}' (required {RULE_COUNT})")


def test_c2_catalog_identity_suite():
    t0 = time.perf_counter()
    reps = selftest_catalog(SELFTEST_SAMPLES, SELFTEST_SEED)
    dt = time.perf_counter() - t0
    good = [r for r in reps if r.ok and r.checked == SELFTEST_SAMPLES]
    checks = sum(r.checked for r in reps)
    bad = [r.rule_id for r in reps if r not in good]
    ok = len(good) == RULE_COUNT and dt < SELFTEST_SECONDS
    report(2, "catalog identity suite", ok,
           f"{len(good)}/{len(reps)} rules with zero residual on {checks} exact checks in {dt:.1f}s "
           f"(required {RULE_COUNT}/{RULE_COUNT}, < {SELFTEST_SECONDS:.0f}s){'; failing ' + ','.join(bad) if bad else ''}")


def test_c3_worked_example():
    i = parse_expr(INTRO)
    r = reduce(i)
    alg = [(g.weight, g.multiplier, g.factors) for g in r.algebraic]
    want_alg = [(Fraction(1), P(1, 1), (PowerFactor(P(1, -1, 1), Fraction(1, 2)), PowerFactor(P(1, 1, 1), -1)))]
    want_res = [(Fraction(1, 2), Integrand(P(3, -1), None,
                                          (PowerFactor(P(1, -1, 1), Fraction(-1, 2)), PowerFactor(P(1, 1, 1), -1))))]
    ok = alg == want_alg and r.residuals == want_res and verify_result(i, r).is_zero()
    report(3, "worked example", ok,
           f"algebraic {'exact' if alg == want_alg else 'MISMATCH'}, residual "
           f"{'exact' if r.residuals == want_res else 'MISMATCH'}: 1/2*INT({print_expr(r.residuals[0][1])})")


def _soundness_sample(form, rng):
    sec = FORMS[form]
    case = rng.choice(sec.cases).label
    kind = rng.choice(["exp", "cos", "sin"]) if sec.transc else None

    def exponent(r):
        while True:
            e = Fraction(r.randint(-8, 8), r.choice([1, 2]))
            if e:
                return e

    return sample_integrand(form, case, rng, kind=kind, cofactor_degree=rng.randint(0, sec.max_cofactor),
                            exponent=exponent)


def test_c4_reduction_soundness():
    rng = random.Random(2024)
    failures, statuses = [], {"Terminal": 0, "Obstructed": 0}
    rejected = 0
    for form in FORMS:
        done = 0
        while done < SOUNDNESS_PER_FORM:
            i = _soundness_sample(form, rng)
            try:
                if classify(normalize(i)).tag != form:
                    rejected += 1  # merged bases changed the family
                    continue
                r = reduce(i)
            except (UnsupportedForm, CofactorTooLarge, UnsupportedDegeneracy, UnsupportedMerge):
                rejected += 1
                continue
            done += 1
            statuses[r.status] += 1
            if not verify_result(r.input, r).is_zero():
                failures.append(f"{form}: {print_expr(r.input)}")
            if r.status == "Terminal" and any(potential(x.exponents, WINDOW) for _, x in r.residuals):
                failures.append(f"{form}: terminal residual outside window")
    total = SOUNDNESS_PER_FORM * len(FORMS)
    report(4, "reduction soundness", not failures,
           f"{total - len(failures)}/{total} reductions reconstruct exactly ({SOUNDNESS_PER_FORM} per form x {len(FORMS)} forms; "
           f"{statuses['Terminal']} Terminal, {statuses['Obstructed']} Obstructed; {rejected} samples outside the families resampled)"
           + (f"; first failure {failures[0]}" if failures else ""))


def test_c5_reversibility():
    cat = default_catalog()
    rng = random.Random(55)
    flagged = [r for r in cat if r.reversible]
    trig = [r for r in cat if r.transc_in in ("cos", "sin")]
    rules = flagged + [r for r in trig if r not in flagged]
    problems, checked = [], 0
    for rule in rules:
        for first in (1, 2):
            got = 0
            for _ in range(200):
                if got == 5:
                    break
                i = (sample_for_rule(rule, rng) if first == 1 else
                     sample_integrand(rule.form, rule.case, rng, kind=rule.transc_out, cofactor_degree=0))
                try:
                    defects = reversal_defects(rule, i, first)
                except (SolvedCoefficientZero, GuardViolated, ZeroDivisionError):
                    continue
                got += 1
                checked += 1
                problems += [f"{rule.id}: {d}" for d in defects]
            if got < 5:
                problems.append(f"{rule.id}: too few usable samples")
    report(5, "reversibility", not problems,
           f"{len(rules)} rules ({len(flagged)} flagged, {len(trig)} trig), {checked} forward/backward round trips exact"
           + (f"; {problems[0]}" if problems else ""))


# (form, bases in role order, expected case label or None for rejection)
ROUTING_MATRIX = [
    ("Q2", [P(1, 1, 1)], "1"),
    ("Q2", [P(1, 2, 1)], None),
    ("C3", [P(-1, 1) * P(-2, 1) * P(3, 1)], "2A"),
    ("C3", [P(2, -3, 0, 1)], "2B"),
    ("C3", [P(-1, 1) ** 3], None),
    ("Q4", [P(-1, 1) * P(-2, 1) * P(-3, 1) * P(1, 1)], "3A"),
    ("Q4", [P(-1, 1) ** 2 * P(1, 0, 1)], "3B"),
    ("Q4", [P(-1, 1) ** 3 * P(2, 1)], "3C-1"),
    ("Q4", [P(1, 1, 1) ** 2], "3C-2"),
    ("Q4", [P(-1, 1) ** 2 * P(-2, 1) ** 2], "3C-2"),
    ("Q4", [P(-1, 1) ** 4], None),
    ("LL", [P(1, 1), P(2, 1)], "4"),
    ("EL", [P(1, 1)], "5"),
    ("LQ", [P(1, 1), P(1, 1, 1)], "6A"),
    ("LQ", [P(1, 1), P(1, 1) * P(2, 1)], "6B-1"),
    ("LQ", [P(1, 1), P(-2, 1) ** 2], "6B-2"),
    ("LQ", [P(1, 1), P(1, 1) ** 2], None),
    ("EQ", [P(1, 1, 1)], "7A"),
    ("EQ", [P(-1, 1) ** 2], "7B"),
    ("QQ", [P(1, 1, 1), P(2, -1, 3)], "8A"),
    ("QQ", [P(-1, 1) * P(2, 1), P(-1, 1) * P(3, 1)], "8B"),
    ("QQ", [P(-1, 1) ** 2, P(1, 1, 1)], "8C"),
    ("QQ", [P(1, 1, 1), P(2, 2, 2)], "8D-1"),
    ("QQ", [P(-1, 1) ** 2, P(-1, 1) * P(2, 1)], "8D-2"),
    ("QQ", [P(-1, 1) ** 2, P(2, 1) ** 2], "8D-3"),
    ("LLL", [P(1, 1), P(2, 1), P(3, 1)], "9A"),
    ("LLL", [P(1, 1), P(2, 2), P(3, 1)], "9B"),
    ("ELL", [P(1, 1), P(2, 1)], "10A"),
    ("ELL", [P(1, 1), P(3, 3)], "10B"),
    ("LLQ", [P(1, 1), P(2, 1), P(1, 0, 1)], "11A"),
    ("LLQ", [P(1, 1), P(2, 2), P(1, 0, 1)], "11B"),
    ("LLQ", [P(1, 1), P(2, 1), P(1, 1) * P(3, 1)], "11C"),
    ("LLQ", [P(1, 1), P(2, 1), P(-3, 1) ** 2], "11D"),
    ("LLQ", [P(1, 1), P(2, 2), P(1, 1) * P(3, 1)], "11E-1"),
    ("LLQ", [P(1, 1), P(2, 2), P(-3, 1) ** 2], "11E-2"),
    ("LLQ", [P(1, 1), P(2, 1), P(1, 1) * P(2, 1)], "11E-3"),
    ("LLQ", [P(1, 1), P(2, 1), P(1, 1) ** 2], "11E-4"),
    ("LLLL", [P(1, 1), P(2, 1), P(3, 1), P(4, 1)], "12A"),
    ("LLLL", [P(1, 1), P(2, 2), P(3, 1), P(4, 1)], "12B"),
    ("LLLL", [P(1, 1), P(2, 2), P(3, 3), P(4, 1)], "12C-1"),
    ("LLLL", [P(1, 1), P(2, 2), P(3, 1), P(6, 2)], "12C-2"),
]


def _raw(form, bases, kind="exp"):
    sec = FORMS[form]
    transc = TranscFactor(kind, P(1, 2)) if sec.transc else None
    exps = [Fraction(1, 3), Fraction(-2, 5), Fraction(3, 7), Fraction(-5, 9)]
    return Integrand(ONE, transc, tuple(PowerFactor(b, e) for b, e in zip(bases, exps)))


def _generic_rules_reject(i, form):
    """Every relation of the family's nondegenerate case, under every role ordering, must refuse ``i``."""
    sec = FORMS[form]
    generic = sec.cases[0].label
    leaks = []
    for rule in default_catalog().by_case.get((form, generic), []):
        if rule.transc_in not in (None, i.kind):
            continue
        for ordering in role_orderings(i, sec):
            try:
                instantiate(rule, i, ordering)
                leaks.append(f"{rule.id}{ordering}")
            except GuardViolated:
                pass
    return leaks


def test_c6_degeneracy_routing():
    misrouted, leaks, attempts = [], [], 0
    for form, bases, want in ROUTING_MATRIX:
        i = _raw(form, bases)
        try:
            got = degeneracy_profile(i).case
        except UnsupportedDegeneracy:
            got = None
        if got != want:
            misrouted.append(f"{form} {[str(b) for b in bases]} -> {got} (want {want})")
        if want != FORMS[form].cases[0].label:
            bad = _generic_rules_reject(i, form)
            attempts += 1
            leaks += bad
    rng = random.Random(66)
    for form, sec in FORMS.items():
        for case in sec.cases[1:]:
            for _ in range(10):
                bases, arg = sample_bases(sec, case.label, rng)
                i = Integrand(ONE, TranscFactor("exp", arg) if arg else None,
                              tuple(PowerFactor(b, Fraction(1, 3)) for b in bases))
                attempts += 1
                leaks += _generic_rules_reject(i, form)
    ok = not misrouted and not leaks
    report(6, "degeneracy routing", ok,
           f"{len(ROUTING_MATRIX) - len(misrouted)}/{len(ROUTING_MATRIX)} matrix inputs routed to their single case; "
           f"nondegenerate relations raised GuardViolated on all {attempts} degenerate inputs"
           + (f"; misrouted {misrouted[:2]}" if misrouted else "") + (f"; leaked {leaks[:3]}" if leaks else ""))


def test_c7_termination():
    rng = random.Random(77)
    forms = sorted(FORMS)
    violations, steps_total, obstructed = [], 0, 0

    def exponent(r):
        while True:
            e = Fraction(r.randint(-TERMINATION_MAX_EXP * 4, TERMINATION_MAX_EXP * 4), r.choice([1, 2, 3, 4]))
            if e and abs(e) <= TERMINATION_MAX_EXP:
                return e

    t0 = time.perf_counter()
    for k in range(TERMINATION_INPUTS):
        form = forms[k % len(forms)]
        sec = FORMS[form]
        case = sec.cases[0]
        kind = rng.choice(["exp", "cos", "sin"]) if sec.transc else None
        i = sample_integrand(form, case.label, rng, kind=kind,
                             cofactor_degree=rng.randint(0, case.max_cofactor), exponent=exponent)
        phi0 = potential(normalize(i).exponents, WINDOW)
        r = reduce(i)
        steps_total += len(r.trace)
        obstructed += r.status == "Obstructed"
        if len(r.trace) > phi0:
            violations.append(f"{print_expr(i)}: {len(r.trace)} steps > {phi0}")
        for s in r.trace:
            if s.next is not None and potential(s.next.exponents, WINDOW) >= potential(s.current.exponents, WINDOW):
                violations.append(f"{print_expr(i)}: potential did not drop at {s.rule}")
                break
    batch = time.perf_counter() - t0
    t0 = time.perf_counter()
    big = reduce(Integrand(ONE, None, (PowerFactor(P(1, 0, 1), -50),)))
    dt = time.perf_counter() - t0
    ok = not violations and dt < Q2_MINUS_50_SECONDS and len(big.trace) == 49
    report(7, "termination", ok,
           f"{TERMINATION_INPUTS} inputs (|exponent| <= {TERMINATION_MAX_EXP}) finished in {steps_total} steps, "
           f"each within its initial potential and strictly decreasing ({batch:.1f}s total); "
           f"(1+x^2)^(-50) took {len(big.trace)} steps in {dt * 1000:.0f} ms (required < {Q2_MINUS_50_SECONDS:.0f} s)"
           + (f"; {violations[0]}" if violations else ""))


def test_c8_parser_round_trip():
    rng = random.Random(88)
    forms = sorted(FORMS)
    mismatches = []
    for k in range(ROUND_TRIP_INPUTS):
        form = forms[k % len(forms)]
        sec = FORMS[form]
        i = sample_integrand(form, rng.choice(sec.cases).label, rng,
                             kind=rng.choice(["exp", "cos", "sin"]) if sec.transc else None)
        if rng.random() < 0.3:
            i = i.with_cofactor(i.cofactor * Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 9)))
        i = normalize(i)
        if parse_expr(print_expr(i), check_form=False) != i:
            mismatches.append(print_expr(i))
    intro = classify(parse_expr(INTRO)).tag
    ok = not mismatches and intro == "QQ"
    report(8, "parser round trip", ok,
           f"{ROUND_TRIP_INPUTS - len(mismatches)}/{ROUND_TRIP_INPUTS} integrands survive parse(print(i)); "
           f"worked-example string parses to {intro}" + (f"; first mismatch {mismatches[0]}" if mismatches else ""))
