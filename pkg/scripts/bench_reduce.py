"""Time reductions of (1+x^2)^(-n) and of random generic integrands per family."""
import argparse
import random
import time
from fractions import Fraction

from recurint.arith import Poly
from recurint.engine import reduce
from recurint.model import Integrand, PowerFactor
from recurint.sampling import sample_integrand
from recurint.sections import FORMS
from recurint.text import print_expr


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--per-form", type=int, default=20)
    ap.add_argument("--max-exp", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    q = Poly([1, 0, 1])
    for n in (5, 10, 25, 50, 100):
        t0 = time.perf_counter()
        r = reduce(Integrand(Poly([1]), None, (PowerFactor(q, -n),)))
        print(f"(1+x^2)^(-{n}): {len(r.trace)} steps, {1000 * (time.perf_counter() - t0):.1f} ms, "
              f"residual {[print_expr(i) for _, i in r.residuals]}")
    rng = random.Random(a.seed)
    exponent = lambda r: Fraction(r.randint(-a.max_exp * 2, a.max_exp * 2), 2) or Fraction(1, 2)
    for form, sec in sorted(FORMS.items()):
        t0 = time.perf_counter()
        steps = worst = 0
        for _ in range(a.per_form):
            i = sample_integrand(form, sec.cases[0].label, rng, exponent=exponent)
            s0 = time.perf_counter()
            steps += len(reduce(i).trace)
            worst = max(worst, time.perf_counter() - s0)
        dt = time.perf_counter() - t0
        print(f"{form:5s} {a.per_form} inputs, {steps} steps, {dt:.2f}s total, worst {1000 * worst:.0f} ms")


if __name__ == "__main__":
    main()
