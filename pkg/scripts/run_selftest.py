"""Fuzz every catalog relation against exact differentiation and print a summary."""
import argparse
import time
from collections import Counter

from recurint.verify import selftest_catalog


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=25)
    ap.add_argument("--seed", type=int, default=42)
    a = ap.parse_args()
    t0 = time.perf_counter()
    reports = selftest_catalog(a.samples, a.seed)
    dt = time.perf_counter() - t0
    per_case = Counter()
    for rep in reports:
        per_case[rep.case] += rep.ok
        if not rep.ok:
            print(f"FAIL {rep.rule_id}: {rep.failures[:1] or 'no usable samples'}")
    print("ok per case: " + ", ".join(f"{c}={n}" for c, n in sorted(per_case.items())))
    good = sum(r.ok for r in reports)
    print(f"{good}/{len(reports)} relations exact on {sum(r.checked for r in reports)} checks in {dt:.1f}s")


if __name__ == "__main__":
    main()
