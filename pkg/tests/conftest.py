from fractions import Fraction

import pytest
from hypothesis import strategies as st

from recurint.arith import Poly
from recurint.catalog import default_catalog

rats = st.fractions(min_value=-20, max_value=20, max_denominator=9)
nonzero_rats = rats.filter(lambda r: r != 0)


def polys(min_degree=0, max_degree=4):
    return st.integers(min_degree, max_degree).flatmap(
        lambda d: st.tuples(st.lists(rats, min_size=d, max_size=d), nonzero_rats)
        .map(lambda t: Poly(list(t[0]) + [t[1]])))


@pytest.fixture(scope="session")
def catalog():
    return default_catalog()


def P(*cs):
    return Poly([Fraction(c) for c in cs])


def reversal_defects(rule, i, first=1):
    """Apply ``rule`` solving for one side, then the same rule the other way on the result.

    Returns a list of problems (empty when the two steps are exact inverses).
    """
    from recurint.catalog import instantiate, instantiate_for_partner, merge_algterms
    from recurint.engine import apply_step

    from recurint.errors import SolvedCoefficientZero

    if first == 1:
        s1 = apply_step(instantiate(rule, i), 1)
        if s1.next is None:
            raise SolvedCoefficientZero("closed form; nothing to invert")
        s2 = apply_step(instantiate_for_partner(rule, s1.next), 2)
    else:
        s1 = apply_step(instantiate_for_partner(rule, i), 2)
        s2 = apply_step(instantiate(rule, s1.next), 1)
    problems = []
    back = s2.next
    if back.factors != i.factors or back.transc != i.transc:
        problems.append(f"returned to {back}")
    elif back.cofactor * (s1.scale * s2.scale) != i.cofactor:
        problems.append(f"cofactor {back.cofactor} * {s1.scale * s2.scale} != {i.cofactor}")
    net = merge_algterms(list(s1.alg_terms) + [g.scaled(s1.scale) for g in s2.alg_terms])
    if net:
        problems.append(f"algebraic terms do not cancel: {net}")
    return problems


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
