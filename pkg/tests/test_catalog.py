import json
import random
from collections import Counter
from fractions import Fraction

import pytest

from recurint.arith import ONE
from recurint.catalog import AlgTerm, instantiate, instantiate_for_partner, load_catalog, merge_algterms, rules_for
from recurint.errors import GuardViolated, NoRuleForCase, UnsupportedForm
from recurint.model import Integrand, PowerFactor, TranscFactor, classify
from recurint.sampling import sample_for_rule
from recurint.sections import FORMS
from recurint.verify import relation_residual

from conftest import P


def I(*factors, cof=ONE, transc=None):
    return Integrand(cof, transc, tuple(PowerFactor(b, e) for b, e in factors))


def test_cardinality(catalog):
    assert len(catalog) == 136
    assert len({r.id for r in catalog}) == 136


def test_every_family_and_case_has_rules(catalog):
    counts = Counter((r.form, r.case) for r in catalog)
    for form, sec in FORMS.items():
        for case in sec.cases:
            assert counts[(form, case.label)] > 0, (form, case.label)


def test_rule_structure(catalog):
    for r in catalog:
        assert any(r.shift) and set(r.shift) <= {-1, 0, 1}
        assert len(r.shift) == r.section.nroles
        assert r.cofactor_dim - 1 <= r.section.case(r.case).max_cofactor
        if r.section.transc:
            assert r.transc_in and r.transc_out
        assert r.anchor and r.relation.startswith(r.anchor)


def test_trig_rules_pair_up(catalog):
    kinds = Counter((r.transc_in, r.transc_out) for r in catalog if r.transc_in in ("cos", "sin"))
    assert kinds[("cos", "sin")] == kinds[("sin", "cos")] > 0


def test_instantiate_examples(catalog):
    inst = instantiate(catalog["1.1"], I((P(1, 0, 1), -2)))
    assert inst.k1 == -4
    assert inst.integrand2 == I((P(1, 0, 1), -1), cof=P(2))
    assert inst.alg_terms == (AlgTerm(Fraction(1), P(0, 2), (PowerFactor(P(1, 0, 1), -1),)),)

    inst = instantiate(catalog["1.1"], I((P(1, 0, 1), 1)))
    assert (inst.k1, inst.integrand2.cofactor) == (8, P(-10))
    assert inst.algTerm.multiplier == P(0, 2) and inst.algTerm.factors[0].exponent == 2

    inst = instantiate(catalog["4.2"], I((P(1, 1), 0), (P(2, 1), -1)))
    assert inst.k1 == 1
    assert inst.integrand2 == I((P(1, 1), 1), (P(2, 1), -2), cof=P(-1))
    g = inst.algTerm
    assert g.multiplier * g.weight == P(-1)
    assert [f.exponent for f in g.factors] == [1, -1]


def test_instantiate_does_not_check_k1(catalog):
    inst = instantiate(catalog["4.1"], I((P(1, 1), -1), (P(2, 1), Fraction(1, 2))))
    assert inst.k1 == 0
    assert relation_residual(inst).is_zero()


def test_guard_violation_on_wrong_case(catalog):
    with pytest.raises(GuardViolated):
        instantiate(catalog["2A.1"], I(((P(-1, 1) ** 2) * P(2, 1), Fraction(1, 2))))
    with pytest.raises(GuardViolated):
        instantiate(catalog["4.1"], I((P(1, 1), 2), (P(2, 2), 1)))


def test_instantiate_shape_checks(catalog):
    with pytest.raises(UnsupportedForm):
        instantiate(catalog["1.1"], I((P(1, 1), 2)))
    with pytest.raises(UnsupportedForm):  # exp rule given a cosine integrand
        instantiate(catalog["5.1"], I((P(1, 1), 2), transc=TranscFactor("cos", P(0, 1))))
    with pytest.raises(UnsupportedForm):
        instantiate(catalog["5.1"], I((P(1, 1), 2)))


def test_partner_instantiation_hits_target(catalog):
    rng = random.Random(5)
    for rule in catalog:
        i = sample_for_rule(rule, rng)
        inst = instantiate(rule, i)
        if inst.integrand2 is None:
            continue
        back = instantiate_for_partner(rule, inst.integrand2)
        assert back.integrand2 == inst.integrand2
        assert relation_residual(back).is_zero()


def test_shift_preserves_form(catalog):
    rng = random.Random(11)
    for rule in catalog:
        i = sample_for_rule(rule, rng)
        inst = instantiate(rule, i)
        if inst.integrand2 is None:
            continue
        tag = classify(i.with_cofactor(ONE)).tag
        assert classify(inst.integrand2.with_cofactor(ONE)).tag == tag


def test_rules_for(catalog):
    assert rules_for("Q2", "1", (1,)) == [(catalog["1.1"], 1)]
    assert rules_for("Q2", "1", (-1,)) == [(catalog["1.1"], 2)]
    lower_m = [r.id for r, _ in rules_for("QQ", "8A", (-1, 0))]
    assert lower_m == ["8A.1", "8A.2"]
    with pytest.raises(NoRuleForCase):
        rules_for("C3", "2C", (1,))
    with pytest.raises(NoRuleForCase):
        rules_for("Q2", "1", (2,))


def test_export_import_round_trip(catalog, tmp_path):
    path = tmp_path / "catalog.json"
    catalog.export(path)
    records = json.loads(path.read_text())
    assert len(records) == 136
    assert {"id", "form", "case", "guards", "shift", "reversible", "anchor", "relation"} <= set(records[0])
    again = load_catalog(path)
    assert [r.id for r in again] == [r.id for r in catalog]
    assert [r.shift for r in again] == [r.shift for r in catalog]


def test_merge_algterms_cancels():
    g = AlgTerm(Fraction(3), P(1, 1), (PowerFactor(P(1, 1), Fraction(1, 2)),))
    assert merge_algterms([g, g.scaled(Fraction(-1))]) == []
    assert merge_algterms([g, g]) == [AlgTerm(Fraction(6), P(1, 1), g.factors)]
