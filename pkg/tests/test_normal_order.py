import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quommute.algebra import (
    E,
    Expression,
    Rule,
    StructureTable,
    V,
    Vb,
    build_classical,
    build_spl21,
    build_spl_n1,
    word_charge,
    word_parity,
)
from quommute.normal_order import (
    NonTerminationError,
    Reducer,
    check_overlaps,
    normalize,
    overlap_triples,
    quommutator,
)
from quommute.representation import OSP12, build_osp12_rep, evaluate_in_rep
from quommute.scalar import Scalar

from .helpers import random_expression

q12 = Scalar.param("q12")


def w(*gs, c=1):
    return Expression.word(*gs, coeff=c)


def test_nilpotent_square_vanishes():
    e, trace = normalize(w(V(1), V(1)), build_spl_n1(2))
    assert not e
    assert len(trace) == 1


def test_fermion_swap():
    e, _ = normalize(w(V(2), V(1)), build_spl_n1(2))
    assert e == w(V(1), V(2), c=-q12.inverse())


def test_v_vbar_reorders_to_canonical():
    e, _ = normalize(w(V(1), Vb(1)), build_spl_n1(2))
    assert e == w(E(1, 1)) - w(Vb(1), V(1))


def test_unit_is_fixed():
    e, trace = normalize(Expression.unit(), build_spl_n1(2))
    assert e == Expression.unit()
    assert len(trace) == 0


def test_unknown_generator():
    with pytest.raises(KeyError):
        normalize(w(E(3, 1)), build_spl_n1(2))


def test_quommutator_definitions():
    a = w(E(1, 1))
    assert quommutator(a, a, 1) == Expression()
    assert quommutator(a, w(E(2, 2)), 1) == w(E(1, 1), E(2, 2)) - w(E(2, 2), E(1, 1))
    assert quommutator(a, a, 1, "anticommutator") == w(E(1, 1), E(1, 1), c=2)
    with pytest.raises(ValueError):
        quommutator(a, a, 1, "other")


def test_quommutator_of_same_argument_normalizes_to_zero():
    t = build_spl21(2, 3, 5)
    for g in t.order:
        e, _ = normalize(quommutator(w(g), w(g), 1), t)
        assert not e


def test_h_is_the_v_anticommutator():
    rep = build_osp12_rep(2, Fraction(3, 2))
    vm, vp, h = OSP12["V-"], OSP12["V+"], OSP12["H"]
    e = quommutator(w(vm), w(vp), Fraction(3, 2), "anticommutator")
    assert evaluate_in_rep(e, rep) == rep.matrix(h)


def test_spl_n1_three_passes():
    t = build_spl_n1(3, {(1, 2): 2, (1, 3): Fraction(3, 5), (2, 3): 7})
    report = check_overlaps(t)
    assert report.passed
    assert report.mode == "numeric"
    assert report.total_overlaps == len(overlap_triples(t))


def test_classical_passes():
    assert check_overlaps(build_classical(2)).passed
    assert check_overlaps(build_classical(3)).passed


def test_mutated_bracket_is_detected():
    t = build_spl21(2, 3, 5)
    key = (E(2, 1), E(1, 2))
    rules = dict(t.rules)
    rules[key] = Rule(rules[key].swap, rules[key].remainder.scale(2))
    bad = StructureTable(t.N, t.order, rules, t.nilpotents, t.params, "mutated")
    report = check_overlaps(bad)
    assert not report.passed
    assert any(E(2, 1) in tri and E(1, 2) in tri for tri, _ in report.failures)
    assert all(res for _, res in report.failures)


def test_cyclic_table_does_not_terminate():
    a, b = E(1, 1), E(2, 1)
    rules = {(b, a): Rule(1, w(b, a))}
    t = StructureTable(2, (a, b), rules, frozenset())
    with pytest.raises(NonTerminationError):
        normalize(w(b, a), t)


def test_parallel_matches_serial():
    t = build_spl_n1(3, {(1, 2): 2, (1, 3): Fraction(3, 5), (2, 3): 7})
    rules = dict(t.rules)
    key = (E(2, 1), E(1, 2))
    rules[key] = Rule(rules[key].swap, rules[key].remainder.scale(3))
    bad = StructureTable(t.N, t.order, rules, t.nilpotents)
    serial = check_overlaps(bad)
    parallel = check_overlaps(bad, workers=2)
    assert serial.to_dict() == parallel.to_dict()
    assert not serial.passed


def test_report_lists_corrections():
    report = check_overlaps(build_spl21(2, 3, 5))
    assert report.passed
    assert len(report.corrected_rules_used) == 4
    assert report.to_dict()["passed"] is True


def test_reducers_agree_on_words():
    t = build_spl21(2, 3, 5)
    left, right = Reducer(t), Reducer(t, rightmost=True)
    rng = random.Random(3)
    for _ in range(50):
        word = tuple(rng.choice(t.order) for _ in range(4))
        expected, _ = normalize(Expression({word: 1}), t)
        assert left.reduce_word(word) == expected == right.reduce_word(word)


TABLES = {
    "spl2": build_spl_n1(2, {(1, 2): Fraction(2, 3)}),
    "spl3": build_spl_n1(3, {(1, 2): 2, (1, 3): Fraction(3, 5), (2, 3): 7}),
    "spl21": build_spl21(2, 3, 5),
    "spl21_symbolic": build_spl21(),
}


@pytest.mark.parametrize("name", list(TABLES))
@settings(max_examples=25)
@given(seed=st.integers(0, 10 ** 6))
def test_normal_form_properties(name, seed):
    t = TABLES[name]
    e = random_expression(random.Random(seed), t.order)
    n, trace = normalize(e, t)
    assert t.is_canonical(n)
    again, trace2 = normalize(n, t)
    assert again == n and len(trace2) == 0
    for step in trace:
        for u in step.after.terms:
            assert word_charge(u) == word_charge(step.before)
            assert word_parity(u) == word_parity(step.before)


@settings(max_examples=25)
@given(seed=st.integers(0, 10 ** 6))
def test_normalize_is_linear(seed):
    t = TABLES["spl21"]
    rng = random.Random(seed)
    a, b = random_expression(rng, t.order), random_expression(rng, t.order)
    na, _ = normalize(a, t)
    nb, _ = normalize(b, t)
    nab, _ = normalize(a + b.scale(3), t)
    assert nab == na + nb.scale(3)
