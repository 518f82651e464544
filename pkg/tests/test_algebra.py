from fractions import Fraction

import pytest

from quommute.algebra import (
    CONVENTIONS,
    SPL21_CORRECTED,
    E,
    Expression,
    Relation,
    TableError,
    V,
    Vb,
    bosonic_truncation,
    build_classical,
    build_osp22_q,
    build_spl21,
    build_spl_n1,
    classical_limit,
    effective_parameter_rank,
    in_q,
    parse_generator,
    relabel,
    rescale,
    spl_generators,
    table_from_relations,
    word_charge,
    word_parity,
)
from quommute.normal_order import check_overlaps, word_measure
from quommute.scalar import Scalar

p, r, s = (Scalar.param(x) for x in "prs")
q12 = Scalar.param("q12")


def lin(*pairs):
    e = Expression()
    for c, g in pairs:
        e.add_term((g,), c)
    return e


def all_tables():
    return {
        "classical2": build_classical(2),
        "classical3": build_classical(3),
        "spl2": build_spl_n1(2),
        "spl3": build_spl_n1(3),
        "spl21": build_spl21(),
        "spl21_printed": build_spl21(convention="printed"),
        "osp22": build_osp22_q(),
    }


def test_generators_and_order():
    gens = spl_generators(2)
    assert len(gens) == 8
    assert gens[:2] == [Vb(1), Vb(2)]
    assert gens[-2:] == [V(1), V(2)]
    assert parse_generator("E(2,1)") == E(2, 1)
    assert parse_generator("Vb(2)") == Vb(2)
    with pytest.raises(ValueError):
        parse_generator("W(1)")


def test_spl_n1_at_one_is_classical():
    assert build_spl_n1(2, {(1, 2): 1}).equals(build_classical(2))


def test_spl_n1_gl_bracket():
    t = build_spl_n1(3)
    assert t.oriented(E(1, 2), E(2, 1)) == (1, lin((1, E(1, 1)), (-1, E(2, 2))))


def test_spl_n1_fermion_rules():
    t = build_spl_n1(2)
    assert t.rule(V(2), V(1)) == (-q12.inverse(), Expression())
    assert t.oriented(V(1), Vb(1)) == (-1, lin((1, E(1, 1))))
    assert t.nilpotents == frozenset(g for g in spl_generators(2) if g.is_fermion)


def test_spl_n1_rejects_bad_parameters():
    with pytest.raises(ValueError):
        build_spl_n1(1)
    with pytest.raises(ValueError):
        build_spl_n1(2, {(1, 2): 0})
    with pytest.raises(ValueError):
        build_spl_n1(2, {(1, 2): 1 + q12})


def test_spl21_unit_point_is_classical():
    assert build_spl21(1, 1, 1).equals(build_classical(2))
    assert build_osp22_q(1).equals(build_classical(2))


def test_spl21_printed_convention_is_a_sign_change():
    printed = build_spl21(convention="printed")
    flip = {g: (1 if g.kind == "V" else -1) for g in printed.order}
    assert rescale(printed, flip).equals(build_spl21())
    assert not build_spl21(1, 1, 1, convention="printed").equals(build_classical(2))


def test_spl21_one_parameter_limit_is_spl_n1():
    swap = {E(1, 1): E(2, 2), E(2, 2): E(1, 1), E(1, 2): E(2, 1), E(2, 1): E(1, 2),
            V(1): V(2), V(2): V(1), Vb(1): Vb(2), Vb(2): Vb(1)}
    other = relabel(build_spl_n1(2, {(1, 2): r}), swap)
    other = rescale(other, {E(1, 2): r, E(2, 1): r.inverse()})
    assert build_spl21(1, r, 1).equals(other)


def test_osp22_slice_equals_spl21():
    assert build_spl21(p, 1, p.inverse()).equals(build_osp22_q(p))
    t = build_osp22_q()
    assert t.aliases["q"] == p ** 2


def test_osp22_brackets():
    t = build_osp22_q()
    # {V1,V2}_{p^2}: V1 V2 = -p^2 V2 V1
    assert t.oriented(V(1), V(2)) == (-p ** 2, Expression())
    assert t.oriented(Vb(2), V(1)).swap == -1


def test_in_q_halves_exponents():
    t = in_q(build_osp22_q())
    assert t.params == ("q",)
    assert t.oriented(V(1), V(2)).swap == -Scalar.param("q")


def test_spl21_argument_errors():
    with pytest.raises(ValueError, match="zero"):
        build_spl21(0, 1, 1)
    with pytest.raises(ValueError, match="monomial"):
        build_spl21(1 + p, 1, 1)
    with pytest.raises(ValueError, match="convention"):
        build_spl21(convention="other")
    with pytest.raises(ValueError, match="literal"):
        build_spl21(literal=["nonsense"])
    assert set(CONVENTIONS) == {"classical", "printed"}


def test_corrections_are_recorded():
    t = build_spl21()
    assert t.corrected == frozenset(SPL21_CORRECTED.values())
    assert build_spl21(literal=["bpm"]).corrected == frozenset(
        v for k, v in SPL21_CORRECTED.items() if k != "bpm"
    )


def test_classical_limit_examples():
    t = classical_limit(build_spl_n1(3))
    for a, b, c, d in [(1, 2, 2, 3), (1, 2, 3, 1), (2, 3, 1, 2), (1, 3, 3, 1)]:
        rule = t.oriented(E(a, b), E(c, d))
        expected = Expression()
        if b == c:
            expected.add_term((E(a, d),), 1)
        if a == d:
            expected.add_term((E(c, b),), -1)
        assert rule.swap == 1
        assert rule.remainder == expected
    assert classical_limit(t).equals(t)
    assert classical_limit(build_spl21()).equals(classical_limit(build_osp22_q()))
    assert classical_limit(build_spl21()).equals(build_classical(2))


def test_classical_swaps_are_graded_signs():
    t = build_classical(3)
    for (g1, g2), rule in t.rules.items():
        assert rule.swap == (-1 if g1.is_fermion and g2.is_fermion else 1)


def test_bosonic_truncation_of_spl21():
    t = bosonic_truncation(build_spl21(convention="printed"))
    rule = t.rule(E(2, 1), E(1, 2))
    assert rule.swap == s ** 2 / p ** 2
    assert rule.remainder == lin((1, E(1, 1)), (-s ** 2 / p ** 2, E(2, 2)))
    assert all(not g.is_fermion for g in t.order)
    assert check_overlaps(t).passed


def test_bosonic_truncation_depends_on_squares_only():
    t = bosonic_truncation(build_spl21())
    seen = set()
    for rule in t.rules.values():
        for c in [rule.swap, *rule.remainder.terms.values()]:
            c = Scalar.coerce(c)
            for poly in (c.num, c.den):
                for mono in poly.terms:
                    for name, e in mono:
                        seen.add(name)
                        assert e % 2 == 0, (name, e)
    assert seen == {"p", "s"}


def test_bosonic_truncation_keeps_gl_rules():
    full = build_spl_n1(3)
    t = bosonic_truncation(full)
    for key, rule in t.rules.items():
        assert full.rules[key] == rule


def test_effective_rank_examples():
    assert [effective_parameter_rank(n) for n in (2, 3, 5)] == [0, 1, 6]
    with pytest.raises(ValueError):
        effective_parameter_rank(1)


def test_conflicting_relations_rejected():
    a, b = E(1, 1), E(2, 2)
    rels = [Relation.commutator(a, b, 1), Relation.commutator(a, b, 2)]
    with pytest.raises(TableError, match="conflicting"):
        table_from_relations(2, [a, b], rels)


def test_nilpotent_boson_rejected():
    with pytest.raises(TableError, match="nilpotent boson"):
        table_from_relations(2, [E(1, 1)], [Relation.anticommutator(E(1, 1), E(1, 1), 1)])


@pytest.mark.parametrize("name", list(all_tables()))
def test_rules_conserve_charge_and_parity(name):
    t = all_tables()[name]
    for (g1, g2), rule in t.rules.items():
        assert rule.swap
        for w in rule.remainder.terms:
            assert word_charge(w) == word_charge((g1, g2))
            assert word_parity(w) == word_parity((g1, g2))


@pytest.mark.parametrize("name", list(all_tables()))
def test_rules_decrease_measure(name):
    t = all_tables()[name]
    for (g1, g2), rule in t.rules.items():
        top = word_measure((g1, g2), t.rank)
        assert word_measure((g2, g1), t.rank) < top
        for w in rule.remainder.terms:
            assert word_measure(w, t.rank) < top


@pytest.mark.parametrize("name", list(all_tables()))
def test_remainders_are_canonical(name):
    t = all_tables()[name]
    assert all(t.is_canonical(rule.remainder) for rule in t.rules.values())


def test_oriented_inverts_rule():
    t = build_spl21(2, 3, 5)
    for (g1, g2), rule in t.rules.items():
        back = t.oriented(g2, g1)
        assert back.swap * rule.swap == 1
        assert back.remainder == rule.remainder.scale(-back.swap)


def test_specialize_matches_numeric_build():
    point = {"p": Fraction(2), "r": Fraction(3), "s": Fraction(5)}
    assert build_spl21().specialize(point).equals(build_spl21(2, 3, 5))
