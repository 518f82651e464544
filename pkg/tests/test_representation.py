import random
from fractions import Fraction

import pytest

from quommute.algebra import E, Expression, V, Vb, build_classical, build_osp22_q, in_q
from quommute.matrix import Matrix
from quommute.representation import (
    LOWER,
    OSP12,
    UPPER,
    GradedSpace,
    apply_jackson,
    build_osp12_rep,
    build_osp22_rep,
    casimir_value,
    check_casimir_operator,
    evaluate_in_rep,
    invariance_check,
    jackson_matrix,
    matrix_invariance,
    verify_relations,
)
from quommute.scalar import Scalar, random_rational

q = Scalar.param("q")
Q = Fraction(5, 3)


def table_at(qv):
    return in_q(build_osp22_q()).specialize({"q": qv})


def image(rep, g, block, k):
    """Nonzero entries of the image of x^k in ``block`` as {label: coeff}."""
    col = rep.space.index(block, k)
    m = rep.ambient(g)
    return {rep.space.label(i): v for (i, j), v in m.entries.items() if j == col}


def test_graded_space_layout():
    s = GradedSpace.for_degree(2, slack=2)
    assert s.labels() == ["e_0", "e_1", "f_0", "f_1", "f_2"]
    assert s.ambient_dim == 9
    assert s.label(s.index(UPPER, 3)) == "e_3"
    assert s.label(s.index(LOWER, 4)) == "f_4"
    assert s.index(LOWER, 5) is None
    assert s.block_of(s.index(UPPER, 2)) == UPPER


def test_jackson_entries():
    m = jackson_matrix(3, q)
    assert m[0, 1] == 1 and m[1, 2] == 1 + q and m[2, 3] == 1 + q + q ** 2
    assert all(m[i, 0] == 0 for i in range(4))
    assert jackson_matrix(4, 1).to_dense()[2][3] == 3
    with pytest.raises(ValueError):
        jackson_matrix(2, 0)


def test_apply_jackson_matches_matrix():
    coeffs = [Fraction(3), Fraction(-1, 2), Fraction(2), Fraction(7, 3)]
    m = jackson_matrix(3, Q)
    by_matrix = [sum(m[i, j] * coeffs[j] for j in range(4)) for i in range(3)]
    assert apply_jackson(coeffs, Q) == by_matrix


def test_quoted_operators_on_n1():
    rep = build_osp22_rep(1, convention="quoted")
    assert image(rep, V(1), UPPER, 0) == {"f_0": 1}
    assert image(rep, V(2), UPPER, 0) == {"f_1": 1}
    assert image(rep, Vb(1), LOWER, 1) == {}
    assert image(rep, Vb(2), LOWER, 1) == {"e_0": q.inverse()}
    assert image(rep, Vb(2), LOWER, 0) == {}
    assert "[quoted]" in rep.name


def test_table_convention_rescales_vbar():
    quoted = build_osp22_rep(2, Q, convention="quoted")
    rep = build_osp22_rep(2, Q)
    assert rep.matrix(Vb(1)) == -quoted.matrix(Vb(1))
    assert rep.matrix(Vb(2)) == quoted.matrix(Vb(2)).scale(Q * Q)
    assert rep.matrix(V(1)) == quoted.matrix(V(1))


@pytest.mark.parametrize("n", [1, 2, 4])
def test_verify_numeric(n):
    assert verify_relations(build_osp22_rep(n, Q), table_at(Q)).passed


def test_verify_symbolic():
    report = verify_relations(build_osp22_rep(2), in_q(build_osp22_q()))
    assert report.passed
    assert report.to_dict()["failures"] == []


@pytest.mark.parametrize("n", [1, 3])
def test_classical_point(n):
    assert verify_relations(build_osp22_rep(n, 1), build_classical(2)).passed


def test_quoted_operators_fail_the_table():
    report = verify_relations(build_osp22_rep(2, Q, convention="quoted"), table_at(Q))
    assert not report.passed


def test_vbar2_without_its_factor_fails():
    report = verify_relations(build_osp22_rep(3, Q, vbar2_factor=1), table_at(Q))
    assert not report.passed
    # E(2,2) is defined through the V(2)*Vb(2) rule, so the damage shows up
    # in the rules that use E(2,2) or Vb(2)
    assert any("E(2,2)" in k or "Vb(2)" in k for k in report.failures)


def test_bosons_are_derived_from_fermions():
    rep = build_osp22_rep(2, Q)
    t = table_at(Q)
    rule = t.oriented(V(1), Vb(1))
    lhs = rep.matrix(V(1)) @ rep.matrix(Vb(1)) - (rep.matrix(Vb(1)) @ rep.matrix(V(1))).scale(rule.swap)
    assert lhs == evaluate_in_rep(rule.remainder, rep)


def test_dimension_note():
    rep = build_osp22_rep(3, Q)
    assert rep.space.dim == 7
    assert any("2n-1" in note for note in rep.notes)


def test_evaluate_examples():
    rep = build_osp22_rep(2, Q)
    assert evaluate_in_rep(Expression.unit(), rep) == rep.identity()
    assert evaluate_in_rep(Expression.word(V(1), V(1)), rep).is_zero()
    e = Expression.word(E(1, 2), Vb(1)) - Expression.word(V(1), coeff=Fraction(3, 2))
    expected = rep.matrix(E(1, 2)) @ rep.matrix(Vb(1)) - rep.matrix(V(1)).scale(Fraction(3, 2))
    assert evaluate_in_rep(e, rep) == expected


def test_invariance_examples():
    n = 3
    rep = build_osp22_rep(n, Q)
    assert image(rep, V(2), UPPER, n - 1) == {f"f_{n}": 1}
    assert image(rep, Vb(1), LOWER, n) == {}
    assert invariance_check(rep).passed


def test_enlarged_matrix_fails_invariance():
    rep = build_osp22_rep(2, Q)
    s = rep.space
    m = Matrix(s.ambient_dim, s.ambient_dim, {(s.index(LOWER, 3), s.index(LOWER, 2)): 1})
    assert matrix_invariance(m, s)
    bad = rep.assign | {E(1, 1): rep.ambient(E(1, 1)) + m}
    rep.assign = bad
    report = invariance_check(rep)
    assert not report.passed
    assert report.violations[0][0] == "E(1,1)"


def test_block_structure_violation():
    rep = build_osp22_rep(2, Q)
    s = rep.space
    rep.assign[V(1)] = rep.ambient(V(1)) + Matrix(s.ambient_dim, s.ambient_dim, {(0, s.index(LOWER, 0)): 1})
    assert any(v[3] == "block structure" for v in invariance_check(rep).violations)


def test_osp12_operators():
    n = 3
    rep = build_osp12_rep(n, Q)
    vm, vp, jm, jp = (rep.matrix(OSP12[k]) for k in ("V-", "V+", "J-", "J+"))
    assert image(rep, OSP12["V-"], UPPER, 0) == {"f_0": 1}
    assert jm == (vm @ vm).scale(1 + Q)
    assert jp == (vp @ vp).scale(1 + Q)
    assert invariance_check(rep).passed


def test_osp12_symbolic_closure():
    rep = build_osp12_rep(2)
    vm = rep.matrix(OSP12["V-"])
    assert rep.matrix(OSP12["J-"]) == (vm @ vm).scale(1 + q)
    assert invariance_check(rep).passed


def test_rep_argument_errors():
    with pytest.raises(ValueError):
        build_osp22_rep(0, Q)
    with pytest.raises(ValueError):
        build_osp22_rep(1, 0)
    with pytest.raises(ValueError):
        build_osp22_rep(1, Q, convention="other")
    with pytest.raises(ValueError):
        build_osp12_rep(0)
    with pytest.raises(TypeError):
        build_osp22_rep(1, 5 / 3)


def test_casimir_values():
    assert casimir_value(0, 2) == Fraction(1, 12)
    for n in range(4):
        assert casimir_value(n, 1) == Fraction(2 * n + 1, 4)
    assert casimir_value(1) == Fraction(-1, 2) * (1 - q ** -3) / (1 - q ** 2)


def test_casimir_operator_check_rejects_unit():
    rep = build_osp12_rep(1, Fraction(2))
    assert not check_casimir_operator(Expression.unit(), rep, 1)
    scaled = Expression.unit(casimir_value(1, 2).to_fraction())
    assert check_casimir_operator(scaled, rep, 1)


def test_random_points_verify():
    rng = random.Random(11)
    for _ in range(3):
        qv = random_rational(rng, avoid=(1, -1))
        assert verify_relations(build_osp22_rep(2, qv), table_at(qv)).passed
