from fractions import Fraction

import pytest

from quommute.algebra import Expression, V, build_osp22_q, in_q
from quommute.matrix import Matrix
from quommute.normal_order import normalize
from quommute.qes import (
    QesOperator,
    canonical_words,
    certify_qes,
    characteristic_polynomial,
    enveloping_monomials,
    random_qes_operator,
    span_dimension,
)
from quommute.representation import LOWER, build_osp12_rep, build_osp22_rep, evaluate_in_rep

Q = Fraction(5, 3)


def test_degree_one_is_the_generators():
    rep = build_osp22_rep(2, Q)
    ops = enveloping_monomials(rep, 1)
    assert len(ops) == 8
    assert {op.word_expression.terms.popitem()[0][0] for op in ops} == set(rep.table.order)


def test_unit_monomial_is_identity():
    rep = build_osp22_rep(2, Q)
    unit = enveloping_monomials(rep, 0, min_degree=0)
    assert len(unit) == 1
    assert unit[0].compact() == rep.identity()


def test_fermion_only_quadratic_words():
    words = canonical_words([V(1), V(2)], {V(1), V(2)}, 2, min_degree=2)
    assert words == [(V(1), V(2))]
    t = in_q(build_osp22_q())
    forms = set()
    for a in (V(1), V(2)):
        for b in (V(1), V(2)):
            e, _ = normalize(Expression.word(a, b), t)
            forms |= set(e.terms)
    assert forms == {(V(1), V(2))}


@pytest.mark.parametrize("n", [1, 2])
def test_monomials_certify(n):
    ops = enveloping_monomials(build_osp22_rep(n, Q), 3)
    assert ops
    assert all(certify_qes(op) for op in ops)


def test_symbolic_monomials_certify():
    ops = enveloping_monomials(build_osp22_rep(1), 2)
    assert all(certify_qes(op) for op in ops)


def test_monomial_matrices_match_evaluation():
    rep = build_osp22_rep(2, Q)
    for op in enveloping_monomials(rep, 2)[::7]:
        assert op.compact() == evaluate_in_rep(op.word_expression, rep)


def test_osp12_monomials_certify():
    ops = enveloping_monomials(build_osp12_rep(2, Q), 2)
    assert len(ops) == 5 + 25
    assert all(certify_qes(op) for op in ops)


def test_overflow_is_not_certified():
    rep = build_osp22_rep(2, Q)
    s = rep.space.__class__.for_degree(2, slack=1)
    m = Matrix(s.ambient_dim, s.ambient_dim, {(s.index(LOWER, 3), s.index(LOWER, 2)): 1})
    assert not certify_qes(QesOperator(Expression(), m, s))


def test_zero_operator_is_certified():
    s = build_osp22_rep(2, Q).space
    assert certify_qes(QesOperator(Expression(), Matrix(s.ambient_dim, s.ambient_dim), s))


def test_ambient_space_grows_with_degree():
    rep = build_osp22_rep(1, Q)
    ops = enveloping_monomials(rep, 3)
    assert {op.space.slack for op in ops} == {4}
    assert all(op.space.dim == rep.space.dim for op in ops)


def test_random_operator_is_deterministic():
    rep = build_osp22_rep(2, Q)
    a = random_qes_operator(rep, 2, seed=7)
    b = random_qes_operator(rep, 2, seed=7)
    c = random_qes_operator(rep, 2, seed=8)
    assert a.word_expression == b.word_expression and a.matrix == b.matrix
    assert a.word_expression != c.word_expression
    assert certify_qes(a)
    assert characteristic_polynomial(a) == characteristic_polynomial(b)
    with pytest.raises(ValueError):
        random_qes_operator(rep, 0, seed=1)


def test_span_dimension_bounds():
    rep = build_osp22_rep(1, Q)
    dim = rep.space.dim
    assert span_dimension([]) == 0
    assert span_dimension(enveloping_monomials(rep, 1)) == 8
    assert span_dimension(enveloping_monomials(rep, 3, min_degree=0)) <= dim * dim


def test_to_dict():
    op = random_qes_operator(build_osp22_rep(1, Q), 1, seed=3)
    d = op.to_dict()
    assert d["certified"] is True
    assert d["basis"] == ["e_0", "f_0", "f_1"]
