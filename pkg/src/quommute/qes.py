"""Enveloping-algebra operators of a representation and their QES certificate.

An element of the enveloping algebra acts on P(n-1) + P(n); it is
quasi-exactly solvable when it maps that space into itself.  Matrices here
are computed on an ambient space with enough overflow degrees that no
intermediate product is truncated, so the certificate is exact.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Expression, Word, render_expression
from .matrix import Matrix, charpoly, rank
from .representation import GradedSpace, Representation, matrix_invariance
from .scalar import Scalar, random_rational


@dataclass
class QesOperator:
    word_expression: Expression
    matrix: Matrix  # ambient matrix
    space: GradedSpace

    def compact(self) -> Matrix:
        d = self.space.dim
        return self.matrix.submatrix(range(d), range(d))

    def to_dict(self) -> dict:
        return {
            "expression": render_expression(self.word_expression),
            "basis": self.space.labels(),
            "matrix": self.compact().to_dict(),
            "certified": certify_qes(self),
        }


def canonical_words(order, nilpotents, max_degree: int, min_degree: int = 1) -> list[Word]:
    """Non-decreasing words in ``order`` with no nilpotent letter repeated."""
    out = []
    for d in range(min_degree, max_degree + 1):
        for w in itertools.combinations_with_replacement(order, d):
            if any(w[i] == w[i + 1] and w[i] in nilpotents for i in range(d - 1)):
                continue
            out.append(w)
    return out


def _carrier(rep: Representation, degree: int) -> Representation:
    need = degree + 1
    if rep.space.slack >= need or rep.with_slack is None:
        return rep
    return rep.with_slack(need)


def _word_matrix(carrier: Representation, w: Word) -> Matrix:
    one = Scalar(1) if carrier.is_symbolic() else Fraction(1)
    m = Matrix.identity(carrier.space.ambient_dim, one)
    for g in w:
        m = m @ carrier.ambient(g)
    return m


def enveloping_monomials(rep: Representation, max_degree: int, min_degree: int = 1) -> list[QesOperator]:
    """Normal-ordered monomials up to ``max_degree`` with their exact matrices.

    With a structure table the monomials are the canonical words; without
    one (osp(1,2)) every word over the generators is produced.
    ``min_degree=0`` includes the unit.
    """
    if max_degree < min_degree:
        return []
    carrier = _carrier(rep, max_degree)
    if rep.table is not None:
        words = canonical_words(rep.table.order, rep.table.nilpotents, max_degree, min_degree)
    else:
        gens = list(rep.assign)
        words = [w for d in range(min_degree, max_degree + 1) for w in itertools.product(gens, repeat=d)]
    ops = []
    for w in words:
        one = Scalar(1) if rep.is_symbolic() else 1
        ops.append(QesOperator(Expression({w: one}), _word_matrix(carrier, w), carrier.space))
    return ops


def certify_qes(op: QesOperator) -> bool:
    """True iff the operator maps P(n-1) + P(n) into itself."""
    return not matrix_invariance(op.matrix, op.space)


def random_qes_operator(rep: Representation, degree: int, seed: int) -> QesOperator:
    """Seeded random rational combination of the monomials up to ``degree``."""
    if degree < 1:
        raise ValueError("degree must be >= 1")
    rng = random.Random(seed)
    ops = enveloping_monomials(rep, degree)
    space = ops[0].space
    expr = Expression()
    mat = Matrix(space.ambient_dim, space.ambient_dim)
    for op in ops:
        c = random_rational(rng, nonzero=False)
        if not c:
            continue
        expr = expr + op.word_expression.scale(c)
        mat = mat + op.matrix.scale(c)
    return QesOperator(expr, mat, space)


def span_dimension(ops: list[QesOperator]) -> int:
    """Dimension of the linear span of the operators' matrices."""
    if not ops:
        return 0
    d = ops[0].space.dim
    idx = {(i, j): i * d + j for i in range(d) for j in range(d)}
    rows = Matrix(len(ops), d * d)
    for r, op in enumerate(ops):
        for (i, j), v in op.compact().entries.items():
            rows.entries[(r, idx[(i, j)])] = v
    return rank(rows)


def characteristic_polynomial(op: QesOperator) -> list:
    """Exact characteristic polynomial of the restricted operator, lowest degree first."""
    return charpoly(op.compact())
