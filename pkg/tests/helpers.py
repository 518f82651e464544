"""Shared generators for randomized tests."""

from quommute.algebra import Expression
from quommute.scalar import random_rational


def random_expression(rng, generators, max_degree=4, max_terms=4):
    gens = list(generators)
    e = Expression()
    for _ in range(rng.randint(1, max_terms)):
        w = tuple(rng.choice(gens) for _ in range(rng.randint(0, max_degree)))
        e.add_term(w, random_rational(rng))
    return e
