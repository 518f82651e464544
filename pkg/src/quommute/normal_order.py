"""Normal ordering in the enveloping algebra and the overlap (diamond) check."""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple

from .algebra import Expression, StructureTable, Word, render_word, rule_id


class NonTerminationError(RuntimeError):
    """A reduction exceeded its step guard; the table is malformed."""


class TraceStep(NamedTuple):
    position: int
    rule: tuple  # (G1, G2)
    before: Word
    after: Expression


@dataclass
class RewriteTrace:
    steps: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)


def quommutator(A: Expression, B: Expression, q, sign: str = "commutator") -> Expression:
    """``AB - qBA`` (commutator) or ``AB + qBA`` (anticommutator), unreduced."""
    if sign not in ("commutator", "anticommutator"):
        raise ValueError(f"unknown bracket kind {sign!r}")
    qba = (B * A).scale(q)
    return A * B - qba if sign == "commutator" else A * B + qba


def step_guard(degree: int) -> int:
    return 10 * degree * degree * max(1, degree * (degree - 1) // 2)


def _apply_at(t: StructureTable, w: Word, i: int) -> Expression:
    """Rewrite the pair ``w[i], w[i+1]``; returns the replacement expression."""
    g1, g2 = w[i], w[i + 1]
    prefix, suffix = w[:i], w[i + 2:]
    out = Expression()
    if g1 == g2:
        return out  # nilpotent
    swap, rem = t.rules[(g1, g2)]
    out.terms[prefix + (g2, g1) + suffix] = swap
    for rw, c in rem.terms.items():
        out.add_term(prefix + rw + suffix, c)
    return out


def _find(t: StructureTable, w: Word, rightmost: bool) -> int | None:
    rank, nil = t.rank, t.nilpotents
    positions = range(len(w) - 2, -1, -1) if rightmost else range(len(w) - 1)
    for i in positions:
        x, y = w[i], w[i + 1]
        if rank[x] > rank[y] or (x == y and x in nil):
            return i
    return None


def normalize(e: Expression, t: StructureTable, trace: bool = True):
    """Rewrite ``e`` to normal-ordered form, leftmost reducible pair first.

    Returns ``(expression, RewriteTrace)``; the trace is empty when
    ``trace=False``.
    """
    missing = e.generators() - set(t.rank)
    if missing:
        raise KeyError(f"generators not in table: {sorted(map(str, missing))}")
    tr = RewriteTrace()
    result = Expression()
    for w0, c0 in e.terms.items():
        guard = step_guard(len(w0))
        work = Expression({w0: c0})
        steps = 0
        while work.terms:
            w = min(work.terms, key=lambda u: (len(u), [t.rank[g] for g in u]))
            c = work.terms.pop(w)
            i = _find(t, w, rightmost=False)
            if i is None:
                result.add_term(w, c)
                continue
            steps += 1
            if steps > guard:
                raise NonTerminationError(
                    f"reduction of {render_word(w0)} exceeded {guard} steps"
                )
            after = _apply_at(t, w, i)
            if trace:
                tr.steps.append(TraceStep(i, (w[i], w[i + 1]), w, after))
            for u, d in after.terms.items():
                work.add_term(u, d * c)
    return result, tr


class Reducer:
    """Memoized word reducer with a fixed strategy (leftmost or rightmost)."""

    def __init__(self, t: StructureTable, rightmost: bool = False):
        self.t = t
        self.rightmost = rightmost
        self.cache: dict[Word, Expression] = {}
        self._active: set[Word] = set()
        self._steps = 0

    def reduce_word(self, w: Word) -> Expression:
        hit = self.cache.get(w)
        if hit is not None:
            return hit
        top = not self._active
        if top:
            self._steps = 0
            self._guard = step_guard(len(w))
        if w in self._active:
            raise NonTerminationError(f"rewriting cycle through {render_word(w)}")
        i = _find(self.t, w, self.rightmost)
        if i is None:
            res = Expression({w: 1})
        else:
            self._steps += 1
            if self._steps > self._guard:
                raise NonTerminationError(f"reduction of {render_word(w)} exceeded {self._guard} steps")
            self._active.add(w)
            try:
                res = Expression()
                for u, c in _apply_at(self.t, w, i).terms.items():
                    for v, d in self.reduce_word(u).terms.items():
                        res.add_term(v, c * d)
            finally:
                self._active.discard(w)
        self.cache[w] = res
        return res

    def reduce(self, e: Expression) -> Expression:
        out = Expression()
        for w, c in e.terms.items():
            for v, d in self.reduce_word(w).terms.items():
                out.add_term(v, c * d)
        return out


@dataclass
class ConsistencyReport:
    algebra_id: str
    total_overlaps: int
    failures: list = field(default_factory=list)  # [(triple, residual Expression)]
    corrected_rules_used: list = field(default_factory=list)
    mode: str = "symbolic"

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "algebra": self.algebra_id,
            "mode": self.mode,
            "overlaps_checked": self.total_overlaps,
            "failures": [
                {"triple": [str(g) for g in tri], "residual": str(res)}
                for tri, res in self.failures
            ],
            "corrected_rules_used": list(self.corrected_rules_used),
            "passed": self.passed,
        }


def overlap_triples(t: StructureTable) -> list[tuple]:
    gens = t.order
    out = []
    for tri in itertools.product(gens, repeat=3):
        if t.is_reducible(tri[0], tri[1]) or t.is_reducible(tri[1], tri[2]):
            out.append(tri)
    return out


def _check_chunk(t: StructureTable, triples) -> list:
    left, right = Reducer(t, rightmost=False), Reducer(t, rightmost=True)
    fails = []
    for tri in triples:
        res = left.reduce_word(tri) - right.reduce_word(tri)
        if res.terms:
            fails.append((tri, res))
    return fails


def check_overlaps(t: StructureTable, workers: int | None = None) -> ConsistencyReport:
    """Reduce every length-3 overlap two ways and collect nonzero residuals.

    Symbolic tables are checked symbolically; specialize first for a
    numeric check.
    """
    triples = overlap_triples(t)
    if workers and workers > 1 and len(triples) > 1000:
        chunks = [triples[i::workers] for i in range(workers)]
        with ProcessPoolExecutor(workers) as ex:
            parts = list(ex.map(_check_chunk, [t] * workers, chunks))
        fails = [f for part in parts for f in part]
    else:
        fails = _check_chunk(t, triples)
    rank = t.rank
    fails.sort(key=lambda f: tuple(rank[g] for g in f[0]))
    used = sorted(rule_id(k) + " (corrected)" for k in t.corrected)
    return ConsistencyReport(
        t.name,
        len(triples),
        fails,
        used,
        mode="symbolic" if t.is_symbolic() else "numeric",
    )


def word_measure(w: Word, rank) -> tuple:
    """Termination measure: (weighted degree, length, inversions).

    Bosons weigh 2 and fermions 1, so a quadratic E*E -> Vb*V remainder
    still lowers the measure.
    """
    weight = sum(1 if g.is_fermion else 2 for g in w)
    inv = sum(1 for i, j in itertools.combinations(range(len(w)), 2) if rank[w[i]] > rank[w[j]])
    return (weight, len(w), inv)
