"""Generators, enveloping-algebra expressions and structure tables.

A structure table is a quadratic rewriting system.  For every ordered pair
``(G1, G2)`` with ``G1`` after ``G2`` in the generator order it stores a rule

    G1 * G2 = swap * G2 * G1 + remainder

and it lists the fermionic generators whose square vanishes.  Tables are
assembled from *relations* ``A*B - c*B*A = rhs`` which are oriented
automatically, so the builders below can transcribe relations in whatever
order the defining formulas use.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, NamedTuple

from .scalar import Scalar, as_scalar, param_name, q_param

KIND_RANK = {"Vb": 0, "E": 1, "V": 2}
FERMION_KINDS = {"V", "Vb", "V-", "V+"}
CHARGE = {"V": 1, "Vb": -1}


class Generator(NamedTuple):
    kind: str
    a: int
    b: int = 0

    @property
    def is_fermion(self) -> bool:
        return self.kind in FERMION_KINDS

    @property
    def charge(self) -> int:
        return CHARGE.get(self.kind, 0)

    def __str__(self) -> str:
        if self.kind == "E":
            return f"E({self.a},{self.b})"
        if self.kind in ("V", "Vb"):
            return f"{self.kind}({self.a})"
        return self.kind


def E(a: int, b: int) -> Generator:
    return Generator("E", a, b)


def V(a: int) -> Generator:
    return Generator("V", a)


def Vb(a: int) -> Generator:
    return Generator("Vb", a)


def parse_generator(text: str) -> Generator:
    import re

    m = re.fullmatch(r"\s*(E|V|Vb)\s*\(\s*(\d+)\s*(?:,\s*(\d+)\s*)?\)\s*", text)
    if not m:
        raise ValueError(f"unknown generator {text!r}")
    kind, a, b = m.group(1), int(m.group(2)), m.group(3)
    if (kind == "E") != (b is not None):
        raise ValueError(f"unknown generator {text!r}")
    return Generator(kind, a, int(b) if b else 0)


def spl_generators(N: int) -> list[Generator]:
    """All generators of spl(N,1) in canonical order: Vb's, then E's, then V's."""
    return (
        [Vb(a) for a in range(1, N + 1)]
        + [E(a, b) for a in range(1, N + 1) for b in range(1, N + 1)]
        + [V(a) for a in range(1, N + 1)]
    )


Word = tuple  # tuple[Generator, ...]


def render_word(w: Word) -> str:
    return "*".join(map(str, w)) if w else "1"


def word_charge(w: Word) -> int:
    return sum(g.charge for g in w)


def word_parity(w: Word) -> int:
    return sum(g.is_fermion for g in w) % 2


class Expression:
    """Finite linear combination of words.

    Coefficients may be :class:`Scalar` or :class:`Fraction`; anything that
    supports ``+``, ``*`` and truthiness works.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Word, object] | None = None):
        self.terms: dict[Word, object] = {}
        if terms:
            for w, c in terms.items():
                if c:
                    self.terms[tuple(w)] = c

    @classmethod
    def word(cls, *letters: Generator, coeff=1) -> Expression:
        return cls({tuple(letters): coeff})

    @classmethod
    def unit(cls, coeff=1) -> Expression:
        return cls({(): coeff})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __iter__(self) -> Iterator[tuple[Word, object]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def add_term(self, w: Word, c) -> None:
        """In-place accumulate; used by the rewriting engine."""
        s = self.terms.get(w)
        s = c if s is None else s + c
        if s:
            self.terms[w] = s
        else:
            self.terms.pop(w, None)

    def __add__(self, other: Expression) -> Expression:
        out = Expression(self.terms)
        for w, c in other.terms.items():
            out.add_term(w, c)
        return out

    def __neg__(self) -> Expression:
        return Expression({w: -c for w, c in self.terms.items()})

    def __sub__(self, other: Expression) -> Expression:
        return self + (-other)

    def scale(self, c) -> Expression:
        if not c:
            return Expression()
        return Expression({w: v * c for w, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, Expression):
            out = Expression()
            for w1, c1 in self.terms.items():
                for w2, c2 in other.terms.items():
                    out.add_term(w1 + w2, c1 * c2)
            return out
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expression):
            return NotImplemented
        return not (self - other).terms

    __hash__ = None

    def map_coefficients(self, fn) -> Expression:
        return Expression({w: fn(c) for w, c in self.terms.items()})

    def map_generators(self, fn) -> Expression:
        """Apply ``fn: Generator -> Expression`` letterwise, multiplying out."""
        out = Expression()
        for w, c in self.terms.items():
            prod = Expression.unit(c)
            for g in w:
                prod = prod * fn(g)
            out = out + prod
        return out

    def generators(self) -> set[Generator]:
        return {g for w in self.terms for g in w}

    def max_degree(self) -> int:
        return max((len(w) for w in self.terms), default=0)

    def sorted_terms(self, rank: Mapping[Generator, int] | None = None):
        def key(item):
            w = item[0]
            if rank is None:
                return (len(w), tuple((KIND_RANK.get(g.kind, 9), g.a, g.b) for g in w))
            return (len(w), tuple(rank[g] for g in w))

        return sorted(self.terms.items(), key=key)

    def __str__(self) -> str:
        return render_expression(self)

    def __repr__(self) -> str:
        return f"Expression({render_expression(self)!r})"


def render_expression(e: Expression) -> str:
    if not e.terms:
        return "0"
    parts = []
    for i, (w, c) in enumerate(e.sorted_terms()):
        cs = str(c)
        neg = False
        if isinstance(c, Fraction):
            neg = c < 0
            cs = str(abs(c))
        elif isinstance(c, Scalar) and c.is_monomial():
            ((_, lc),) = c.num.terms.items()
            if lc < 0:
                neg, cs = True, str(-c)
        elif " " in cs and not cs.startswith("("):
            cs = f"({cs})"
        if cs == "1" and w:
            body = render_word(w)
        elif not w:
            body = cs
        else:
            body = f"{cs}*{render_word(w)}"
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


# --- relations and tables ---------------------------------------------------


@dataclass(frozen=True)
class Relation:
    """``left*right - coeff*right*left = rhs``.

    A quommutator ``[A,B]_q`` has ``coeff = q``; an anti-quommutator
    ``{A,B}_q`` has ``coeff = -q``.
    """

    left: Generator
    right: Generator
    coeff: object
    rhs: Expression
    label: str = ""

    @classmethod
    def commutator(cls, a, b, q, rhs=None, label=""):
        return cls(a, b, as_scalar(q), rhs or Expression(), label)

    @classmethod
    def anticommutator(cls, a, b, q, rhs=None, label=""):
        return cls(a, b, -as_scalar(q), rhs or Expression(), label)


class Rule(NamedTuple):
    swap: object
    remainder: Expression


class TableError(ValueError):
    pass


def rule_id(pair: tuple[Generator, Generator]) -> str:
    return f"{pair[0]}*{pair[1]}"


@dataclass(frozen=True, eq=False)
class StructureTable:
    """Complete rewrite-rule set of one deformed algebra."""

    N: int
    order: tuple
    rules: Mapping
    nilpotents: frozenset
    params: tuple = ()
    name: str = ""
    corrected: frozenset = frozenset()
    aliases: Mapping = field(default_factory=dict)
    # oriented rules before their remainders were normal-ordered
    source: Mapping = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "rank", {g: i for i, g in enumerate(self.order)})

    @property
    def generators(self) -> tuple:
        return self.order

    def is_reducible(self, g1: Generator, g2: Generator) -> bool:
        return (g1, g2) in self.rules or (g1 == g2 and g1 in self.nilpotents)

    def is_canonical_word(self, w: Word) -> bool:
        rank = self.rank
        for x, y in zip(w, w[1:]):
            if rank[x] > rank[y] or (x == y and x in self.nilpotents):
                return False
        return True

    def is_canonical(self, e: Expression) -> bool:
        return all(self.is_canonical_word(w) for w in e.terms)

    def rule(self, g1: Generator, g2: Generator) -> Rule:
        return self.rules[(g1, g2)]

    def oriented(self, g1: Generator, g2: Generator) -> Rule:
        """``g1*g2 = swap*g2*g1 + remainder`` for either order of the pair.

        The remainder of the inverted orientation is not normal-ordered
        through ``g2*g1``; it is the literal inverse of the stored rule.
        """
        if (g1, g2) in self.rules:
            return self.rules[(g1, g2)]
        swap, rem = self.rules[(g2, g1)]
        inv = swap.inverse() if isinstance(swap, Scalar) else 1 / Fraction(swap)
        return Rule(inv, rem.scale(-inv))

    def map_coefficients(self, fn, name: str | None = None, params=None) -> StructureTable:
        def apply(rules):
            return {k: Rule(fn(r.swap), r.remainder.map_coefficients(fn)) for k, r in rules.items()}

        return StructureTable(
            self.N,
            self.order,
            apply(self.rules),
            self.nilpotents,
            self.params if params is None else tuple(params),
            name or self.name,
            self.corrected,
            dict(self.aliases),
            apply(self.source),
        )

    def specialize(self, point: Mapping[str, Fraction]) -> StructureTable:
        """Table with every coefficient evaluated to a Fraction at ``point``."""
        from .scalar import substitute

        label = ",".join(f"{k}={v}" for k, v in sorted(point.items()))
        return self.map_coefficients(
            lambda c: substitute(c, point), name=f"{self.name}@{label}", params=()
        )

    def is_symbolic(self) -> bool:
        return any(
            isinstance(c, Scalar) and c.variables()
            for r in self.rules.values()
            for c in itertools.chain([r.swap], r.remainder.terms.values())
        )

    def equals(self, other: StructureTable) -> bool:
        """Structural equality of the rule data (names and metadata ignored)."""
        if self.order != other.order or self.nilpotents != other.nilpotents:
            return False
        if self.rules.keys() != other.rules.keys():
            return False
        return all(
            self.rules[k].swap == other.rules[k].swap
            and self.rules[k].remainder == other.rules[k].remainder
            for k in self.rules
        )

    def differences(self, other: StructureTable) -> list[str]:
        out = []
        for k in sorted(set(self.rules) | set(other.rules), key=lambda p: (self.rank.get(p[0], 0), self.rank.get(p[1], 0))):
            a, b = self.rules.get(k), other.rules.get(k)
            if a is None or b is None:
                out.append(f"{rule_id(k)}: missing on one side")
            elif not (a.swap == b.swap and a.remainder == b.remainder):
                out.append(
                    f"{rule_id(k)}: swap {a.swap} vs {b.swap}; rem {a.remainder} vs {b.remainder}"
                )
        if self.nilpotents != other.nilpotents:
            out.append("nilpotent sets differ")
        return out


def table_from_relations(
    N: int,
    order: Iterable[Generator],
    relations: Iterable[Relation],
    *,
    params=(),
    name: str = "",
    corrected: Iterable[tuple] = (),
    on_conflict: str = "error",
) -> StructureTable:
    """Orient relations into rules and normal-order the remainders.

    A pair fixed by two relations must get the same rule from both, unless
    ``on_conflict="last"``, where the later relation wins (used to reproduce
    literal readings of tables with duplicated entries).
    """
    from .normal_order import normalize

    order = tuple(order)
    rank = {g: i for i, g in enumerate(order)}
    rules: dict = {}
    nilpotents = set()
    for rel in relations:
        a, b, c, rhs = rel.left, rel.right, rel.coeff, rel.rhs
        for g in (a, b):
            if g not in rank:
                raise TableError(f"relation {rel.label or ''} uses unknown generator {g}")
        if a == b:
            # (1 - c) A^2 = rhs
            if rhs or c == 1:
                raise TableError(f"unsupported square relation for {a}")
            if not a.is_fermion:
                raise TableError(f"nilpotent boson {a}")
            nilpotents.add(a)
            continue
        if not c:
            raise TableError(f"zero swap coefficient in relation for {a},{b}")
        if rank[a] > rank[b]:
            key, rule = (a, b), Rule(c, rhs)
        else:
            inv = 1 / c if isinstance(c, Fraction) else c.inverse()
            key, rule = (b, a), Rule(inv, rhs.scale(-inv))
        if key in rules and on_conflict == "error":
            old = rules[key]
            if not (old.swap == rule.swap and old.remainder == rule.remainder):
                raise TableError(
                    f"conflicting relations for {rule_id(key)}: "
                    f"({old.swap}, {old.remainder}) vs ({rule.swap}, {rule.remainder})"
                )
        rules[key] = rule
    raw = StructureTable(N, order, rules, frozenset(nilpotents), tuple(params), name, frozenset(corrected))
    final = {}
    for key, rule in rules.items():
        rem = rule.remainder
        if not raw.is_canonical(rem):
            rem, _ = normalize(rem, raw, trace=False)
        final[key] = Rule(rule.swap, rem)
    return StructureTable(
        N, order, final, frozenset(nilpotents), tuple(params), name, frozenset(corrected), {}, rules
    )


def _lin(*pairs) -> Expression:
    """Linear expression from (coeff, generator) pairs."""
    out = Expression()
    for c, g in pairs:
        out.add_term((g,), as_scalar(c))
    return out


def _delta(i: int, j: int) -> int:
    return 1 if i == j else 0


# --- classical spl(N,1) -----------------------------------------------------


def classical_relations(N: int) -> list[Relation]:
    """Undeformed (anti)commutators of spl(N,1), written out directly."""
    idx = range(1, N + 1)
    rels = []
    for a, b in itertools.product(idx, idx):
        rels.append(Relation.anticommutator(V(a), V(b), 1, label="c1"))
        rels.append(Relation.anticommutator(Vb(a), Vb(b), 1, label="c2"))
        rels.append(Relation.anticommutator(V(a), Vb(b), 1, _lin((1, E(a, b))), label="c3"))
    for a, b, c in itertools.product(idx, idx, idx):
        rels.append(
            Relation.commutator(
                E(a, b), V(c), 1, _lin((_delta(c, b), V(a)), (-_delta(a, b), V(c))), label="c4"
            )
        )
        rels.append(
            Relation.commutator(
                E(a, b), Vb(c), 1, _lin((_delta(a, b), Vb(c)), (-_delta(a, c), Vb(b))), label="c5"
            )
        )
    for a, b, c, d in itertools.product(idx, idx, idx, idx):
        if (a, b) == (c, d):
            continue
        rels.append(
            Relation.commutator(
                E(a, b), E(c, d), 1,
                _lin((_delta(c, b), E(a, d)), (-_delta(a, d), E(c, b))),
                label="c6",
            )
        )
    return rels


def build_classical(N: int) -> StructureTable:
    """The Lie superalgebra spl(N,1) itself."""
    if N < 1:
        raise ValueError("N must be positive")
    return table_from_relations(N, spl_generators(N), classical_relations(N), name=f"spl({N},1)")


# --- spl(N,1)_q -------------------------------------------------------------


def _check_q_values(N: int, q) -> dict:
    if q is None:
        return {}
    vals = {}
    for (a, b), v in dict(q).items():
        if not (1 <= a < b <= N):
            raise ValueError(f"parameter index ({a},{b}) must satisfy 1 <= a < b <= {N}")
        s = as_scalar(v)
        if not s:
            raise ValueError(f"zero deformation parameter q{a}{b}")
        if not s.is_monomial():
            raise ValueError(f"q{a}{b} must be a monomial, got {s}")
        vals[(a, b)] = s
    return vals


def spl_n1_relations(N: int, values: Mapping | None = None) -> list[Relation]:
    def q(a, b):
        return q_param(a, b, values)

    idx = range(1, N + 1)
    rels = []
    for a, b in itertools.product(idx, idx):
        rels.append(Relation.anticommutator(V(a), V(b), q(a, b), label="cq1"))
        rels.append(Relation.anticommutator(Vb(a), Vb(b), q(a, b), label="cq2"))
        rels.append(Relation.anticommutator(V(a), Vb(b), q(b, a), _lin((1, E(a, b))), label="cq3"))
    for a, b, c in itertools.product(idx, idx, idx):
        rels.append(
            Relation.commutator(
                E(a, b), V(c), q(a, c) * q(c, b),
                _lin((_delta(c, b), V(a)), (-_delta(a, b), V(c))),
                label="cq4",
            )
        )
        # the printed lowered index on the last term is read as Vb^b
        rels.append(
            Relation.commutator(
                E(a, b), Vb(c), q(b, c) * q(c, a),
                _lin((_delta(a, b), Vb(c)), (-_delta(a, c) * q(b, a), Vb(b))),
                label="cq5",
            )
        )
    for a, b, c, d in itertools.product(idx, idx, idx, idx):
        if (a, b) == (c, d):
            continue
        rels.append(
            Relation.commutator(
                E(a, b), E(c, d), q(a, c) * q(c, b) * q(b, d) * q(d, a),
                _lin((_delta(b, c), E(a, d)), (-_delta(a, d) * q(b, a) * q(a, c) * q(c, b), E(c, b))),
                label="cq6",
            )
        )
    return rels


def build_spl_n1(N: int, q: Mapping | None = None) -> StructureTable:
    """Quommutator deformation of spl(N,1) with parameters q_{ab}, a < b.

    ``q`` maps index pairs ``(a, b)`` with ``a < b`` to nonzero monomial
    scalars; pairs left out stay symbolic (parameter ``q{a}{b}``).
    """
    if N < 2:
        raise ValueError("spl(N,1)_q needs N >= 2")
    values = _check_q_values(N, q)
    params = tuple(
        param_name(a, b)
        for a in range(1, N + 1)
        for b in range(a + 1, N + 1)
        if (a, b) not in values
    )
    return table_from_relations(
        N, spl_generators(N), spl_n1_relations(N, values), params=params, name=f"spl({N},1)_q"
    )


# --- spl(2,1)_{p,r,s} -------------------------------------------------------

# rule pairs whose printed form was corrected, keyed by reading name
SPL21_CORRECTED = {
    "vbar_block": (E(2, 1), Vb(1)),
    "b1pm": (E(2, 2), E(2, 1)),
    "vbar_swap": (E(1, 2), Vb(1)),
    "bpm": (E(2, 1), E(1, 2)),
}

CONVENTIONS = ("classical", "printed")


def spl21_relations(p, r, s, *, literal: Iterable[str] = ()) -> list[Relation]:
    """Relations of the three-parameter deformation of spl(2,1), printed signs.

    ``E^u_l`` of the printed table is the generator ``E(l, u)``, so that
    ``{Vb^b, V_a} = E(a, b)`` throughout.  Four printed entries are replaced
    by their corrections (keys of ``SPL21_CORRECTED``):

    - ``vbar_block``: the duplicated ``[E^2_2, Vb^1]_{1/psr} = 0`` is the
      bracket of ``E(2,1)`` with ``Vb(1)``;
    - ``b1pm``: the duplicated ``[E^1_1, E^1_2]_{1/s^2}`` is the bracket of
      ``E(2,2)`` with ``E(2,1)``;
    - ``vbar_swap``: ``[E(1,2), Vb(1)]`` carries ``pr/s``, forced by
      ``{Vb1, Vb2}_{s/pr}`` and ``Vb1^2 = 0``;
    - ``bpm``: the quadratic quommutator is ``[E(2,1), E(1,2)]_{s^2/p^2}``.

    ``literal`` names corrections to undo; the printed entry is appended
    last and wins.
    """
    p, r, s = as_scalar(p), as_scalar(r), as_scalar(s)
    literal = set(literal)
    E11, E12, E21, E22 = E(1, 1), E(1, 2), E(2, 1), E(2, 2)
    V1, V2, Vb1, Vb2 = V(1), V(2), Vb(1), Vb(2)
    rels = [
        Relation.anticommutator(V1, V1, 1, label="ff"),
        Relation.anticommutator(V2, V2, 1, label="ff"),
        Relation.anticommutator(Vb1, Vb1, 1, label="ff"),
        Relation.anticommutator(Vb2, Vb2, 1, label="ff"),
        Relation.anticommutator(V1, V2, p / (s * r), label="bff1"),
        Relation.anticommutator(Vb1, Vb2, s / (p * r), label="bff1"),
        Relation.anticommutator(Vb1, V1, 1, _lin((1, E11)), label="bff2"),
        Relation.anticommutator(Vb2, V2, 1, _lin((1, E22)), label="bff2"),
        Relation.anticommutator(Vb1, V2, p * s * r, _lin((1, E21)), label="bff3"),
        Relation.anticommutator(Vb2, V1, p * s / r, _lin((1, E12)), label="bff3"),
        # fermionic-bosonic, V block
        Relation.commutator(E11, V1, 1, label="fb"),
        Relation.commutator(E22, V1, s**2, _lin((1, V1)), label="fb"),
        Relation.commutator(E12, V1, p * s / r, label="fb"),
        Relation.commutator(E21, V1, s * r / p, _lin((-(s * r / p), V2)), label="fb"),
        Relation.commutator(E11, V2, p**2, _lin((1, V2)), label="fb"),
        Relation.commutator(E22, V2, 1, label="fb"),
        Relation.commutator(E12, V2, p / (s * r), _lin((-(p / (s * r)), V1)), label="fb"),
        Relation.commutator(E21, V2, p * s * r, label="fb"),
        # fermionic-bosonic, Vb block
        Relation.commutator(E11, Vb1, 1, label="fbb"),
        Relation.commutator(E22, Vb1, 1 / s**2, _lin((-(1 / s**2), Vb1)), label="fbb"),
        Relation.commutator(E12, Vb1, p * r / s, _lin((1, Vb2)), label="fbb*"),
        Relation.commutator(E11, Vb2, 1 / p**2, _lin((-(1 / p**2), Vb2)), label="fbb"),
        Relation.commutator(E22, Vb2, 1, label="fbb"),
        Relation.commutator(E12, Vb2, r / (p * s), label="fbb"),
        Relation.commutator(E21, Vb2, s / (p * r), _lin((1, Vb1)), label="fbb"),
        # bosonic-bosonic
        Relation.commutator(E11, E22, 1, label="b01"),
        Relation.commutator(E11, E12, 1 / p**2, _lin((-(1 / p**2), E12)), label="b0pm"),
        Relation.commutator(E22, E12, s**2, _lin((1, E12)), label="b0pm"),
        Relation.commutator(E11, E21, p**2, _lin((1, E21)), label="b1pm"),
    ]
    # corrected entries
    rels.append(Relation.commutator(E21, Vb1, 1 / (p * s * r), label="fbb*"))
    rels.append(Relation.commutator(E22, E21, 1 / s**2, _lin((-(1 / s**2), E21)), label="b1pm*"))
    # quadratic terms of the E12/E21 quommutator
    rhs = _lin((1, E11), (-(s**2 / p**2), E22))
    rhs = rhs + Expression.word(V1, Vb1, coeff=s**2 - 1)
    rhs = rhs + Expression.word(V2, Vb2, coeff=-(s**2 / p**2) * (p**2 - 1))
    rels.append(Relation.commutator(E21, E12, s**2 / p**2, rhs, label="bpm*"))
    if "vbar_block" in literal:
        rels.append(Relation.commutator(E22, Vb1, 1 / (p * s * r), label="fbb-literal"))
    if "b1pm" in literal:
        rels.append(Relation.commutator(E11, E21, 1 / s**2, _lin((-(1 / s**2), E21)), label="b1pm-literal"))
    if "vbar_swap" in literal:
        rels.append(Relation.commutator(E12, Vb1, p * s / r, _lin((1, Vb2)), label="fbb-literal"))
    if "bpm" in literal:
        rels.append(Relation.commutator(E12, E21, s**2 / p**2, rhs, label="bpm-literal"))
    unknown = literal - set(SPL21_CORRECTED)
    if unknown:
        raise ValueError(f"unknown literal readings {sorted(unknown)}")
    return rels


def _param_names(*xs) -> tuple:
    names = set()
    for x in xs:
        names |= as_scalar(x).variables()
    return tuple(sorted(names))


def _printed_to_classical(t: StructureTable) -> StructureTable:
    """Flip Vb and E so the parameter-1 limit matches the classical table.

    The printed deformation uses the basis ``(-Vb, -E)`` relative to the
    classical relations; swaps are unaffected.
    """
    factors = {g: (1 if g.kind == "V" else -1) for g in t.order}
    return rescale(t, factors)


def build_spl21(p=None, r=None, s=None, *, literal: Iterable[str] = (), convention: str = "classical") -> StructureTable:
    """Three-parameter deformation of spl(2,1); ``None`` means symbolic.

    ``convention="classical"`` (default) reduces to the classical table at
    p = r = s = 1; ``"printed"`` keeps the printed right-hand-side signs.
    """
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    p = Scalar.param("p") if p is None else as_scalar(p)
    r = Scalar.param("r") if r is None else as_scalar(r)
    s = Scalar.param("s") if s is None else as_scalar(s)
    for name, x in (("p", p), ("r", r), ("s", s)):
        if not x:
            raise ValueError(f"zero deformation parameter {name}")
        if not x.is_monomial():
            raise ValueError(f"{name} must be a monomial, got {x}")
    literal = tuple(literal)
    corrected = [v for k, v in SPL21_CORRECTED.items() if k not in literal]
    t = table_from_relations(
        2,
        spl_generators(2),
        spl21_relations(p, r, s, literal=literal),
        params=_param_names(p, r, s),
        name="spl(2,1)_{p,r,s}" + ("[literal:" + ",".join(literal) + "]" if literal else ""),
        corrected=corrected,
        on_conflict="last" if literal else "error",
    )
    return _printed_to_classical(t) if convention == "classical" else t


def build_osp22_q(p=None, *, convention: str = "classical") -> StructureTable:
    """One-parameter osp(2,2)_q: p = 1/s = q^(1/2), r = 1.

    ``p`` is the base parameter; ``q = p**2`` is recorded as an alias.
    """
    p = Scalar.param("p") if p is None else as_scalar(p)
    t = build_spl21(p, 1, p.inverse(), convention=convention)
    return StructureTable(
        t.N, t.order, t.rules, t.nilpotents, t.params, "osp(2,2)_q", t.corrected,
        {"q": (p ** 2)}, t.source,
    )


def in_q(t: StructureTable, base: str = "p", q: str = "q") -> StructureTable:
    """Rewrite an osp(2,2)_q table, even in ``base``, in terms of ``q = base**2``."""

    def fn(c):
        return c.halve_exponents(base, q) if isinstance(c, Scalar) else c

    params = tuple(q if n == base else n for n in t.params)
    return t.map_coefficients(fn, params=params)


# --- derived tables ---------------------------------------------------------


def classical_limit(t: StructureTable) -> StructureTable:
    """Every deformation parameter set to 1."""

    def fn(c):
        if isinstance(c, Scalar) and c.variables():
            return Scalar(c.substitute({n: 1 for n in c.variables()}))
        return c

    return t.map_coefficients(fn, name=f"classical({t.name})", params=())


def bosonic_truncation(t: StructureTable) -> StructureTable:
    """Restrict to the E generators, dropping every fermionic remainder term.

    Terms are dropped from the relations as written, before normal ordering:
    reordering ``V*Vb`` produces bosonic terms that do not belong to the
    truncated algebra.  Tables without that record (loaded from JSON) use
    their normal-ordered remainders.
    """
    order = tuple(g for g in t.order if not g.is_fermion)
    rules = {}
    for (g1, g2), r in t.rules.items():
        if g1.is_fermion or g2.is_fermion:
            continue
        r = t.source.get((g1, g2), r)
        rem = Expression({w: c for w, c in r.remainder.terms.items() if not any(g.is_fermion for g in w)})
        rules[(g1, g2)] = Rule(r.swap, rem)
    return StructureTable(t.N, order, rules, frozenset(), t.params, f"bosonic({t.name})", frozenset())


def relabel(t: StructureTable, mapping: Mapping[Generator, Generator], order=None, name=None) -> StructureTable:
    """Rename generators and re-orient every rule for the new order."""
    order = tuple(order) if order is not None else tuple(sorted(
        (mapping.get(g, g) for g in t.order), key=lambda g: (KIND_RANK.get(g.kind, 9), g.a, g.b)
    ))

    def m(g):
        return Expression.word(mapping.get(g, g))

    rels = []
    for (g1, g2), r in t.rules.items():
        r = t.source.get((g1, g2), r)
        rels.append(Relation(mapping.get(g1, g1), mapping.get(g2, g2), r.swap, r.remainder.map_generators(m)))
    for g in t.nilpotents:
        g = mapping.get(g, g)
        rels.append(Relation.anticommutator(g, g, 1))
    return table_from_relations(t.N, order, rels, params=t.params, name=name or f"relabel({t.name})")


def rescale(t: StructureTable, factors: Mapping[Generator, object]) -> StructureTable:
    """Change basis ``G = c_G * G'``; swaps are unchanged."""
    def m(g):
        return Expression.word(g, coeff=as_scalar(factors.get(g, 1)))

    def apply(rules):
        out = {}
        for (g1, g2), r in rules.items():
            c = as_scalar(factors.get(g1, 1)) * as_scalar(factors.get(g2, 1))
            out[(g1, g2)] = Rule(r.swap, r.remainder.map_generators(m).scale(c.inverse()))
        return out

    return StructureTable(
        t.N, t.order, apply(t.rules), t.nilpotents, t.params, t.name, t.corrected, t.aliases,
        apply(t.source),
    )


# --- effective parameter count ---------------------------------------------


def gl_exponent_vectors(N: int) -> list[list[int]]:
    """Exponent vectors, over the basis q_{ab} (a<b), of the gl(N) structure constants."""
    t = bosonic_truncation(build_spl_n1(N))
    basis = [param_name(a, b) for a in range(1, N + 1) for b in range(a + 1, N + 1)]
    pos = {n: i for i, n in enumerate(basis)}
    vecs = []
    coeffs = []
    for r in t.rules.values():
        coeffs.append(r.swap)
        coeffs.extend(r.remainder.terms.values())
    for c in coeffs:
        for m in c.num.terms:
            v = [0] * len(basis)
            for name, e in m:
                v[pos[name]] = e
            vecs.append(v)
    return vecs


def integer_rank(rows: list[list[int]]) -> int:
    """Rank of an integer matrix by fraction-free (Bareiss) elimination."""
    m = [list(map(int, r)) for r in rows if any(r)]
    if not m:
        return 0
    ncols = len(m[0])
    rank, prev = 0, 1
    for col in range(ncols):
        piv = next((i for i in range(rank, len(m)) if m[i][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(rank + 1, len(m)):
            for j in range(col + 1, ncols):
                m[i][j] = (m[i][j] * m[rank][col] - m[i][col] * m[rank][j]) // prev
            m[i][col] = 0
        prev = m[rank][col]
        rank += 1
        if rank == len(m):
            break
    return rank


def effective_parameter_rank(N: int) -> int:
    """Number of independent parameter combinations in the gl(N) sector."""
    if N < 2:
        raise ValueError("N must be >= 2")
    vecs = gl_exponent_vectors(N)
    return integer_rank(vecs) if vecs else 0
