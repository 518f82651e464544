"""Finite-difference matrix representations on P(n-1) + P(n).

Operators act on two-component polynomial vectors.  The upper component
lives in P(m) (m = n-1 for the representations built here), the lower one in
P(n).  Every operator is stored as a square matrix on an *ambient* space that
adds ``slack`` overflow slots per block (degrees m+1.. and n+1..), appended
after the regular basis ``e_0..e_m, f_0..f_n``.  A generator preserves the graded space
exactly when no in-space column has an entry in an overflow row; that is
what :func:`invariance_check` tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from .algebra import Expression, Generator, StructureTable, V, Vb, E, in_q, build_osp22_q
from .matrix import Matrix
from .scalar import Scalar, substitute

UPPER, LOWER = "upper", "lower"


@dataclass(frozen=True)
class PolyBasis:
    degree_bound: int

    @property
    def dim(self) -> int:
        return self.degree_bound + 1


@dataclass(frozen=True)
class GradedSpace:
    upper: PolyBasis
    lower: PolyBasis
    slack: int = 1  # overflow slots per block in the ambient space

    @classmethod
    def for_degree(cls, n: int, slack: int = 1) -> GradedSpace:
        return cls(PolyBasis(n - 1), PolyBasis(n), slack)

    @property
    def dim(self) -> int:
        return self.upper.dim + self.lower.dim

    @property
    def ambient_dim(self) -> int:
        return self.dim + 2 * self.slack

    def index(self, block: str, k: int) -> int | None:
        """Ambient index of x^k in ``block``; None beyond the overflow slots.

        Overflow slots follow the regular basis, alternating upper/lower by
        degree.
        """
        bound = self.upper.degree_bound if block == UPPER else self.lower.degree_bound
        if k < 0 or k > bound + self.slack:
            return None
        if k > bound:
            return self.dim + 2 * (k - bound - 1) + (0 if block == UPPER else 1)
        return k if block == UPPER else self.upper.dim + k

    def label(self, i: int) -> str:
        if i < self.upper.dim:
            return f"e_{i}"
        if i < self.dim:
            return f"f_{i - self.upper.dim}"
        extra, lower = divmod(i - self.dim, 2)
        if lower:
            return f"f_{self.lower.dim + extra}"
        return f"e_{self.upper.dim + extra}"

    def block_of(self, i: int) -> str:
        if i < self.upper.dim or (i >= self.dim and (i - self.dim) % 2 == 0):
            return UPPER
        return LOWER

    def labels(self) -> list[str]:
        return [self.label(i) for i in range(self.dim)]


def _block_operator(space: GradedSpace, src: str, dst: str, action: Callable[[int], list]) -> Matrix:
    """Ambient matrix of ``x^k (src) -> sum c x^j (dst)`` for every ambient k."""
    n = space.ambient_dim
    bound = space.upper.degree_bound if src == UPPER else space.lower.degree_bound
    out = Matrix(n, n)
    for k in range(bound + space.slack + 1):
        col = space.index(src, k)
        for j, c in action(k):
            row = space.index(dst, j)
            if row is not None and c:
                out.entries[(row, col)] = out.entries.get((row, col), 0) + c
    out.entries = {k: v for k, v in out.entries.items() if v}
    return out


def _qnum(k: int, q):
    """[k]_q for a Fraction or Scalar q (polynomial form, exact at q = 1)."""
    total = q * 0
    term = q ** 0
    for _ in range(k):
        total = total + term
        term = term * q
    return total


def _as_field(q):
    if isinstance(q, float):
        raise TypeError("q must be exact (int, Fraction, Scalar or a parameter name), not float")
    if isinstance(q, Scalar):
        return q
    if isinstance(q, str):
        return Scalar.param(q)
    return Fraction(q)


def jackson_matrix(n: int, q) -> Matrix:
    """(n+1)x(n+1) matrix of D_q on P(n) in the basis 1, x, ..., x^n."""
    if n < 0:
        raise ValueError("n must be >= 0")
    q = _as_field(q)
    if not q:
        raise ValueError("q must be nonzero")
    return Matrix(n + 1, n + 1, {(k - 1, k): _qnum(k, q) for k in range(1, n + 1)})


def apply_jackson(coeffs: list, q) -> list:
    """D_q on a coefficient list (lowest degree first)."""
    return [_qnum(k, q) * c for k, c in enumerate(coeffs)][1:] or [q * 0]


@dataclass
class Representation:
    space: GradedSpace
    assign: dict  # Generator -> ambient Matrix
    parameter_point: dict = field(default_factory=dict)
    name: str = ""
    table: StructureTable | None = None
    notes: list = field(default_factory=list)
    # rebuilds the same operators with a given number of overflow slots
    with_slack: Callable[[int], "Representation"] | None = field(default=None, repr=False, compare=False)

    def ambient(self, g: Generator) -> Matrix:
        return self.assign[g]

    def matrix(self, g: Generator) -> Matrix:
        d = self.space.dim
        return self.assign[g].submatrix(range(d), range(d))

    def identity(self) -> Matrix:
        one = Scalar(1) if self.is_symbolic() else Fraction(1)
        return Matrix.identity(self.space.dim, one)

    def is_symbolic(self) -> bool:
        return not self.parameter_point

    def coefficient(self, c):
        """Bring an expression coefficient into the representation's field."""
        if self.is_symbolic():
            return Scalar.coerce(c)
        if isinstance(c, Scalar):
            return substitute(c, self.parameter_point)
        return Fraction(c)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "parameter_point": {k: str(v) for k, v in sorted(self.parameter_point.items())},
            "basis": self.space.labels(),
            "dimension": self.space.dim,
            "generators": {str(g): self.matrix(g).to_dict() for g in self.assign},
        }


def evaluate_in_rep(e: Expression, rep: Representation) -> Matrix:
    """Linear extension of the generator matrices to an expression."""
    d = rep.space.dim
    out = Matrix(d, d)
    cache = {g: rep.matrix(g) for g in e.generators()}
    for w, c in e.terms.items():
        m = rep.identity()
        for g in w:
            m = m @ cache[g]
        out = out + m.scale(rep.coefficient(c))
    return out


REP_CONVENTIONS = ("table", "quoted")


def _fermion_matrices_osp22(space: GradedSpace, n: int, q, convention: str = "table") -> dict:
    """The four fermionic operators on P(n-1) + P(n).

    sigma_- sends upper to lower, sigma_+ sends lower to upper.

    ``"quoted"`` is the literal operator set
    ``Vb1 = q^-n (x D_q - [n]) s+``, ``Vb2 = q^-1 D_q s+``.  It realizes the
    deformed table only after ``Vb1 -> -Vb1`` and ``Vb2 -> q^2 Vb2``;
    ``"table"`` (default) applies that rescaling, so the operators satisfy
    the table built by ``build_osp22_q`` and the classical table at q = 1.
    """
    if convention not in REP_CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}; expected one of {REP_CONVENTIONS}")
    qn = _qnum(n, q)
    sign, vb2 = (1, q ** (-1)) if convention == "quoted" else (-1, q)
    return {
        V(1): _block_operator(space, UPPER, LOWER, lambda k: [(k, 1)]),
        V(2): _block_operator(space, UPPER, LOWER, lambda k: [(k + 1, 1)]),
        Vb(1): _block_operator(
            space, LOWER, UPPER, lambda k: [(k, sign * q ** (-n) * (_qnum(k, q) - qn))]
        ),
        Vb(2): _block_operator(space, LOWER, UPPER, lambda k: [(k - 1, vb2 * _qnum(k, q))]),
    }


def _bosons_from_fermions(mats: dict, table: StructureTable, coeff) -> dict:
    """E(a,b) from the V(a)*Vb(b) rules: V_a Vb^b = swap Vb^b V_a + kappa E(a,b) + rest."""
    out = {}
    pending = []
    for (g1, g2), rule in table.rules.items():
        if g1.kind == "V" and g2.kind == "Vb":
            pending.append((g1, g2, rule))
    for g1, g2, rule in pending:
        target = E(g1.a, g2.a)
        kappa = rule.remainder.terms.get((target,))
        if not kappa:
            raise ValueError(f"rule {g1}*{g2} does not produce {target}")
        rest = Expression({w: c for w, c in rule.remainder.terms.items() if w != (target,)})
        if rest.generators() - set(mats):
            raise ValueError(f"rule {g1}*{g2} remainder needs unknown generators")
        m = mats[g1] @ mats[g2] - (mats[g2] @ mats[g1]).scale(coeff(rule.swap))
        for w, c in rest.terms.items():
            prod = None
            for g in w:
                prod = mats[g] if prod is None else prod @ mats[g]
            m = m - prod.scale(coeff(c))
        out[target] = m.scale(1 / coeff(kappa))
    return out


def build_osp22_rep(
    n: int, q=None, *, convention: str = "table", vbar2_factor=None, slack: int = 1
) -> Representation:
    """Representation of osp(2,2)_q on P(n-1) + P(n).

    ``q=None`` builds the symbolic representation over Q(q).  See
    ``_fermion_matrices_osp22`` for ``convention``; ``vbar2_factor``
    overrides the scalar factor of Vb(2) (mutation tests).  ``slack`` is the
    number of overflow degrees tracked per block.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    symbolic = q is None
    qv = Scalar.param("q") if symbolic else _as_field(q)
    if not qv:
        raise ValueError("q must be nonzero")
    space = GradedSpace.for_degree(n, slack)
    mats = _fermion_matrices_osp22(space, n, qv, convention)
    if vbar2_factor is not None:
        mats[Vb(2)] = _block_operator(
            space, LOWER, UPPER, lambda k: [(k - 1, _as_field(vbar2_factor) * _qnum(k, qv))]
        )
    table = in_q(build_osp22_q())
    point = {} if symbolic else {"q": qv}
    if not symbolic:
        table = table.specialize(point)

    def coeff(c):
        if symbolic:
            return Scalar.coerce(c)
        return Fraction(c) if not isinstance(c, Scalar) else substitute(c, point)

    mats.update(_bosons_from_fermions(mats, table, coeff))
    label = "" if convention == "table" else f" [{convention}]"
    rep = Representation(space, mats, point, f"osp(2,2)_q rep n={n}{label}", table)
    rep.with_slack = lambda k: build_osp22_rep(
        n, q, convention=convention, vbar2_factor=vbar2_factor, slack=k
    )
    rep.notes.append(
        f"dim P({n - 1}) + dim P({n}) = {space.dim} (the text states 2n-1 = {2 * n - 1})"
    )
    return rep


OSP12 = {
    "V-": Generator("V-", 0),
    "V+": Generator("V+", 0),
    "H": Generator("H", 0),
    "J-": Generator("J-", 0),
    "J+": Generator("J+", 0),
}


def build_osp12_rep(n: int, q=None, *, slack: int = 1) -> Representation:
    """Deformed osp(1,2) on P(n-1) + P(n); bosons via q-anticommutators."""
    if n < 1:
        raise ValueError("n must be >= 1")
    symbolic = q is None
    qv = Scalar.param("q") if symbolic else _as_field(q)
    if not qv:
        raise ValueError("q must be nonzero")
    q2 = qv * qv
    space = GradedSpace.for_degree(n, slack)
    qn = _qnum(n, q2)
    v_minus = _block_operator(space, LOWER, UPPER, lambda k: [(k - 1, _qnum(k, q2))]) + _block_operator(
        space, UPPER, LOWER, lambda k: [(k, 1)]
    )
    v_plus = _block_operator(
        space, LOWER, UPPER, lambda k: [(k, q2 ** (-n) * (_qnum(k, q2) - qn))]
    ) + _block_operator(space, UPPER, LOWER, lambda k: [(k + 1, 1)])

    def anti(a, b):
        return a @ b + (b @ a).scale(qv)

    mats = {
        OSP12["V-"]: v_minus,
        OSP12["V+"]: v_plus,
        OSP12["H"]: anti(v_minus, v_plus),
        OSP12["J-"]: anti(v_minus, v_minus),
        OSP12["J+"]: anti(v_plus, v_plus),
    }
    point = {} if symbolic else {"q": qv}
    rep = Representation(space, mats, point, f"osp(1,2)_q rep n={n}")
    rep.with_slack = lambda k: build_osp12_rep(n, q, slack=k)
    return rep


@dataclass
class RelationReport:
    name: str
    residuals: dict  # rule id -> Matrix
    checked: int

    @property
    def failures(self) -> list:
        return sorted(k for k, m in self.residuals.items() if not m.is_zero())

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {
            "representation": self.name,
            "relations_checked": self.checked,
            "failures": [
                {"rule": k, "residual": self.residuals[k].to_dict()} for k in self.failures
            ],
            "passed": self.passed,
        }


def verify_relations(rep: Representation, t: StructureTable) -> RelationReport:
    """Check every rule of ``t`` as a matrix identity in ``rep``."""
    missing = set(t.order) - set(rep.assign)
    if missing:
        raise KeyError(f"representation lacks {sorted(map(str, missing))}")
    mats = {g: rep.matrix(g) for g in t.order}
    residuals = {}
    for (g1, g2), rule in t.rules.items():
        lhs = mats[g1] @ mats[g2]
        rhs = (mats[g2] @ mats[g1]).scale(rep.coefficient(rule.swap))
        rhs = rhs + evaluate_in_rep(rule.remainder, rep) if rule.remainder else rhs
        residuals[f"{g1}*{g2}"] = lhs - rhs
    for g in sorted(t.nilpotents, key=lambda g: t.rank[g]):
        residuals[f"{g}*{g}"] = mats[g] @ mats[g]
    return RelationReport(rep.name, residuals, len(residuals))


@dataclass
class InvarianceReport:
    violations: list  # (generator, column label, row label, reason)

    @property
    def passed(self) -> bool:
        return not self.violations


def _expected_blocks(g: Generator):
    """Allowed (src, dst) block pairs by fermion charge or parity."""
    if g.kind == "V":
        return {(UPPER, LOWER)}
    if g.kind == "Vb":
        return {(LOWER, UPPER)}
    if g.is_fermion:
        return {(UPPER, LOWER), (LOWER, UPPER)}
    return {(UPPER, UPPER), (LOWER, LOWER)}


def matrix_invariance(m: Matrix, space: GradedSpace, allowed=None) -> list:
    """Violations of ``m`` against the graded space.

    ``m`` may be compact (``space.dim``) or ambient (``space.ambient_dim``);
    any other shape has its extra rows treated as overflow.
    """
    out = []
    d = space.dim
    for (i, j), v in sorted(m.entries.items()):
        if j >= d:
            continue
        if i >= d:
            out.append((space.label(j), f"row {i}", "degree overflow"))
            continue
        if allowed is not None and (space.block_of(j), space.block_of(i)) not in allowed:
            out.append((space.label(j), space.label(i), "block structure"))
    return out


def invariance_check(rep: Representation, generators=None) -> InvarianceReport:
    """Every generator maps P(m)+P(n) into itself with its block pattern."""
    violations = []
    for g in generators or rep.assign:
        for col, row, why in matrix_invariance(rep.ambient(g), rep.space, _expected_blocks(g)):
            violations.append((str(g), col, row, why))
    return InvarianceReport(violations)


def casimir_value(n: int, q=None) -> Scalar:
    """-(1/2) [-n - 1/2]_{q^2} = -(1/2) (1 - q^(-2n-1)) / (1 - q^2)."""
    qs = Scalar.param("q")
    c = Scalar(Fraction(-1, 2)) * (1 - qs ** (-2 * n - 1)) / (1 - qs ** 2)
    if q is None:
        return c
    q = _as_field(q)
    if q == 0:
        raise ValueError("q must be nonzero")
    return Scalar(substitute(c, {"q": q}))


def check_casimir_operator(expr: Expression, rep: Representation, n: int) -> bool:
    """Does a user-supplied Casimir expression act as casimir_value(n) * 1 on ``rep``?"""
    m = evaluate_in_rep(expr, rep)
    val = casimir_value(n, None if rep.is_symbolic() else rep.parameter_point["q"])
    target = rep.identity().scale(val if rep.is_symbolic() else val.to_fraction())
    return m == target
