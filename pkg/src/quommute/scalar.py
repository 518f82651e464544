"""Exact scalars: rationals and rational functions in named deformation parameters.

A :class:`LaurentPoly` is a finite sum of Laurent monomials with
:class:`fractions.Fraction` coefficients.  A :class:`Scalar` is a quotient of
two of them, kept in a canonical form where the denominator is free of
monomial factors and has leading coefficient 1.  Equality is decided by
cross-multiplication, so two scalars compare equal even when their stored
fractions differ by a common non-monomial factor.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Mapping, Union

Monomial = tuple  # sorted tuple of (param_name, nonzero exponent)
RationalLike = Union[int, Fraction]

_UNIT: Monomial = ()


class ScalarError(ArithmeticError):
    """Raised for division by a zero scalar."""


class PoleError(ArithmeticError):
    """Raised when a substitution makes a denominator vanish."""


def _mono_mul(m1: Monomial, m2: Monomial) -> Monomial:
    if not m1:
        return m2
    if not m2:
        return m1
    exps = dict(m1)
    for name, e in m2:
        total = exps.get(name, 0) + e
        if total:
            exps[name] = total
        else:
            del exps[name]
    return tuple(sorted(exps.items()))


def _mono_pow(m: Monomial, k: int) -> Monomial:
    if k == 0:
        return _UNIT
    return tuple((name, e * k) for name, e in m)


def _mono_from(exps: Mapping[str, int]) -> Monomial:
    return tuple(sorted((n, e) for n, e in exps.items() if e))


class LaurentPoly:
    """Sparse multivariate Laurent polynomial over the rationals."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, RationalLike] | None = None):
        self.terms: dict[Monomial, Fraction] = {}
        if terms:
            for m, c in terms.items():
                if c:
                    self.terms[m] = Fraction(c)

    @classmethod
    def constant(cls, c: RationalLike) -> LaurentPoly:
        return cls({_UNIT: c})

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coeff: RationalLike = 1) -> LaurentPoly:
        return cls({_mono_from(exps): coeff})

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other: LaurentPoly) -> LaurentPoly:
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        res = LaurentPoly()
        res.terms = out
        return res

    def __neg__(self) -> LaurentPoly:
        res = LaurentPoly()
        res.terms = {m: -c for m, c in self.terms.items()}
        return res

    def __sub__(self, other: LaurentPoly) -> LaurentPoly:
        return self + (-other)

    def __mul__(self, other: LaurentPoly) -> LaurentPoly:
        out: dict[Monomial, Fraction] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        res = LaurentPoly()
        res.terms = out
        return res

    def scale(self, c: RationalLike) -> LaurentPoly:
        if not c:
            return LaurentPoly()
        res = LaurentPoly()
        res.terms = {m: v * c for m, v in self.terms.items()}
        return res

    def shift(self, m: Monomial) -> LaurentPoly:
        res = LaurentPoly()
        res.terms = {_mono_mul(k, m): v for k, v in self.terms.items()}
        return res

    def variables(self) -> set[str]:
        return {name for m in self.terms for name, _ in m}

    def is_constant(self) -> bool:
        return all(m == _UNIT for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get(_UNIT, Fraction(0))

    def single_term(self):
        """(monomial, coeff) if this polynomial has exactly one term, else None."""
        if len(self.terms) == 1:
            return next(iter(self.terms.items()))
        return None

    def leading(self) -> tuple[Monomial, Fraction]:
        m = max(self.terms)
        return m, self.terms[m]

    def min_exponents(self) -> dict[str, int]:
        """Per-variable minimum exponent, treating absent variables as 0."""
        names = self.variables()
        mins = {n: 0 for n in names}
        first = True
        for m in self.terms:
            d = dict(m)
            for n in names:
                e = d.get(n, 0)
                if first or e < mins[n]:
                    mins[n] = e
            first = False
        return mins

    def evaluate(self, point: Mapping[str, Fraction]) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms.items():
            v = c
            for name, e in m:
                x = point[name]
                if e < 0 and x == 0:
                    raise PoleError(f"parameter {name} = 0 at a negative power")
                v *= x ** e
            total += v
        return total

    def map_monomials(self, fn) -> LaurentPoly:
        res = LaurentPoly()
        for m, c in self.terms.items():
            c2, m2 = fn(m)
            res = res + LaurentPoly({m2: c * c2})
        return res

    def __repr__(self) -> str:
        return f"LaurentPoly({render_poly(self)!r})"


# --- exact division helpers -------------------------------------------------


def _to_dense(p: LaurentPoly, names: list[str]) -> dict[tuple, Fraction]:
    out = {}
    for m, c in p.terms.items():
        d = dict(m)
        out[tuple(d.get(n, 0) for n in names)] = c
    return out


def _from_dense(d: Mapping[tuple, Fraction], names: list[str]) -> LaurentPoly:
    res = LaurentPoly()
    res.terms = {
        tuple((n, e) for n, e in zip(names, k) if e): c for k, c in d.items() if c
    }
    return res


def _exact_divide(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly | None:
    """num / den if den divides num in the Laurent ring, else None.

    Multivariate division by a single divisor under lex order: a nonzero
    remainder term means den does not divide num.
    """
    names = sorted(num.variables() | den.variables())
    # move both into the polynomial ring
    nmin = num.min_exponents()
    dmin = den.min_exponents()
    nshift = _mono_from({n: -nmin.get(n, 0) for n in names})
    dshift = _mono_from({n: -dmin.get(n, 0) for n in names})
    a = _to_dense(num.shift(nshift), names)
    b = _to_dense(den.shift(dshift), names)
    lt_b = max(b)
    lc_b = b[lt_b]
    quot: dict[tuple, Fraction] = {}
    while a:
        lt_a = max(a)
        diff = tuple(x - y for x, y in zip(lt_a, lt_b))
        if any(e < 0 for e in diff):
            return None
        c = a[lt_a] / lc_b
        quot[diff] = quot.get(diff, 0) + c
        for k, v in b.items():
            key = tuple(x + y for x, y in zip(k, diff))
            s = a.get(key, 0) - c * v
            if s:
                a[key] = s
            else:
                a.pop(key, None)
    q = _from_dense(quot, names)
    # undo the shifts: num = q * den * x^(-nshift + dshift)
    back = _mono_mul(_mono_pow(nshift, -1), dshift)
    return q.shift(back)


def _univariate_gcd(p: LaurentPoly, r: LaurentPoly, name: str) -> LaurentPoly:
    """Monic gcd of two polynomials in one variable (nonnegative exponents)."""

    def dense(x: LaurentPoly) -> list[Fraction]:
        deg = max((dict(m).get(name, 0) for m in x.terms), default=0)
        out = [Fraction(0)] * (deg + 1)
        for m, c in x.terms.items():
            out[dict(m).get(name, 0)] = c
        return out

    def trim(v):
        while v and v[-1] == 0:
            v.pop()
        return v

    a, b = trim(dense(p)), trim(dense(r))
    while b:
        while len(a) >= len(b) and a:
            c = a[-1] / b[-1]
            off = len(a) - len(b)
            for i, v in enumerate(b):
                a[i + off] -= c * v
            trim(a)
        a, b = b, a
    lead = a[-1]
    return _from_dense({(i,): c / lead for i, c in enumerate(a)}, [name])


def _canonical(num: LaurentPoly, den: LaurentPoly) -> tuple[LaurentPoly, LaurentPoly]:
    if not den:
        raise ScalarError("division by zero scalar")
    if not num:
        return num, _ONE_POLY
    one = den.single_term()
    if one is not None:
        m, c = one
        inv = _mono_pow(m, -1)
        return num.shift(inv).scale(1 / c), _ONE_POLY
    q = _exact_divide(num, den)
    if q is not None:
        return q, _ONE_POLY
    dmin = den.min_exponents()
    shift = _mono_from({n: -e for n, e in dmin.items()})
    num, den = num.shift(shift), den.shift(shift)
    names = num.variables() | den.variables()
    if len(names) == 1:
        (name,) = names
        nmin = num.min_exponents().get(name, 0)
        nshift = _mono_from({name: -nmin})
        g = _univariate_gcd(num.shift(nshift), den, name)
        if len(g) > 1 or g.single_term()[0] != _UNIT:
            num = _exact_divide(num, g)
            den = _exact_divide(den, g)
            dmin = den.min_exponents()
            shift = _mono_from({n: -e for n, e in dmin.items()})
            num, den = num.shift(shift), den.shift(shift)
            one = den.single_term()
            if one is not None:
                m, c = one
                return num.shift(_mono_pow(m, -1)).scale(1 / c), _ONE_POLY
    _, lc = den.leading()
    if lc != 1:
        num, den = num.scale(1 / lc), den.scale(1 / lc)
    return num, den


_ONE_POLY = LaurentPoly.constant(1)


class Scalar:
    """Element of Q(params): a quotient of Laurent polynomials.

    Scalars are immutable.  Arithmetic accepts ints and Fractions on either
    side.  ``bool(x)`` is False exactly for the zero scalar.
    """

    __slots__ = ("num", "den")

    def __init__(self, num: LaurentPoly | RationalLike = 0, den: LaurentPoly | None = None):
        if not isinstance(num, LaurentPoly):
            num = LaurentPoly.constant(num)
        if den is None or den == _ONE_POLY:
            self.num, self.den = num, _ONE_POLY
        else:
            self.num, self.den = _canonical(num, den)

    # constructors

    @classmethod
    def param(cls, name: str, exponent: int = 1) -> Scalar:
        return cls(LaurentPoly.monomial({name: exponent}))

    @classmethod
    def monomial(cls, exps: Mapping[str, int], coeff: RationalLike = 1) -> Scalar:
        return cls(LaurentPoly.monomial(exps, coeff))

    @classmethod
    def coerce(cls, x) -> Scalar:
        if isinstance(x, Scalar):
            return x
        if isinstance(x, (int, Fraction)):
            return cls(x)
        if isinstance(x, str):
            return parse_scalar(x)
        raise TypeError(f"cannot make a Scalar from {type(x).__name__}")

    # predicates

    def __bool__(self) -> bool:
        return bool(self.num)

    def is_polynomial(self) -> bool:
        return self.den == _ONE_POLY

    def is_constant(self) -> bool:
        return self.is_polynomial() and self.num.is_constant()

    def is_monomial(self) -> bool:
        return self.is_polynomial() and len(self.num) == 1

    def to_fraction(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.num.constant_value()

    def variables(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    # arithmetic

    def __add__(self, other) -> Scalar:
        if not isinstance(other, Scalar):
            if isinstance(other, (int, Fraction)):
                other = Scalar(other)
            else:
                return NotImplemented
        if self.den is _ONE_POLY or self.den == _ONE_POLY:
            if other.den == _ONE_POLY:
                return Scalar(self.num + other.num)
        if self.den == other.den:
            return Scalar(self.num + other.num, self.den)
        return Scalar(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> Scalar:
        res = Scalar.__new__(Scalar)
        res.num, res.den = -self.num, self.den
        return res

    def __sub__(self, other) -> Scalar:
        if not isinstance(other, (Scalar, int, Fraction)):
            return NotImplemented
        return self + (-Scalar.coerce(other))

    def __rsub__(self, other) -> Scalar:
        return Scalar.coerce(other) + (-self)

    def __mul__(self, other) -> Scalar:
        if isinstance(other, (int, Fraction)):
            if not other:
                return Scalar(0)
            res = Scalar.__new__(Scalar)
            res.num, res.den = self.num.scale(other), self.den
            return res
        if not isinstance(other, Scalar):
            return NotImplemented
        if self.den == _ONE_POLY and other.den == _ONE_POLY:
            return Scalar(self.num * other.num)
        return Scalar(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> Scalar:
        if not self.num:
            raise ScalarError("division by zero scalar")
        return Scalar(self.den, self.num)

    def __truediv__(self, other) -> Scalar:
        other = Scalar.coerce(other)
        return self * other.inverse()

    def __rtruediv__(self, other) -> Scalar:
        return Scalar.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> Scalar:
        if k < 0:
            return self.inverse() ** (-k)
        if self.is_monomial():
            (m, c), = self.num.terms.items()
            return Scalar(LaurentPoly({_mono_pow(m, k): c ** k}))
        out = Scalar(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Scalar(other)
        if not isinstance(other, Scalar):
            return NotImplemented
        if self.den == other.den:
            return self.num == other.num
        return not (self.num * other.den - other.num * self.den)

    __hash__ = None  # equality is not structural on the stored pair

    # substitution

    def substitute(self, assignment: Mapping[str, RationalLike]) -> Fraction:
        return substitute(self, assignment)

    def partial_substitute(self, assignment: Mapping[str, RationalLike]) -> Scalar:
        """Replace some parameters by rationals, keeping the rest symbolic."""

        def fn(m):
            c = Fraction(1)
            keep = []
            for name, e in m:
                if name in assignment:
                    v = Fraction(assignment[name])
                    if v == 0 and e < 0:
                        raise PoleError(f"pole at {name} = 0")
                    c *= v ** e
                else:
                    keep.append((name, e))
            return c, tuple(keep)

        num = self.num.map_monomials(fn)
        den = self.den.map_monomials(fn)
        if not den:
            raise PoleError(
                "denominator vanishes at "
                + ", ".join(f"{k}={v}" for k, v in sorted(assignment.items()))
            )
        return Scalar(num, den)

    def rename(self, mapping: Mapping[str, tuple[str, int]]) -> Scalar:
        """Substitute each parameter ``name`` by ``new_name ** power``."""

        def fn(m):
            exps: dict[str, int] = {}
            for name, e in m:
                new, power = mapping.get(name, (name, 1))
                exps[new] = exps.get(new, 0) + e * power
            return 1, _mono_from(exps)

        return Scalar(self.num.map_monomials(fn), self.den.map_monomials(fn))

    def halve_exponents(self, name: str, new_name: str) -> Scalar:
        """Rewrite a scalar that is even in ``name`` in terms of ``new_name = name**2``."""

        def fn(m):
            exps = {}
            for n, e in m:
                if n == name:
                    if e % 2:
                        raise ValueError(f"odd power of {name} in {self}")
                    exps[new_name] = exps.get(new_name, 0) + e // 2
                else:
                    exps[n] = exps.get(n, 0) + e
            return 1, _mono_from(exps)

        return Scalar(self.num.map_monomials(fn), self.den.map_monomials(fn))

    def __str__(self) -> str:
        return render_scalar(self)

    def __repr__(self) -> str:
        return f"Scalar({render_scalar(self)!r})"


ZERO = Scalar(0)
ONE = Scalar(1)


def as_scalar(x) -> Scalar:
    return Scalar.coerce(x)


def substitute(x, assignment: Mapping[str, RationalLike]) -> Fraction:
    """Evaluate ``x`` at a rational parameter point."""
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    point = {k: Fraction(v) for k, v in assignment.items()}
    missing = x.variables() - point.keys()
    if missing:
        raise KeyError(f"no value for parameters {sorted(missing)}")
    den = x.den.evaluate(point)
    if den == 0:
        used = {k: point[k] for k in sorted(x.variables())}
        raise PoleError(
            "denominator vanishes at " + ", ".join(f"{k}={v}" for k, v in used.items())
        )
    return x.num.evaluate(point) / den


def q_number(n: int, base: str | Scalar, power: int = 1) -> Scalar:
    """The q-number ``[n]_{base**power} = (1 - base**(power*n)) / (1 - base**power)``."""
    if power == 0:
        raise ValueError("power must be nonzero")
    b = Scalar.param(base) if isinstance(base, str) else base
    t = b ** power
    if n >= 0:
        total = Scalar(0)
        term = Scalar(1)
        for _ in range(n):
            total = total + term
            term = term * t
        return total
    return (1 - t ** n) / (1 - t)


def q_number_value(n: int, q: RationalLike) -> Fraction:
    """[n]_q at a rational point (Laurent form, valid at q = 1 too)."""
    q = Fraction(q)
    if n >= 0:
        return sum((q ** k for k in range(n)), Fraction(0))
    return -(q ** n) * q_number_value(-n, q)


# --- literal syntax ---------------------------------------------------------

_RAT = re.compile(r"^\s*(-?)\s*(\d+)\s*(?:/\s*(\d+))?\s*$")
_FACTOR = re.compile(r"^\s*([A-Za-z][A-Za-z0-9_]*)\s*(?:\^\s*(-?\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"a/b"`` or ``"a"`` with an optional leading minus."""
    m = _RAT.match(text)
    if not m:
        raise ValueError(f"malformed rational literal {text!r}")
    sign, a, b = m.groups()
    if b is not None and int(b) == 0:
        raise ValueError(f"zero denominator in {text!r}")
    val = Fraction(int(a), int(b) if b else 1)
    return -val if sign else val


def parse_scalar(text: str) -> Scalar:
    """Parse a monomial literal such as ``"q12^-1 * 3/2"`` or ``"-p^2"``.

    Sums are not accepted here; the expression grammar handles those.
    """
    s = text.strip()
    sign = 1
    if s.startswith("-"):
        sign, s = -1, s[1:]
    if not s:
        raise ValueError(f"empty scalar literal {text!r}")
    coeff = Fraction(sign)
    exps: dict[str, int] = {}
    for part in s.split("*"):
        if _RAT.match(part):
            coeff *= parse_rational(part)
            continue
        m = _FACTOR.match(part)
        if not m:
            raise ValueError(f"malformed scalar literal {text!r}")
        name, e = m.group(1), int(m.group(2) or 1)
        exps[name] = exps.get(name, 0) + e
    return Scalar.monomial(exps, coeff)


def _render_mono(m: Monomial) -> str:
    return "*".join(name if e == 1 else f"{name}^{e}" for name, e in m)


def _render_term(m: Monomial, c: Fraction, first: bool) -> str:
    sign = "-" if c < 0 else ("" if first else "+")
    a = abs(c)
    mono = _render_mono(m)
    if not mono:
        body = str(a)
    elif a == 1:
        body = mono
    else:
        body = f"{a}*{mono}"
    if first:
        return f"{sign}{body}"
    return f" {sign} {body}"


def _mono_sort_key(m: Monomial):
    return (sum(abs(e) for _, e in m), m)


def render_poly(p: LaurentPoly) -> str:
    if not p.terms:
        return "0"
    items = sorted(p.terms.items(), key=lambda kv: _mono_sort_key(kv[0]))
    return "".join(_render_term(m, c, i == 0) for i, (m, c) in enumerate(items))


def render_scalar(x: Scalar) -> str:
    if x.den == _ONE_POLY:
        return render_poly(x.num)
    return f"({render_poly(x.num)})/({render_poly(x.den)})"


def param_name(a: int, b: int) -> str:
    """Name of the parameter q_{ab} (a < b)."""
    if a >= 10 or b >= 10:
        return f"q{a}_{b}"
    return f"q{a}{b}"


def q_param(a: int, b: int, values: Mapping[tuple[int, int], Scalar] | None = None) -> Scalar:
    """q_{ab} with q_{ba} = 1/q_{ab} and q_{aa} = 1."""
    if a == b:
        return ONE
    lo, hi = min(a, b), max(a, b)
    if values is not None and (lo, hi) in values:
        base = as_scalar(values[(lo, hi)])
    else:
        base = Scalar.param(param_name(lo, hi))
    return base if a < b else base.inverse()


def random_rational(rng, lo: int = 1, hi: int = 9, nonzero: bool = True, avoid: Iterable = ()) -> Fraction:
    """Random rational with small numerator and denominator."""
    bad = set(Fraction(a) for a in avoid)
    while True:
        v = Fraction(rng.randint(-hi, hi), rng.randint(lo, hi))
        if (nonzero and v == 0) or v in bad:
            continue
        return v
