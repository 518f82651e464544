"""Text grammar for enveloping-algebra expressions.

::

    expr    := ["+"|"-"] term (("+"|"-") term)*
    term    := power (("*" | "/" | <juxtaposition>) power)*
    power   := atom ["^" ["-"] INT]
    atom    := INT | generator | PARAM | "(" expr ")"
    generator := "E(" INT "," INT ")" | "V(" INT ")" | "Vb(" INT ")"

Division and powers are only allowed on scalar-valued operands.  Whitespace
is insignificant.  Errors carry the byte offset of the offending token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .algebra import Expression, Generator
from .scalar import Scalar


class ExprSyntaxError(ValueError):
    """Malformed or invalid expression text."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.message = message
        self.offset = offset


# --- AST --------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: Fraction


@dataclass(frozen=True)
class Param:
    name: str


@dataclass(frozen=True)
class Gen:
    generator: Generator


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Prod:
    """Ordered product; ``ops[i]`` is ``"*"`` or ``"/"`` before ``factors[i+1]``."""

    factors: tuple
    ops: tuple


@dataclass(frozen=True)
class Sum:
    terms: tuple  # ((sign, node), ...) with sign in {+1, -1}


ExprAst = Num | Param | Gen | Unit | Pow | Prod | Sum

GENERATOR_KINDS = ("Vb", "V", "E")

_TOKEN = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z][A-Za-z0-9_]*)|(?P<op>[-+*/^(),]))"
)


def _tokens(text: str):
    pos, out = 0, []
    while True:
        m = _TOKEN.match(text, pos)
        if not m:
            rest = text[pos:]
            if rest.strip():
                off = pos + len(rest) - len(rest.lstrip())
                raise ExprSyntaxError(f"unexpected character {text[off]!r}", _byte(text, off))
            break
        kind = m.lastgroup
        out.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


def _byte(text: str, char_offset: int) -> int:
    return len(text[:char_offset].encode("utf-8"))


class _Parser:
    def __init__(self, text: str, N: int | None):
        self.text = text
        self.N = N
        self.toks = _tokens(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def error(self, msg: str, tok=None):
        tok = tok or self.peek()
        return ExprSyntaxError(msg, _byte(self.text, tok[2]))

    def take(self, value: str | None = None, kind: str | None = None):
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = repr(value) if value is not None else kind
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise self.error(f"expected {want}, got {got}", tok)
        self.i += 1
        return tok

    def expr(self):
        terms = []
        sign = 1
        if self.peek()[1] in "+-" and self.peek()[0] == "op":
            sign = -1 if self.take()[1] == "-" else 1
        terms.append((sign, self.term()))
        while self.peek()[0] == "op" and self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
            terms.append((sign, self.term()))
        if len(terms) == 1 and terms[0][0] == 1:
            return terms[0][1]
        return Sum(tuple(terms))

    def _starts_atom(self, tok) -> bool:
        return tok[0] in ("int", "name") or tok[1] == "("

    def term(self):
        factors, ops = [self.power()], []
        while True:
            tok = self.peek()
            if tok[0] == "op" and tok[1] in ("*", "/"):
                self.take()
                ops.append(tok[1])
                start = self.peek()
                node = self.power()
                if tok[1] == "/" and _has_generator(node):
                    raise self.error("division by a non-scalar", start)
                factors.append(node)
            elif self._starts_atom(tok):
                ops.append("*")
                factors.append(self.power())
            else:
                break
        if len(factors) == 1:
            return factors[0]
        return Prod(tuple(factors), tuple(ops))

    def power(self):
        start = self.peek()
        node = self.atom()
        if self.peek()[1] == "^":
            self.take()
            neg = False
            if self.peek()[1] == "-":
                self.take()
                neg = True
            k = int(self.take(kind="int")[1])
            if _has_generator(node):
                raise self.error("powers are only defined for scalars", start)
            node = Pow(node, -k if neg else k)
        return node

    def atom(self):
        tok = self.peek()
        if tok[0] == "int":
            self.take()
            return Num(Fraction(int(tok[1])))
        if tok[1] == "(":
            self.take()
            node = self.expr()
            self.take(")")
            return node
        if tok[0] == "name":
            self.take()
            if self.peek()[1] == "(":
                return self.generator(tok)
            return Param(tok[1])
        got = "end of input" if tok[0] == "end" else repr(tok[1])
        raise self.error(f"unexpected {got}", tok)

    def generator(self, name_tok):
        kind = name_tok[1]
        if kind not in GENERATOR_KINDS:
            raise self.error(f"unknown generator {kind!r}", name_tok)
        self.take("(")
        idx = [self.take(kind="int")]
        if kind == "E":
            self.take(",")
            idx.append(self.take(kind="int"))
        self.take(")")
        for t in idx:
            v = int(t[1])
            if v < 1 or (self.N is not None and v > self.N):
                bound = f"1..{self.N}" if self.N is not None else ">= 1"
                raise self.error(f"index out of range: {v} not in {bound}", t)
        a = int(idx[0][1])
        b = int(idx[1][1]) if kind == "E" else 0
        return Gen(Generator(kind, a, b))


def _has_generator(node) -> bool:
    if isinstance(node, Gen):
        return True
    if isinstance(node, Pow):
        return _has_generator(node.base)
    if isinstance(node, Prod):
        return any(_has_generator(f) for f in node.factors)
    if isinstance(node, Sum):
        return any(_has_generator(n) for _, n in node.terms)
    return False


def parse_expression(text: str, N: int | None = None) -> ExprAst:
    """Parse ``text``; generator indices are checked against ``N`` if given."""
    p = _Parser(text, N)
    if p.peek()[0] == "end":
        raise p.error("empty expression")
    node = p.expr()
    if p.peek()[0] != "end":
        raise p.error(f"unexpected {p.peek()[1]!r}")
    return node


# --- evaluation and rendering ------------------------------------------------


def to_expression(node) -> Expression:
    """Evaluate an AST to an Expression with Scalar coefficients."""
    if isinstance(node, Num):
        return Expression.unit(Scalar(node.value))
    if isinstance(node, Unit):
        return Expression.unit(Scalar(1))
    if isinstance(node, Param):
        return Expression.unit(Scalar.param(node.name))
    if isinstance(node, Gen):
        return Expression.word(node.generator, coeff=Scalar(1))
    if isinstance(node, Pow):
        base = _scalar_value(node.base)
        if not base and node.exponent < 0:
            raise ZeroDivisionError("negative power of zero in expression")
        return Expression.unit(base ** node.exponent)
    if isinstance(node, Prod):
        out = to_expression(node.factors[0])
        for op, f in zip(node.ops, node.factors[1:]):
            if op == "/":
                d = _scalar_value(f)
                if not d:
                    raise ZeroDivisionError("division by zero in expression")
                out = out.scale(d.inverse())
            else:
                out = out * to_expression(f)
        return out
    if isinstance(node, Sum):
        out = Expression()
        for sign, n in node.terms:
            e = to_expression(n)
            out = out + e if sign > 0 else out - e
        return out
    raise TypeError(f"not an expression node: {node!r}")


def _scalar_value(node) -> Scalar:
    e = to_expression(node)
    if any(w for w in e.terms):
        raise ValueError("expected a scalar")
    return Scalar.coerce(e.terms.get((), 0))


def _prec(node) -> int:
    if isinstance(node, Sum):
        return 0
    if isinstance(node, Prod):
        return 1
    if isinstance(node, Pow):
        return 2
    return 3


def render(node) -> str:
    """Text form of an AST; ``parse_expression(render(a)) == a``."""
    if isinstance(node, Num):
        v = node.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(node, Unit):
        return "1"
    if isinstance(node, Param):
        return node.name
    if isinstance(node, Gen):
        return str(node.generator)
    if isinstance(node, Pow):
        base = render(node.base)
        if _prec(node.base) < 3 or (isinstance(node.base, Num) and node.base.value.denominator != 1):
            base = f"({base})"
        return f"{base}^{node.exponent}"
    if isinstance(node, Prod):
        parts = []
        for i, f in enumerate(node.factors):
            s = render(f)
            # a fraction literal or a nested product would re-associate
            if _prec(f) <= 1 or (isinstance(f, Num) and f.value.denominator != 1 and i > 0):
                s = f"({s})"
            if i:
                parts.append(node.ops[i - 1])
            parts.append(s)
        return "".join(parts)
    if isinstance(node, Sum):
        out = []
        for i, (sign, n) in enumerate(node.terms):
            s = render(n)
            if isinstance(n, Sum):
                s = f"({s})"
            if i == 0:
                out.append("-" + s if sign < 0 else s)
            else:
                out.append((" - " if sign < 0 else " + ") + s)
        text = "".join(out)
        return text if not (len(node.terms) == 1 and node.terms[0][0] > 0) else f"+{text}"
    raise TypeError(f"not an expression node: {node!r}")


def parse(text: str, N: int | None = None) -> Expression:
    """Parse straight to an Expression."""
    return to_expression(parse_expression(text, N))
