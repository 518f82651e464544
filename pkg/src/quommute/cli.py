"""Command-line front end.

Every verb prints a report with a deterministic ``report`` body and a
separate ``meta`` block.  Exit status: 0 all checks pass, 1 some check
failed, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .algebra import (
    StructureTable,
    TableError,
    build_classical,
    build_osp22_q,
    build_spl21,
    build_spl_n1,
    effective_parameter_rank,
    in_q,
    render_expression,
    render_word,
)
from .normal_order import NonTerminationError, check_overlaps, normalize
from .parser import ExprSyntaxError, parse
from .qes import (
    certify_qes,
    characteristic_polynomial,
    enveloping_monomials,
    random_qes_operator,
    span_dimension,
)
from .representation import (
    OSP12,
    build_osp12_rep,
    build_osp22_rep,
    casimir_value,
    invariance_check,
    verify_relations,
)
from .scalar import param_name, parse_rational
from .table_io import SchemaError, load_custom_table

PASS, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    """Invalid configuration; exits with status 2."""


# --- configuration ----------------------------------------------------------


def _params(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep or not name.strip():
            raise UsageError(f"--param expects name=a/b, got {item!r}")
        try:
            out[name.strip()] = parse_rational(value)
        except ValueError as exc:
            raise UsageError(f"--param {name}: {exc}") from None
    return out


def _rational(text: str, flag: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise UsageError(f"{flag}: {exc}") from None


def _allowed_params(algebra: str, N: int) -> list[str]:
    if algebra == "spl":
        return [param_name(a, b) for a in range(1, N + 1) for b in range(a + 1, N + 1)]
    if algebra == "spl21":
        return ["p", "r", "s"]
    if algebra == "osp22":
        return ["p", "q"]
    return []


def _sqrt_rational(x: Fraction) -> Fraction | None:
    from math import isqrt

    if x <= 0:
        return None
    a, b = isqrt(x.numerator), isqrt(x.denominator)
    return Fraction(a, b) if a * a == x.numerator and b * b == x.denominator else None


def build_table(args, *, require_all: bool = False) -> StructureTable:
    """Structure table selected by ``--algebra`` and its options."""
    algebra = args.algebra
    if algebra == "osp12":
        raise UsageError(
            "osp12 has no structure table: its defining relations are not available; "
            "use verify-rep --algebra osp12"
        )
    if algebra == "custom":
        if not args.table:
            raise UsageError("--algebra custom needs --table PATH")
        if args.param:
            raise UsageError("--param is not used with a custom table")
        try:
            with open(args.table, encoding="utf-8") as fh:
                return load_custom_table(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read table: {exc}") from None
    N = args.N if args.N is not None else 2
    if algebra in ("spl21", "osp22") and N != 2:
        raise UsageError(f"{algebra} is defined for N=2 only")
    if N < 2:
        raise UsageError("N must be >= 2")
    values = _params(args.param)
    if getattr(args, "symbolic", False) and values:
        raise UsageError("--symbolic and --param are mutually exclusive")
    allowed = _allowed_params(algebra, N)
    unknown = sorted(set(values) - set(allowed))
    if unknown:
        raise UsageError(f"unknown parameter(s) {unknown} for {algebra}; expected {allowed}")
    for k, v in values.items():
        if v == 0:
            raise UsageError(f"parameter {k} must be nonzero")
    if algebra == "osp22" and "p" in values and "q" in values:
        raise UsageError("give either p or q for osp22, not both")
    if require_all and not getattr(args, "symbolic", False):
        needed = ["p"] if algebra == "osp22" else allowed
        have = set(values) | ({"p"} if "q" in values else set())
        missing = [n for n in needed if n not in have]
        if missing:
            raise UsageError(f"missing --param for {missing}; or pass --symbolic")
    if algebra == "spl":
        q = {}
        for a in range(1, N + 1):
            for b in range(a + 1, N + 1):
                if param_name(a, b) in values:
                    q[(a, b)] = values[param_name(a, b)]
        return build_spl_n1(N, q)
    if algebra == "spl21":
        return build_spl21(values.get("p"), values.get("r"), values.get("s"))
    if algebra == "osp22":
        if "q" in values:
            p = _sqrt_rational(values["q"])
            if p is None:
                raise UsageError("osp22 --param q must be the square of a positive rational; use p")
            values["p"] = p
        return build_osp22_q(values.get("p"))
    raise UsageError(f"unknown algebra {algebra!r}")


# --- verbs ------------------------------------------------------------------


def cmd_consistency(args):
    t = build_table(args, require_all=True)
    rep = check_overlaps(t, workers=args.workers)
    return rep.to_dict(), rep.passed


def cmd_verify_rep(args):
    q = _rational(args.q, "--q")
    if q == 0:
        raise UsageError("--q must be nonzero")
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if args.algebra == "osp22":
        rep = build_osp22_rep(args.n, q, convention=args.convention)
        table = build_classical(2) if q == 1 else in_q(build_osp22_q()).specialize({"q": q})
        rel = verify_relations(rep, table)
        inv = invariance_check(rep)
        body = rel.to_dict()
        body.update(
            {
                "q": str(q),
                "dimension": rep.space.dim,
                "notes": list(rep.notes),
                "invariance_violations": [list(v) for v in inv.violations],
            }
        )
        body["failures"] += [{"invariance": list(v)} for v in inv.violations]
        passed = rel.passed and inv.passed
    else:
        rep = build_osp12_rep(args.n, q)
        inv = invariance_check(rep)
        checks = {}
        for name in ("-", "+"):
            v, j = OSP12["V" + name], OSP12["J" + name]
            checks[f"J{name} = (1+q) V{name}^2"] = rep.ambient(j) == (rep.ambient(v) @ rep.ambient(v)).scale(1 + q)
        body = {
            "representation": rep.name,
            "q": str(q),
            "dimension": rep.space.dim,
            "checks": checks,
            "invariance_violations": [list(v) for v in inv.violations],
            "failures": [k for k, ok in checks.items() if not ok]
            + [{"invariance": list(v)} for v in inv.violations],
        }
        passed = not body["failures"]
    body["passed"] = passed
    return body, passed


def cmd_normal_order(args):
    t = build_table(args)
    try:
        e = parse(args.expression, t.N)
    except ExprSyntaxError as exc:
        raise UsageError(str(exc)) from None
    missing = e.generators() - set(t.order)
    if missing:
        raise UsageError(f"generators not in the algebra: {sorted(map(str, missing))}")
    nf, trace = normalize(e, t)
    body = {
        "algebra": t.name,
        "input": args.expression,
        "normal_form": render_expression(nf),
        "rewrite_steps": len(trace),
        "failures": [],
    }
    if args.trace:
        body["trace"] = [
            {"position": s.position, "rule": render_word(s.rule), "before": render_word(s.before)}
            for s in trace
        ]
    return body, True


def cmd_casimir(args):
    if args.n < 0:
        raise UsageError("--n must be >= 0")
    if args.q is None:
        c = casimir_value(args.n)
        return {"n": args.n, "q": "symbolic", "value": str(c), "failures": []}, True
    q = _rational(args.q, "--q")
    if q == 0:
        raise UsageError("--q must be nonzero")
    c = casimir_value(args.n, q)
    return {"n": args.n, "q": str(q), "value": str(c), "failures": []}, True


def cmd_rank(args):
    if args.N < 2:
        raise UsageError("--N must be >= 2")
    r = effective_parameter_rank(args.N)
    expected = (args.N - 1) * (args.N - 2) // 2
    passed = r == expected
    failures = [] if passed else [f"rank {r} differs from (N-1)(N-2)/2 = {expected}"]
    return {"N": args.N, "rank": r, "expected": expected, "failures": failures, "passed": passed}, passed


def cmd_qes_enumerate(args):
    q = _rational(args.q, "--q")
    if q == 0:
        raise UsageError("--q must be nonzero")
    if args.n < 1 or args.degree < 1:
        raise UsageError("--n and --degree must be >= 1")
    rep = build_osp22_rep(args.n, q)
    ops = enveloping_monomials(rep, args.degree)
    failures = [render_expression(o.word_expression) for o in ops if not certify_qes(o)]
    body = {
        "representation": rep.name,
        "q": str(q),
        "degree": args.degree,
        "monomials": len(ops),
        "span_dimension": span_dimension(ops),
        "failures": failures,
    }
    if args.seed is not None:
        op = random_qes_operator(rep, args.degree, args.seed)
        body["random_operator"] = {
            "seed": args.seed,
            "certified": certify_qes(op),
            "characteristic_polynomial": [str(c) for c in characteristic_polynomial(op)],
        }
        if not certify_qes(op):
            failures.append(f"random operator (seed {args.seed})")
    body["passed"] = not failures
    return body, not failures


# --- output -----------------------------------------------------------------


def _text(value, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(value, dict):
        for k, v in value.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_scalar_text(v)}")
    elif isinstance(value, list):
        for v in value:
            if isinstance(v, (dict, list)) and v:
                sub = _text(v, indent + 1)
                lines.append(f"{pad}- " + sub[0].lstrip())
                lines.extend(sub[1:])
            else:
                lines.append(f"{pad}- {_scalar_text(v)}")
    else:
        lines.append(pad + _scalar_text(value))
    return lines


def _scalar_text(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, dict)):
        return "[]" if isinstance(v, list) else "{}"
    return str(v)


def emit(body: dict, meta: dict, fmt: str, out) -> None:
    if fmt == "json":
        out.write(json.dumps({"report": body, "meta": meta}, indent=2) + "\n")
    else:
        out.write("\n".join(_text(body)) + "\n")
        out.write("# " + " ".join(f"{k}={v}" for k, v in meta.items()) + "\n")


# --- argument parsing -------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default=argparse.SUPPRESS)

    algebra_opts = argparse.ArgumentParser(add_help=False)
    algebra_opts.add_argument("--algebra", choices=("spl", "spl21", "osp22", "osp12", "custom"), required=True)
    algebra_opts.add_argument("--N", type=int, default=None)
    algebra_opts.add_argument("--param", action="append", metavar="NAME=A/B")
    algebra_opts.add_argument("--table", metavar="PATH")

    ap = argparse.ArgumentParser(prog="quommute", description=__doc__.splitlines()[0])
    ap.add_argument("--format", choices=("json", "text"), default="text")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("consistency", parents=[common, algebra_opts], help="overlap check of a structure table")
    p.add_argument("--symbolic", action="store_true", help="keep every parameter symbolic")
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(func=cmd_consistency)

    p = sub.add_parser("verify-rep", parents=[common], help="check a representation against its relations")
    p.add_argument("--algebra", choices=("osp22", "osp12"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--convention", choices=("table", "quoted"), default="table")
    p.set_defaults(func=cmd_verify_rep)

    p = sub.add_parser("normal-order", parents=[common, algebra_opts], help="normal-order an expression")
    p.add_argument("expression")
    p.add_argument("--trace", action="store_true")
    p.set_defaults(func=cmd_normal_order)

    p = sub.add_parser("casimir", parents=[common], help="osp(1,2)_q Casimir value")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", default=None)
    p.set_defaults(func=cmd_casimir)

    p = sub.add_parser("rank", parents=[common], help="effective parameter count of gl(N)_q")
    p.add_argument("--N", type=int, required=True)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("qes-enumerate", parents=[common], help="certify enveloping monomials as QES operators")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_qes_enumerate)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else PASS
    fmt = args.format
    start = time.perf_counter()
    try:
        body, passed = args.func(args)
    except (UsageError, SchemaError, TableError, NonTerminationError, ValueError, ArithmeticError) as exc:
        kind = type(exc).__name__
        body = {"error": str(exc), "kind": kind, "failures": [str(exc)]}
        status = FAIL if isinstance(exc, NonTerminationError) else USAGE
        emit(body, {"verb": args.verb, "exit": status}, fmt, out)
        return status
    status = PASS if passed else FAIL
    meta = {
        "verb": args.verb,
        "version": __version__,
        "exit": status,
        "seconds": round(time.perf_counter() - start, 3),
    }
    emit(body, meta, fmt, out)
    return status


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
