"""JSON documents for structure tables and the custom-table loader."""

from __future__ import annotations

import json
import jsonschema

from .algebra import (
    Expression,
    Generator,
    Rule,
    StructureTable,
    TableError,
    parse_generator,
    render_expression,
    rule_id,
)
from .parser import ExprSyntaxError, parse
from .scalar import Scalar

TABLE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["N", "params", "order", "rules", "nilpotents"],
    "additionalProperties": False,
    "properties": {
        "N": {"type": "integer", "minimum": 1},
        "name": {"type": "string"},
        "params": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name"],
                "additionalProperties": False,
                "properties": {"name": {"type": "string", "pattern": "^[A-Za-z][A-Za-z0-9_]*$"}},
            },
        },
        "order": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "rules": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["left", "right", "swap", "remainder"],
                "additionalProperties": False,
                "properties": {
                    "left": {"type": "string"},
                    "right": {"type": "string"},
                    "swap": {"type": "string"},
                    "remainder": {"type": "string"},
                },
            },
        },
        "nilpotents": {"type": "array", "items": {"type": "string"}},
    },
}


class SchemaError(ValueError):
    """Document does not match the table schema; ``path`` locates the problem."""

    def __init__(self, message: str, path: str):
        super().__init__(f"schema violation at {path}: {message}")
        self.path = path


def _json_path(parts) -> str:
    out = "$"
    for p in parts:
        out += f"[{p}]" if isinstance(p, int) else f".{p}"
    return out


def table_to_dict(t: StructureTable) -> dict:
    rules = []
    for (g1, g2) in sorted(t.rules, key=lambda k: (t.rank[k[0]], t.rank[k[1]])):
        r = t.rules[(g1, g2)]
        rules.append(
            {
                "left": str(g1),
                "right": str(g2),
                "swap": str(r.swap),
                "remainder": render_expression(r.remainder),
            }
        )
    return {
        "N": t.N,
        "name": t.name,
        "params": [{"name": n} for n in t.params],
        "order": [str(g) for g in t.order],
        "rules": rules,
        "nilpotents": [str(g) for g in sorted(t.nilpotents, key=lambda g: t.rank[g])],
    }


def serialize(t: StructureTable) -> str:
    return json.dumps(table_to_dict(t), indent=2, sort_keys=False) + "\n"


def _generator(text: str, N: int, path: str) -> Generator:
    try:
        g = parse_generator(text)
    except ValueError as exc:
        raise SchemaError(str(exc), path) from None
    if not (1 <= g.a <= N and (g.kind != "E" or 1 <= g.b <= N)):
        raise SchemaError(f"index out of range in {text!r} for N={N}", path)
    return g


def _check_params(value, declared: set, path: str):
    names = set()
    if isinstance(value, Scalar):
        names = value.variables()
    elif isinstance(value, Expression):
        for c in value.terms.values():
            if isinstance(c, Scalar):
                names |= c.variables()
    extra = names - declared
    if extra:
        raise SchemaError(f"undeclared parameter(s) {sorted(extra)}", path)


def table_from_dict(doc: dict) -> StructureTable:
    """Validate a table document and build the table.

    Raises SchemaError for shape problems and TableError for
    incomplete rule coverage, zero swaps and non-canonical remainders.
    """
    validator = jsonschema.Draft202012Validator(TABLE_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise SchemaError(e.message, _json_path(e.absolute_path))
    N = doc["N"]
    declared = {p["name"] for p in doc["params"]}
    order = tuple(_generator(s, N, f"$.order[{i}]") for i, s in enumerate(doc["order"]))
    if len(set(order)) != len(order):
        raise SchemaError("duplicate generator in order", "$.order")
    rank = {g: i for i, g in enumerate(order)}
    nil = set()
    for i, s in enumerate(doc["nilpotents"]):
        g = _generator(s, N, f"$.nilpotents[{i}]")
        if g not in rank:
            raise SchemaError(f"{g} not in order", f"$.nilpotents[{i}]")
        if not g.is_fermion:
            raise TableError(f"nilpotent boson {g}")
        nil.add(g)
    rules = {}
    for i, r in enumerate(doc["rules"]):
        path = f"$.rules[{i}]"
        g1 = _generator(r["left"], N, path + ".left")
        g2 = _generator(r["right"], N, path + ".right")
        for g, key in ((g1, "left"), (g2, "right")):
            if g not in rank:
                raise SchemaError(f"{g} not in order", f"{path}.{key}")
        if rank[g1] <= rank[g2]:
            raise TableError(f"rule {g1}*{g2} is not oriented: {g1} must come after {g2}")
        if (g1, g2) in rules:
            raise TableError(f"duplicate rule {g1}*{g2}")
        try:
            swap_e = parse(r["swap"])
            rem = parse(r["remainder"], N)
        except (ExprSyntaxError, ValueError, ZeroDivisionError) as exc:
            raise SchemaError(str(exc), path) from None
        if any(w for w in swap_e.terms):
            raise SchemaError("swap must be a scalar", path + ".swap")
        swap = Scalar.coerce(swap_e.terms.get((), 0))
        if not swap:
            raise TableError(f"zero swap coefficient in rule {g1}*{g2}")
        _check_params(swap, declared, path + ".swap")
        _check_params(rem, declared, path + ".remainder")
        if rem.generators() - set(rank):
            raise SchemaError("remainder uses generators outside the order", path + ".remainder")
        rules[(g1, g2)] = Rule(swap, rem)
    missing = [
        (a, b)
        for a in order
        for b in order
        if rank[a] > rank[b] and (a, b) not in rules
    ]
    if missing:
        shown = ", ".join(f"({b}, {a})" for a, b in missing[:5])
        raise TableError(f"incomplete rule coverage: no rule for {shown}")
    t = StructureTable(
        N, order, rules, frozenset(nil), tuple(sorted(declared)), doc.get("name", "custom")
    )
    for key, rule in rules.items():
        if not t.is_canonical(rule.remainder):
            raise TableError(f"non-canonical remainder in rule {rule_id(key)}")
    return t


def load_custom_table(document: str | dict) -> StructureTable:
    """Load a table from JSON text (or an already-decoded document)."""
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise SchemaError(f"invalid JSON: {exc.msg}", f"byte {exc.pos}") from None
    return table_from_dict(document)
