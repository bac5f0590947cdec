"""JSON relation specs.

A relation node is one of

    {"finite": {"carrier": [...], "pairs": [[a, b], ...]}}
    {"catalog": {"name": NAME, "params": {...}}}
    {"op": OP, "arg": NODE, ...}   or   {"op": OP, "args": [NODE, NODE]}

with OP in transitive-closure, reflexive-closure, reflexive-transitive-closure,
po-repair, strictify (optional "max_subset"), product, coproduct, complete
(the interpolation engine's output; optional "attend_empty") and extend
("u": [...] a finite closed set, or "family": [[...], ...]; optional
"max_subset").

A document is either a relation node, or an object with "relation": NODE
plus command-specific keys, or a code document
{"code": CODE, "from": NODE, "to": NODE} where CODE is
{"pairs": [[m, n], ...]}, {"identity": true}, {"graph": {"x": "f(x)", ...}}
or {"compose": [CODE, CODE], "via": NODE} (the middle relation defaults to
"from").

Errors raise SpecError carrying a JSON path to the offending node.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .closures import po_repair, reflexive_closure, reflexive_transitive_closure, strictify, transitive_closure
from .constructions import ExtensionSpec, FiniteSet, coproduct, extend_with_closed_family, product
from .engine import complete
from .morphisms import FunctionCode, compose, finite_code, graph_code, identity_code
from .relations import CatalogError, FiniteRelation, FiniteSource, RelationSource, catalog


class SpecError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message


def _obj(node, path) -> dict:
    if not isinstance(node, dict):
        raise SpecError(path, f"expected an object, got {type(node).__name__}")
    return node


def _int(v, path) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < 0:
        raise SpecError(path, f"expected a natural number, got {v!r}")
    return v


def _pairs(raw, path) -> list[tuple[int, int]]:
    if not isinstance(raw, list):
        raise SpecError(path, "expected a list of [a, b] pairs")
    out = []
    for i, p in enumerate(raw):
        if not (isinstance(p, list) and len(p) == 2):
            raise SpecError(f"{path}[{i}]", f"expected [a, b], got {p!r}")
        out.append((_int(p[0], f"{path}[{i}][0]"), _int(p[1], f"{path}[{i}][1]")))
    return out


def _nats(raw, path) -> list[int]:
    if not isinstance(raw, list):
        raise SpecError(path, "expected a list of naturals")
    return [_int(v, f"{path}[{i}]") for i, v in enumerate(raw)]


_UNARY = {
    "transitive-closure": transitive_closure,
    "reflexive-closure": reflexive_closure,
    "reflexive-transitive-closure": reflexive_transitive_closure,
    "po-repair": po_repair,
}
_BINARY = {"product": product, "coproduct": coproduct}


def build_relation(node: Any, path: str = "$") -> RelationSource:
    node = _obj(node, path)
    keys = set(node) & {"finite", "catalog", "op"}
    if len(keys) != 1:
        raise SpecError(path, "a relation node needs exactly one of 'finite', 'catalog', 'op'")
    if "finite" in node:
        body = _obj(node["finite"], f"{path}.finite")
        carrier = _nats(body.get("carrier", []), f"{path}.finite.carrier")
        pairs = _pairs(body.get("pairs", []), f"{path}.finite.pairs")
        return FiniteSource(FiniteRelation(carrier, pairs), body.get("label"))
    if "catalog" in node:
        body = _obj(node["catalog"], f"{path}.catalog")
        name = body.get("name")
        if not isinstance(name, str):
            raise SpecError(f"{path}.catalog.name", "expected a catalog name")
        params = _obj(body.get("params", {}), f"{path}.catalog.params")
        try:
            return catalog(name, params)
        except CatalogError as e:
            raise SpecError(f"{path}.catalog.name", str(e.args[0] if e.args else e)) from None
        except (TypeError, ValueError) as e:
            raise SpecError(f"{path}.catalog.params", str(e)) from None
    op = node["op"]
    if op in _UNARY or op in ("strictify", "complete", "extend"):
        if "arg" not in node:
            raise SpecError(path, f"op {op!r} needs 'arg'")
        inner = build_relation(node["arg"], f"{path}.arg")
        if op in _UNARY:
            return _UNARY[op](inner)
        if op == "strictify":
            ms = node.get("max_subset")
            return strictify(inner, None if ms is None else _int(ms, f"{path}.max_subset"))
        if op == "complete":
            return complete(inner, bool(node.get("attend_empty", True))).x_relation
        return build_extension(node, inner, path)[-1]
    if op in _BINARY:
        args = node.get("args")
        if not (isinstance(args, list) and len(args) == 2):
            raise SpecError(f"{path}.args", f"op {op!r} needs two arguments")
        return _BINARY[op](build_relation(args[0], f"{path}.args[0]"),
                           build_relation(args[1], f"{path}.args[1]"))
    raise SpecError(f"{path}.op", f"unknown op {op!r}")


def build_extension(node: dict, base: RelationSource, path: str) -> list[RelationSource]:
    sets = []
    if "u" in node:
        sets.append(FiniteSet(_nats(node["u"], f"{path}.u")))
    for i, u in enumerate(node.get("family", [])):
        sets.append(FiniteSet(_nats(u, f"{path}.family[{i}]")))
    if not sets:
        raise SpecError(path, "op 'extend' needs 'u' or 'family'")
    ms = node.get("max_subset")
    spec = ExtensionSpec(base, sets[0], sets[1:], None if ms is None else _int(ms, f"{path}.max_subset"))
    return extend_with_closed_family(spec)


def build_code(node: Any, source: RelationSource, target: RelationSource, path: str) -> FunctionCode:
    node = _obj(node, path)
    if "pairs" in node:
        return finite_code(_pairs(node["pairs"], f"{path}.pairs"), source, target)
    if node.get("identity"):
        return identity_code(source)
    if "graph" in node:
        table = _obj(node["graph"], f"{path}.graph")
        try:
            f = {int(k): _int(v, f"{path}.graph.{k}") for k, v in table.items()}
        except ValueError:
            raise SpecError(f"{path}.graph", "keys must be naturals") from None
        return graph_code(f, source, target, sample=sorted(f), check=False)
    if "compose" in node:
        parts = node["compose"]
        if not (isinstance(parts, list) and len(parts) == 2):
            raise SpecError(f"{path}.compose", "expected [first, second]")
        mid = build_relation(node["via"], f"{path}.via") if "via" in node else source
        first = build_code(parts[0], source, mid, f"{path}.compose[0]")
        second = build_code(parts[1], mid, target, f"{path}.compose[1]")
        return compose(first, second)
    raise SpecError(path, "a code node needs 'pairs', 'identity', 'graph' or 'compose'")


@dataclass
class Document:
    raw: dict
    relation: RelationSource | None
    code: FunctionCode | None = None
    relation_node: dict | None = None

    def get(self, key, default=None):
        return self.raw.get(key, default)


def parse_document(raw: Any) -> Document:
    raw = _obj(raw, "$")
    if "code" in raw:
        for key in ("from", "to"):
            if key not in raw:
                raise SpecError("$", f"a code document needs '{key}'")
        src = build_relation(raw["from"], "$.from")
        tgt = build_relation(raw["to"], "$.to")
        return Document(raw, src, build_code(raw["code"], src, tgt, "$.code"))
    if "relation" in raw:
        return Document(raw, build_relation(raw["relation"], "$.relation"), None, raw["relation"])
    return Document(raw, build_relation(raw, "$"), None, raw)


def load(path: str | Path) -> Document:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise SpecError("$", f"cannot read {path}: {e.strerror}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError("$", f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}") from None
    return parse_document(raw)
