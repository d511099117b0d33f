"""JSON model documents, and the bundled example models.

Document layout::

    {
      "format_version": 1,
      "kind": "scim",
      "nodes": [{"name": "D", "kind": "decision", "parents": [], "domain": [0, 1]}, ...],
      "exogenous": {"D": {"domain": [0], "dist": {"0": "1"}}, ...},
      "functions": {"X": [{"parents": {"D": 0}, "eps": 0, "value": 0}, ...], ...}
    }

Integers are JSON numbers, other rationals are ``"p/q"`` strings, and any
other string is a symbol.  Probabilities are always exact fraction strings.
A ``"cid"`` document carries only ``nodes`` (domains optional).
"""

from __future__ import annotations

import json
import re
from fractions import Fraction
from importlib import resources
from typing import Any

from .graph import Cid, NodeKind, validate
from .scim import FunctionTable, Scim, Value, validate_scim

FORMAT_VERSION = 1

FIXTURES = (
    "grade_a",
    "grade_b",
    "content_a",
    "content_b",
    "causality_a",
    "causality_b",
    "causality_ri_a",
    "causality_ri_b",
)

_RATIONAL = re.compile(r"^-?\d+(/\d+)?$")


class ModelFormatError(ValueError):
    """A document is malformed or describes an invalid model."""


def _fail(path: str, msg: str):
    raise ModelFormatError(f"{path}: {msg}" if path else msg)


def parse_value(raw: Any, path: str = "") -> Value:
    if isinstance(raw, bool) or raw is None:
        _fail(path, f"invalid value {raw!r}")
    if isinstance(raw, int):
        return raw
    if isinstance(raw, float):
        _fail(path, f"floating-point value {raw!r}; write rationals as \"p/q\" strings")
    if isinstance(raw, str):
        if _RATIONAL.match(raw):
            try:
                v = Fraction(raw)
            except ZeroDivisionError:
                _fail(path, f"zero denominator in {raw!r}")
            return int(v) if v.denominator == 1 else v
        if not raw:
            _fail(path, "empty symbol")
        return raw
    _fail(path, f"invalid value {raw!r}")


def dump_value(v: Value):
    if isinstance(v, Fraction):
        return int(v) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return v


def parse_probability(raw: Any, path: str) -> Fraction:
    if isinstance(raw, bool) or isinstance(raw, float):
        _fail(path, f"probabilities must be exact (\"p/q\"), got {raw!r}")
    if isinstance(raw, int):
        return Fraction(raw)
    if isinstance(raw, str):
        try:
            return Fraction(raw)
        except (ValueError, ZeroDivisionError):
            pass
    _fail(path, f"invalid probability {raw!r}")


def _expect(obj, typ, path):
    if not isinstance(obj, typ):
        name = {dict: "object", list: "array", str: "string"}.get(typ, typ.__name__)
        _fail(path, f"expected {name}")
    return obj


def parse_document(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"syntax error at line {e.lineno}, column {e.colno}: {e.msg}") from None
    return _expect(doc, dict, "document")


def model_from_document(doc: dict, check: bool = True) -> Cid | Scim:
    version = doc.get("format_version")
    if version != FORMAT_VERSION:
        _fail("format_version", f"unsupported version {version!r} (expected {FORMAT_VERSION})")
    kind = doc.get("kind")
    if kind not in ("cid", "scim"):
        _fail("kind", f"expected \"cid\" or \"scim\", got {kind!r}")
    nodes = _expect(doc.get("nodes"), list, "nodes")
    entries = []
    parents: dict[str, list[str]] = {}
    domains: dict[str, list[Value]] = {}
    for i, raw in enumerate(nodes):
        at = f"nodes[{i}]"
        _expect(raw, dict, at)
        name = raw.get("name")
        if not isinstance(name, str) or not name:
            _fail(f"{at}.name", "expected a nonempty string")
        try:
            nk = NodeKind(raw.get("kind"))
        except ValueError:
            _fail(f"{at}.kind", f"unknown node kind {raw.get('kind')!r}")
        entries.append((name, nk))
        ps = _expect(raw.get("parents", []), list, f"{at}.parents")
        for j, p in enumerate(ps):
            _expect(p, str, f"{at}.parents[{j}]")
        parents[name] = list(ps)
        if "domain" in raw:
            dom = _expect(raw["domain"], list, f"{at}.domain")
            domains[name] = [parse_value(v, f"{at}.domain[{j}]") for j, v in enumerate(dom)]
    cid = Cid(entries, parents)
    if check:
        problems = validate(cid)
        if problems:
            _fail("nodes", "invalid diagram: " + "; ".join(problems))
    if kind == "cid":
        return cid

    for name, _ in entries:
        if name not in domains:
            _fail(f"nodes[{[n for n, _ in entries].index(name)}].domain", "required in a scim document")
    exo_raw = _expect(doc.get("exogenous"), dict, "exogenous")
    exogenous: dict[str, dict[Value, Fraction]] = {}
    for v, spec in exo_raw.items():
        at = f"exogenous.{v}"
        if v not in cid:
            _fail(at, "unknown node")
        _expect(spec, dict, at)
        dist = _expect(spec.get("dist"), dict, f"{at}.dist")
        dom_raw = spec.get("domain")
        if dom_raw is None:
            dom = [parse_value(k, f"{at}.dist") for k in dist]
        else:
            dom = [parse_value(k, f"{at}.domain[{j}]") for j, k in enumerate(_expect(dom_raw, list, f"{at}.domain"))]
        by_text = {str(x): x for x in dom}
        if len(by_text) != len(dom):
            _fail(f"{at}.domain", "duplicate values")
        probs = {}
        for key, p in dist.items():
            if key not in by_text:
                _fail(f"{at}.dist", f"value {key!r} not in the exogenous domain")
            probs[by_text[key]] = parse_probability(p, f"{at}.dist.{key}")
        missing = [str(x) for x in dom if x not in probs]
        if missing:
            _fail(f"{at}.dist", f"no probability for {', '.join(missing)}")
        exogenous[v] = {x: probs[x] for x in dom}
    for name, _ in entries:
        if name not in exogenous:
            _fail("exogenous", f"missing entry for {name!r}")

    fn_raw = _expect(doc.get("functions", {}), dict, "functions")
    functions = {}
    for v, rows_raw in fn_raw.items():
        at = f"functions.{v}"
        if v not in cid:
            _fail(at, "unknown node")
        ps = cid.parents[v]
        rows = {}
        for j, row in enumerate(_expect(rows_raw, list, at)):
            rat = f"{at}[{j}]"
            _expect(row, dict, rat)
            assign = _expect(row.get("parents", {}), dict, f"{rat}.parents")
            extra = set(assign) - set(ps)
            if extra:
                _fail(f"{rat}.parents", f"{sorted(extra)} are not parents of {v!r}")
            if set(ps) - set(assign):
                _fail(f"{rat}.parents", f"missing values for {sorted(set(ps) - set(assign))}")
            if "eps" not in row or "value" not in row:
                _fail(rat, "each row needs \"eps\" and \"value\"")
            key = tuple(parse_value(assign[p], f"{rat}.parents.{p}") for p in ps)
            key += (parse_value(row["eps"], f"{rat}.eps"),)
            if key in rows:
                _fail(rat, "duplicate row")
            rows[key] = parse_value(row["value"], f"{rat}.value")
        functions[v] = FunctionTable(v, ps, rows)
    scim = Scim(cid, domains, exogenous, functions)
    if check:
        problems = validate_scim(scim)
        if problems:
            _fail("", "invalid model: " + "; ".join(problems))
    return scim


def load_model(text: str, check: bool = True) -> Cid | Scim:
    """Parse and validate a model document."""
    return model_from_document(parse_document(text), check)


def read_model(path, check: bool = True) -> Cid | Scim:
    with open(path, encoding="utf-8") as fh:
        return load_model(fh.read(), check)


def model_to_document(model: Cid | Scim) -> dict:
    if isinstance(model, Scim):
        cid, scim = model.cid, model
    else:
        cid, scim = model, None
    nodes = []
    for v in cid.order:
        entry: dict[str, Any] = {"name": v, "kind": cid.kinds[v].value, "parents": list(cid.parents[v])}
        if scim is not None:
            entry["domain"] = [dump_value(x) for x in scim.domains[v]]
        nodes.append(entry)
    doc: dict[str, Any] = {"format_version": FORMAT_VERSION, "kind": "cid" if scim is None else "scim", "nodes": nodes}
    if scim is None:
        return doc
    doc["exogenous"] = {
        v: {
            "domain": [dump_value(x) for x in scim.exogenous[v]],
            "dist": {str(x): str(p) for x, p in scim.exogenous[v].items()},
        }
        for v in cid.order
    }
    functions = {}
    for v in cid.order:
        if v not in scim.functions:
            continue
        ps = cid.parents[v]
        table = scim.functions[v]
        rows = []
        for key, out in table.rows.items():
            rows.append(
                {
                    "parents": {p: dump_value(x) for p, x in zip(ps, key[:-1])},
                    "eps": dump_value(key[-1]),
                    "value": dump_value(out),
                }
            )
        functions[v] = rows
    doc["functions"] = functions
    return doc


def dump_model(model: Cid | Scim) -> str:
    """Serialize deterministically; rows keep their table order."""
    return json.dumps(model_to_document(model), indent=2, ensure_ascii=False) + "\n"


def write_model(model: Cid | Scim, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_model(model))


def fixture_text(name: str) -> str:
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; available: {', '.join(FIXTURES)}")
    return resources.files("cid_incentives.fixtures").joinpath(f"{name}.json").read_text(encoding="utf-8")


def load_fixture(name: str) -> Cid | Scim:
    return load_model(fixture_text(name))


def as_cid(model: Cid | Scim) -> Cid:
    return model.cid if isinstance(model, Scim) else model
