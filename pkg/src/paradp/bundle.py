"""JSON problem bundles: schema, loading, and result serialization.

A bundle names its posets, DPs, cells and reparametrizations, fixes one monad
kind, optionally carries a wiring diagram, and lists query requests.  Schema
violations and unresolved references are reported as :class:`BundleError`
with a JSON pointer into the offending document.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Mapping

import jsonschema

from . import dp as _dp
from . import poset as _poset
from .diagram import Bindings, eval_text
from .dp import DesignProblem
from .errors import ParadpError
from .formula import Formula
from .monad import MonadKind, UncertainValue, as_kind, monad
from .para import ParamCell, Repar, discrete_factor, include, param_space
from .poset import Antichain, Factor, FinPoset

FLOAT_DIGITS = 12


class BundleError(ParadpError):
    """A malformed or inconsistent bundle; ``pointer`` locates the problem."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer or "/"
        self.reason = message


# --- schema -------------------------------------------------------------------

_LABEL = {"type": ["string", "number", "boolean"]}
_NAME = {"type": "string", "pattern": "^[A-Za-z_][A-Za-z0-9_]*$"}

_AXIS = {
    "type": "object",
    "required": ["name", "values"],
    "properties": {
        "name": {"type": "string"},
        "values": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "direction": {"enum": ["asc", "desc"]},
    },
    "additionalProperties": False,
}

_POSET = {
    "oneOf": [
        {"type": "string"},
        {"type": "object", "required": ["chain"], "additionalProperties": False,
         "properties": {"chain": {"type": "array", "items": _LABEL, "minItems": 1}}},
        {"type": "object", "required": ["grid"], "additionalProperties": False,
         "properties": {"grid": {"type": "array", "items": _AXIS, "minItems": 1}}},
        {"type": "object", "required": ["product"], "additionalProperties": False,
         "properties": {"product": {"type": "array", "items": {"$ref": "#/$defs/poset"}}}},
        {"type": "object", "required": ["op"], "additionalProperties": False,
         "properties": {"op": {"$ref": "#/$defs/poset"}}},
        {"type": "object", "required": ["explicit"], "additionalProperties": False,
         "properties": {"explicit": {
             "type": "object", "required": ["elements"], "additionalProperties": False,
             "properties": {
                 "elements": {"type": "array", "items": _LABEL, "minItems": 1},
                 "leq_pairs": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}},
                 "name": {"type": "string"},
             }}}},
    ],
}

_IFACE = {"fun": {"$ref": "#/$defs/poset"}, "res": {"$ref": "#/$defs/poset"},
          "fun_grid": {"$ref": "#/$defs/poset"}, "res_grid": {"$ref": "#/$defs/poset"}}


def _dp_variant(tag: str, extra: dict, required: list[str]) -> dict:
    return {"type": "object", "required": [tag], "additionalProperties": False,
            "properties": {tag: {"type": "object", "required": required,
                                 "properties": {**_IFACE, **extra}, "additionalProperties": False}}}


_DP = {
    "oneOf": [
        _dp_variant("matrix", {"rows": {"type": "array", "items": {"type": "array"}}}, ["rows"]),
        _dp_variant("threshold", {"formula": {"type": "string"}}, ["formula"]),
        _dp_variant("relation", {"formula": {"type": "string"}}, ["formula"]),
        _dp_variant("identity", {}, []),
    ],
}

_FACTOR = {
    "oneOf": [
        {"type": "object", "required": ["name", "labels"], "additionalProperties": False,
         "properties": {"name": _NAME, "labels": {"type": "array", "items": _LABEL, "minItems": 1}}},
        _AXIS,
    ],
}

# an uncertain payload: bare carrier, or one of the tagged forms
_PAYLOAD = {
    "anyOf": [
        {"type": ["string", "array", "number", "boolean"]},
        {"type": "object", "required": ["set"], "properties": {"set": {"type": "array", "minItems": 1}}},
        {"type": "object", "required": ["interval"],
         "properties": {"interval": {"type": "array", "minItems": 2, "maxItems": 2}}},
        {"type": "object", "required": ["atoms"],
         "properties": {"atoms": {"type": "array", "minItems": 1,
                                  "items": {"type": "array", "minItems": 2, "maxItems": 2,
                                            "prefixItems": [{}, {"type": "number", "minimum": 0}]}}}},
        {"type": "object", "required": ["point"]},
        {"type": "object", "required": ["matrix"]},
        {"type": "object", "required": ["threshold"]},
        {"type": "object", "required": ["relation"]},
        {"type": "object", "required": ["identity"]},
    ],
}

_TABLE = {
    "oneOf": [
        {"type": "object", "additionalProperties": _PAYLOAD},
        {"type": "array", "items": {"type": "object", "required": ["point", "value"],
                                    "properties": {"point": {}, "value": _PAYLOAD}}},
    ],
}

_FORMULA_PAYLOAD = {
    "anyOf": [
        {"type": "string"},
        {"type": "object", "required": ["set"], "properties": {"set": {"type": "array", "items": {"type": "string"}}}},
        {"type": "object", "required": ["interval"], "properties": {
            "interval": {"type": "array", "items": {"type": "string"}, "minItems": 2, "maxItems": 2}}},
        {"type": "object", "required": ["atoms"], "properties": {
            "atoms": {"type": "array", "items": {"type": "array", "minItems": 2, "maxItems": 2}}}},
    ],
}

_CELL = {
    "oneOf": [
        {"type": "object", "required": ["dp"], "additionalProperties": False, "properties": {"dp": {}}},
        {"type": "object", "required": ["param", "fun", "res", "table"], "additionalProperties": False,
         "properties": {"param": {"type": "array", "items": _FACTOR}, "fun": {"$ref": "#/$defs/poset"},
                        "res": {"$ref": "#/$defs/poset"}, "table": _TABLE, "monad": {"type": "string"}}},
        {"type": "object", "required": ["threshold_family"], "additionalProperties": False,
         "properties": {"threshold_family": {
             "type": "object", "required": ["param", "fun", "res", "formula"], "additionalProperties": False,
             "properties": {"param": {"type": "array", "items": _FACTOR},
                            "fun": {"$ref": "#/$defs/poset"}, "res": {"$ref": "#/$defs/poset"},
                            "type": {"enum": ["threshold", "relation"]},
                            "constants": {"type": "object", "additionalProperties": {"type": "number"}},
                            "formula": _FORMULA_PAYLOAD}}}},
    ],
}

_REPAR = {
    "type": "object", "required": ["dom", "cod", "table"], "additionalProperties": False,
    "properties": {"dom": {"type": "array", "items": _FACTOR}, "cod": {"type": "array", "items": _FACTOR},
                   "table": _TABLE},
}

_OBS = {
    "type": "object", "required": ["f", "r"], "additionalProperties": False,
    "properties": {"x": {"type": "object"}, "f": {}, "r": {}, "feasible": {"type": "boolean"}},
}

_QUERY = {
    "type": "object", "required": ["type"],
    "oneOf": [
        {"properties": {"type": {"const": "query"}, "cell": {"type": "string"}, "f": {},
                        "points": {"type": "array"}},
         "required": ["f"], "additionalProperties": False},
        {"properties": {"type": {"const": "decide"}, "cell": {"type": "string"}, "f": {},
                        "utility": {"enum": ["expected", "worst_case", "best_case"]}},
         "required": ["f"], "additionalProperties": False},
        {"properties": {"type": {"const": "infer"}, "cell": {"type": "string"},
                        "factor": {"type": "string"},
                        "prior": {"oneOf": [{"const": "uniform"}, {"type": "object", "required": ["atoms"]}]},
                        "observations": {"type": "array", "items": _OBS}},
         "required": ["factor", "observations"], "additionalProperties": False},
        {"properties": {"type": {"const": "fit"}, "formula": {"type": "string"},
                        "names": {"type": "array", "items": {"type": "string"}},
                        "fun": {"$ref": "#/$defs/poset"}, "theta": {"type": "string"},
                        "thetas": {"type": "array", "items": {"type": "number"}, "minItems": 1},
                        "mode": {"enum": ["least_squares", "constrained"]},
                        "metric": {"type": "string"},
                        "data": {"type": "array", "minItems": 1, "items": {
                            "type": "object", "required": ["f", "r"], "additionalProperties": False,
                            "properties": {"f": {}, "r": {"type": "number"}}}}},
         "required": ["formula", "thetas", "data"], "additionalProperties": False},
    ],
}

BUNDLE_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "paradp problem bundle",
    "type": "object",
    "required": ["monad"],
    "additionalProperties": False,
    "$defs": {"poset": _POSET},
    "properties": {
        "monad": {"enum": [k.value for k in MonadKind]},
        "description": {"type": "string"},
        "seed": {"type": "integer"},
        "posets": {"type": "object", "additionalProperties": {"$ref": "#/$defs/poset"}},
        "dps": {"type": "object", "additionalProperties": _DP},
        "cells": {"type": "object", "additionalProperties": _CELL},
        "repars": {"type": "object", "additionalProperties": _REPAR},
        "diagram": {"type": "string"},
        "queries": {"type": "array", "items": _QUERY},
    },
}

# results: what the CLI prints in JSON mode
RESULT_SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command"],
    "properties": {
        "command": {"enum": ["check-laws", "eval", "query", "decide", "infer", "fit"]},
        "monad": {"type": "string"},
        "ok": {"type": "boolean"},
        "laws": {"type": "array", "items": {
            "type": "object", "required": ["law", "passed", "checked", "failures", "witness"]}},
        "summary": {"type": "object", "required": ["params", "src", "tgt", "points", "payload"]},
        "results": {"type": "array", "items": {"type": "object", "required": ["type"]}},
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(BUNDLE_SCHEMA)


def _pointer(path) -> str:
    return "/" + "/".join(str(p).replace("~", "~0").replace("/", "~1") for p in path) if path else "/"


def validate_document(doc: Any) -> None:
    """Raise :class:`BundleError` for the deepest, earliest schema violation."""
    errors = list(_VALIDATOR.iter_errors(doc))
    if not errors:
        return
    best = jsonschema.exceptions.best_match(errors)
    raise BundleError(best.message, _pointer(best.absolute_path))


# --- JSON value coercion ----------------------------------------------------------

def to_json(x: Any) -> Any:
    """Plain-JSON image of library values; floats keep 12 significant digits."""
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else round_float(float(x))
    if isinstance(x, float):
        return round_float(x)
    if isinstance(x, Antichain):
        return [to_json(e) for e in x.elements]
    if isinstance(x, (tuple, list)):
        return [to_json(e) for e in x]
    if isinstance(x, Mapping):
        return {str(k): to_json(v) for k, v in x.items()}
    return str(x)


def round_float(x: float) -> float | str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    return float(f"{x:.{FLOAT_DIGITS}g}")


def label_key(x: Any) -> str:
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, bool):
        return "true" if x else "false"
    return str(x)


def point_key(p: tuple) -> str:
    return ",".join(label_key(x) for x in p)


def coerce_point(space: FinPoset, raw: Any, pointer: str) -> tuple:
    """A JSON point (list, scalar for one factor, or factor-name object) as a poset element."""
    if isinstance(raw, Mapping):
        try:
            raw = [raw[n] for n in space.names]
        except KeyError as exc:
            raise BundleError(f"point misses factor {exc.args[0]!r}", pointer) from None
    if not isinstance(raw, list):
        raw = [raw]
    if len(raw) != len(space.factors):
        raise BundleError(f"point {raw!r} has {len(raw)} coordinates, expected {len(space.factors)}", pointer)
    out = []
    for f, v in zip(space.factors, raw):
        lab = _match_label(f, v)
        if lab is _MISSING:
            raise BundleError(f"{v!r} is not a label of factor {f.name or '?'!r}", pointer)
        out.append(lab)
    return tuple(out)


_MISSING = object()


def _match_label(f: Factor, v: Any) -> Any:
    for lab in f.labels:
        if type(lab) is bool or type(v) is bool:
            if lab is v:
                return lab
        elif lab == v or (isinstance(v, str) and label_key(lab) == v):
            return lab
        elif isinstance(v, float) and isinstance(lab, Fraction) and lab == Fraction(str(v)):
            return lab
    return _MISSING


# --- loaded bundle ------------------------------------------------------------------

@dataclass
class Bundle:
    kind: MonadKind
    posets: dict[str, FinPoset] = field(default_factory=dict)
    dps: dict[str, DesignProblem] = field(default_factory=dict)
    cells: dict[str, ParamCell] = field(default_factory=dict)
    repars: dict[str, Repar] = field(default_factory=dict)
    diagram: str | None = None
    queries: list[dict] = field(default_factory=list)
    seed: int = 0
    description: str = ""

    def bindings(self) -> Bindings:
        cells: dict[str, Any] = dict(self.dps)
        cells.update(self.cells)
        return Bindings(self.kind, cells, dict(self.repars), dict(self.posets))

    def target(self, name: str | None = None, pointer: str = "/") -> ParamCell:
        """A named cell or DP, else the evaluated diagram, else the only cell."""
        if name is not None:
            if name in self.cells:
                return self.cells[name]
            if name in self.dps:
                return include(self.kind, self.dps[name])
            raise BundleError(f"unknown cell {name!r}", pointer)
        if self.diagram is not None:
            return eval_text(self.diagram, self.bindings())
        if len(self.cells) == 1:
            return next(iter(self.cells.values()))
        raise BundleError("no diagram and no single cell to evaluate", pointer)


def load_path(path: str | Path) -> Bundle:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise BundleError(f"cannot read bundle: {exc.strerror or exc}", "/") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise BundleError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", "/") from None
    return load(doc)


def load(doc: Mapping[str, Any]) -> Bundle:
    validate_document(doc)
    kind = as_kind(doc["monad"])
    b = Bundle(kind, diagram=doc.get("diagram"), queries=list(doc.get("queries", [])),
               seed=int(doc.get("seed", 0)), description=doc.get("description", ""))
    for name, desc in doc.get("posets", {}).items():
        b.posets[name] = _guard(f"/posets/{name}", lambda: _named(_poset.from_descriptor(desc, b.posets), name))
    for name, desc in doc.get("dps", {}).items():
        b.dps[name] = _guard(f"/dps/{name}", lambda: _dp.from_descriptor(desc, b.posets))
    for name, desc in doc.get("cells", {}).items():
        b.cells[name] = _build_cell(b, name, desc, f"/cells/{name}")
    for name, desc in doc.get("repars", {}).items():
        b.repars[name] = _build_repar(b, desc, f"/repars/{name}")
    return b


def _guard(pointer: str, thunk: Callable[[], Any]) -> Any:
    try:
        return thunk()
    except BundleError:
        raise
    except (ParadpError, KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        raise BundleError(f"{type(exc).__name__}: {msg}", pointer) from None


def _named(p: FinPoset, name: str) -> FinPoset:
    if len(p.factors) == 1 and p.factors[0].name is None:
        f = p.factors[0]
        return FinPoset((Factor(f.labels, f.leq, name),))
    return p


def _space(b: Bundle, factors: list, pointer: str) -> FinPoset:
    out = []
    for i, fd in enumerate(factors):
        def mk(fd=fd):
            if "labels" in fd:
                return discrete_factor(fd["name"], fd["labels"])
            return _poset.axis_from_descriptor(fd)
        out.append(_guard(f"{pointer}/{i}", mk))
    return _guard(pointer, lambda: param_space(*out))


def _table_items(space: FinPoset, table: Any, pointer: str) -> list[tuple[tuple, Any, str]]:
    items: list[tuple[tuple, Any, str]] = []
    if isinstance(table, Mapping):
        keys = {point_key(p): p for p in space.elements}
        for k, v in table.items():
            ptr = f"{pointer}/{k}"
            if k in keys:
                items.append((keys[k], v, ptr))
            else:
                items.append((coerce_point(space, k.split(",") if k else [], ptr), v, ptr))
    else:
        for i, row in enumerate(table):
            ptr = f"{pointer}/{i}"
            items.append((coerce_point(space, row["point"], f"{ptr}/point"), row["value"], f"{ptr}/value"))
    seen = {p for p, _, _ in items}
    missing = [p for p in space.elements if p not in seen]
    if missing:
        raise BundleError(f"table undefined at point {list(to_json(missing[0]))}", pointer)
    if len(seen) != len(items):
        raise BundleError("table lists a point twice", pointer)
    return items


def _payload(kind: MonadKind, raw: Any, carrier: Callable[[Any, str], Any], pointer: str,
             leq: Callable[[Any, Any], bool] | None = None) -> UncertainValue:
    m = monad(kind)
    tagged = isinstance(raw, Mapping) and len(raw) == 1 and next(iter(raw)) in ("set", "interval", "atoms")
    if not tagged:
        return m.unit(carrier(raw, pointer), leq)
    (tag, body), = raw.items()
    want = {"set": MonadKind.POWERSET, "interval": MonadKind.INTERVAL, "atoms": MonadKind.DISTRIBUTION}[tag]
    if want is not kind:
        raise BundleError(f"{tag!r} payload in a {kind.value} bundle", pointer)
    ptr = f"{pointer}/{tag}"
    if tag == "set":
        return _guard(ptr, lambda: UncertainValue.of_set(carrier(x, f"{ptr}/{i}") for i, x in enumerate(body)))
    if tag == "interval":
        lo, hi = carrier(body[0], f"{ptr}/0"), carrier(body[1], f"{ptr}/1")
        return _guard(ptr, lambda: UncertainValue.of_interval(lo, hi, leq))
    atoms = [(carrier(x, f"{ptr}/{i}/0"), p) for i, (x, p) in enumerate(body)]
    return _guard(ptr, lambda: UncertainValue.of_atoms(atoms))


def _dp_ref(b: Bundle, fun: FinPoset, res: FinPoset) -> Callable[[Any, str], DesignProblem]:
    def get(raw: Any, pointer: str) -> DesignProblem:
        if isinstance(raw, str):
            if raw not in b.dps:
                raise BundleError(f"unknown DP {raw!r}", pointer)
            d = b.dps[raw]
        elif isinstance(raw, Mapping):
            d = _guard(pointer, lambda: _dp.from_descriptor(raw, b.posets))
        else:
            raise BundleError(f"expected a DP name or descriptor, got {raw!r}", pointer)
        if d.fun != fun or d.res != res:
            raise BundleError(f"DP interfaces {d.fun!r} -> {d.res!r} differ from the cell's", pointer)
        return d
    return get


def _build_cell(b: Bundle, name: str, desc: Mapping[str, Any], pointer: str) -> ParamCell:
    if "dp" in desc:
        ref = desc["dp"]
        if isinstance(ref, str):
            if ref not in b.dps:
                raise BundleError(f"unknown DP {ref!r}", f"{pointer}/dp")
            return include(b.kind, b.dps[ref])
        return include(b.kind, _guard(f"{pointer}/dp", lambda: _dp.from_descriptor(ref, b.posets)))
    if "threshold_family" in desc:
        return _threshold_family(b, desc["threshold_family"], f"{pointer}/threshold_family")
    if "monad" in desc and as_kind(desc["monad"]) is not b.kind:
        raise BundleError(f"cell monad {desc['monad']!r} differs from the bundle's {b.kind.value!r}",
                          f"{pointer}/monad")
    space = _space(b, desc["param"], f"{pointer}/param")
    fun = _guard(f"{pointer}/fun", lambda: _poset.from_descriptor(desc["fun"], b.posets))
    res = _guard(f"{pointer}/res", lambda: _poset.from_descriptor(desc["res"], b.posets))
    get = _dp_ref(b, fun, res)
    table = {p: _payload(b.kind, v, get, ptr) for p, v, ptr in _table_items(space, desc["table"], f"{pointer}/table")}
    return _guard(pointer, lambda: ParamCell(b.kind, space, fun, res, table))


def _threshold_family(b: Bundle, desc: Mapping[str, Any], pointer: str) -> ParamCell:
    """One DP per parameter point; formulas see the functionality (and, for
    relations, resource) axis names plus every parameter factor by name."""
    space = _space(b, desc["param"], f"{pointer}/param")
    fun = _guard(f"{pointer}/fun", lambda: _poset.from_descriptor(desc["fun"], b.posets))
    res = _guard(f"{pointer}/res", lambda: _poset.from_descriptor(desc["res"], b.posets))
    relation = desc.get("type", "threshold") == "relation"
    consts = {k: Fraction(str(v)) if isinstance(v, float) else Fraction(v)
              for k, v in desc.get("constants", {}).items()}
    memo: dict[tuple[str, tuple], DesignProblem] = {}

    def build(text: str, point: tuple, ptr: str) -> DesignProblem:
        key = (text, point)
        if key not in memo:
            env = {**consts, **dict(zip(space.names, point))}

            def mk():
                form = Formula(text)
                if relation:
                    return _dp.relation_dp(fun, res, lambda f, r: form({**env, **dict(zip(fun.names, f)),
                                                                        **dict(zip(res.names, r))}))
                return _dp.threshold_dp(fun, res, lambda *c: form({**env, **dict(zip(fun.names, c))}))
            memo[key] = _guard(ptr, mk)
        return memo[key]

    formula = desc["formula"]
    table = []
    for point in space.elements:
        carrier = lambda raw, ptr, point=point: build(raw, point, ptr)  # noqa: E731
        table.append(_payload(b.kind, formula, carrier, f"{pointer}/formula"))
    return _guard(pointer, lambda: ParamCell(b.kind, space, fun, res, table))


def _build_repar(b: Bundle, desc: Mapping[str, Any], pointer: str) -> Repar:
    dom = _space(b, desc["dom"], f"{pointer}/dom")
    cod = _space(b, desc["cod"], f"{pointer}/cod")

    def get(raw: Any, ptr: str) -> tuple:
        if isinstance(raw, Mapping) and "point" in raw:
            raw, ptr = raw["point"], f"{ptr}/point"
        return coerce_point(cod, raw, ptr)

    table = {p: _payload(b.kind, v, get, ptr, cod.le)
             for p, v, ptr in _table_items(dom, desc["table"], f"{pointer}/table")}
    return _guard(pointer, lambda: Repar(b.kind, dom, cod, table))


__all__ = [
    "BUNDLE_SCHEMA", "Bundle", "BundleError", "RESULT_SCHEMA", "coerce_point", "label_key",
    "load", "load_path", "point_key", "round_float", "to_json", "validate_document",
]
