"""JSON family documents: parsing, validation, emission."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from json.decoder import scanstring
from typing import Optional

import jsonschema

from . import geometry as geo
from .functionals import PERCENT_AREA, FunctionalSpec, InvalidFunctional
from .geometry import ConvexPolygon
from .stabbing import Family, FamilyEntry

VERSION = 1


class DocumentError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)
        self.line, self.column = line, column


def schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("family.schema.json").read_text())


@dataclass
class FamilyDocument:
    sets: list
    alpha_default: Optional[float] = None
    functional_default: Optional[dict] = None
    version: int = VERSION

    def to_json(self) -> dict:
        out = {"version": self.version}
        if self.alpha_default is not None:
            out["alpha_default"] = self.alpha_default
        if self.functional_default is not None:
            out["functional_default"] = self.functional_default
        out["sets"] = self.sets
        return out


def _line_col(text: str, pos: int):
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _skip_ws(text, pos):
    while pos < len(text) and text[pos] in " \t\r\n":
        pos += 1
    return pos


def locate(text: str, path) -> tuple:
    """Line and column where the value at ``path`` starts."""
    dec = json.JSONDecoder()
    pos = _skip_ws(text, 0)
    for key in path:
        opener = text[pos]
        pos = _skip_ws(text, pos + 1)
        i = 0
        while pos < len(text) and text[pos] not in "]}":
            if opener == "{":
                k, pos = scanstring(text, pos + 1)
                pos = _skip_ws(text, _skip_ws(text, pos) + 1)
                hit = k == key
            else:
                hit = i == key
            if hit:
                break
            _, pos = dec.raw_decode(text, pos)
            pos = _skip_ws(text, pos)
            if text[pos] == ",":
                pos = _skip_ws(text, pos + 1)
            i += 1
    return _line_col(text, pos)


def _polygon(points, what: str) -> ConvexPolygon:
    pts = [(float(x), float(y)) for x, y in points]
    if any(not math.isfinite(c) for p in pts for c in p):
        raise ValueError(f"{what}: non-finite coordinate")
    distinct = list(dict.fromkeys(pts))
    if len(distinct) >= 3:
        turning = 0.0
        k = len(distinct)
        for i in range(k):
            a, b, c = distinct[i], distinct[(i + 1) % k], distinct[(i + 2) % k]
            e1 = (b[0] - a[0], b[1] - a[1])
            e2 = (c[0] - b[0], c[1] - b[1])
            turning += math.atan2(e1[0] * e2[1] - e1[1] * e2[0], e1[0] * e2[0] + e1[1] * e2[1])
        simple = abs(abs(turning) - geo.TWO_PI) < 1e-6 or abs(turning) < 1e-9
        if not (geo.is_convex_chain(distinct) and simple):
            raise ValueError(f"{what}: vertices are not in convex position")
    return ConvexPolygon(tuple(pts))


def _functional(spec: Optional[dict], shape: ConvexPolygon) -> FunctionalSpec:
    spec = spec or {"kind": PERCENT_AREA}
    kind = spec["kind"]
    if kind == PERCENT_AREA:
        base = _polygon(spec["base"], "functional base") if "base" in spec else shape
        return FunctionalSpec.percent_area_of(base)
    if "base" in spec:
        raise InvalidFunctional(f"{kind} takes no base polygon")
    return FunctionalSpec(kind)


def parse_document(text: str) -> FamilyDocument:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"malformed JSON: {exc.msg}", exc.lineno, exc.colno) from None
    errors = sorted(jsonschema.Draft202012Validator(schema()).iter_errors(raw), key=lambda e: list(e.path))
    if errors:
        err = errors[0]
        path = list(err.absolute_path)
        line, col = locate(text, path)
        where = "/".join(str(p) for p in path) or "<root>"
        raise DocumentError(f"invalid document at {where}: {err.message}", line, col)
    doc = FamilyDocument(sets=raw["sets"], alpha_default=raw.get("alpha_default"),
                         functional_default=raw.get("functional_default"), version=raw["version"])
    try:
        to_family(doc)
    except (ValueError, InvalidFunctional) as exc:
        path = getattr(exc, "path", [])
        line, col = locate(text, path)
        raise DocumentError(f"invalid document: {exc}", line, col) from None
    return doc


def _entry_error(exc: Exception, i: int) -> ValueError:
    out = ValueError(f"set {i + 1}: {exc}")
    out.path = ["sets", i]
    return out


def to_family(doc: FamilyDocument) -> Family:
    entries = []
    for i, s in enumerate(doc.sets):
        try:
            shape = _polygon(s["vertices"], "vertices")
            f = _functional(s.get("functional", doc.functional_default), shape)
            alpha = s.get("alpha", doc.alpha_default)
            if alpha is None:
                raise ValueError("no alpha and no alpha_default")
            entries.append(FamilyEntry(shape, f, float(alpha), color=s.get("color"),
                                       label=s.get("label", str(i + 1))))
        except (ValueError, InvalidFunctional) as exc:
            raise _entry_error(exc, i) from None
    return Family(tuple(entries))


def _vertices(poly: ConvexPolygon) -> list:
    return [[float(p.x), float(p.y)] for p in poly.vertices]


def _functional_json(entry: FamilyEntry) -> dict:
    f = entry.functional
    if f.kind == PERCENT_AREA:
        return {"kind": PERCENT_AREA} if f.base == entry.shape else {"kind": PERCENT_AREA, "base": _vertices(f.base)}
    return {"kind": f.kind}


def from_family(family: Family) -> FamilyDocument:
    """Document for ``family``; the most common alpha and functional become defaults."""
    alphas = [e.alpha for e in family]
    funcs = [_functional_json(e) for e in family]
    alpha_default = max(alphas, key=alphas.count)
    func_default = max(funcs, key=funcs.count)
    sets = []
    for e, fj in zip(family, funcs):
        s = {"label": e.label}
        if e.color is not None:
            s["color"] = getattr(e.color, "value", e.color)
        s["vertices"] = _vertices(e.shape)
        if fj != func_default:
            s["functional"] = fj
        if e.alpha != alpha_default:
            s["alpha"] = e.alpha
        sets.append(s)
    return FamilyDocument(sets=sets, alpha_default=alpha_default, functional_default=func_default)


def emit_document(doc: FamilyDocument) -> str:
    return json.dumps(doc.to_json(), indent=2) + "\n"


def load_family(path) -> Family:
    with open(path, encoding="utf-8") as fh:
        return to_family(parse_document(fh.read()))


def save_family(family: Family, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(emit_document(from_family(family)))


def fixture_path(name: str):
    return resources.files(__package__).joinpath("fixtures", name)


__all__ = ["DocumentError", "FamilyDocument", "parse_document", "to_family", "from_family",
           "emit_document", "load_family", "save_family", "schema", "locate", "fixture_path"]
