"""JSON codecs (schema "v1").

Multisets travel as their literal strings, coefficients as exact strings
("3", "-1/2", "2 mod 7"), matrices as nested lists of such strings.
"""
from __future__ import annotations

from fractions import Fraction

from multisch.multijection import Multijection
from multisch.multiset import Multiset
from multisch.rings import ZZ, CoeffRing, ring_from_tag
from multisch.schurcat import GraphMorphism, SchMorphism

VERSION = "v1"


class SchemaError(ValueError):
    pass


def ms_to_json(s: Multiset) -> str:
    return str(s)


def ms_from_json(x) -> Multiset:
    if not isinstance(x, str):
        raise SchemaError(f"multiset must be a string literal, got {x!r}")
    return Multiset.parse(x)


def coeff_to_json(c, ring: CoeffRing = ZZ) -> str:
    return ring.format(c)


def coeff_from_json(x, ring: CoeffRing = ZZ):
    if isinstance(x, int):
        return ring.coerce(x)
    if not isinstance(x, str):
        raise SchemaError(f"coefficient must be a string, got {x!r}")
    return ring.parse(x)


def value_to_json(v) -> str:
    if isinstance(v, Fraction) and v.denominator == 1:
        v = v.numerator
    return str(v)


def matrix_to_json(rows) -> list[list[str]]:
    return [[value_to_json(v) for v in row] for row in rows]


def matrix_from_json(rows) -> list[list]:
    out = []
    for row in rows:
        r = []
        for v in row:
            if isinstance(v, int):
                r.append(v)
            elif isinstance(v, str):
                r.append(Fraction(v) if "/" in v else int(v))
            else:
                raise SchemaError(f"bad matrix entry {v!r}")
        out.append(r)
    return out


def multijection_to_json(f: Multijection) -> dict:
    return {"source": ms_to_json(f.source), "target": ms_to_json(f.target),
            "map": {str(s): t for s, t in f.mapping}}


def multijection_from_json(d: dict) -> Multijection:
    try:
        src, tgt = ms_from_json(d["source"]), ms_from_json(d["target"])
        mp = {int(k): int(v) for k, v in d["map"].items()}
    except (KeyError, TypeError, AttributeError) as exc:
        raise SchemaError(f"bad multijection: {exc}") from exc
    return Multijection.from_map(src, tgt, mp)


def graph_to_json(g: GraphMorphism) -> dict:
    return {"source": ms_to_json(g.source), "target": ms_to_json(g.target),
            "rows": list(g.source.support), "cols": list(g.target.support),
            "entries": [list(r) for r in g.entries]}


def graph_from_json(d: dict) -> GraphMorphism:
    try:
        src, tgt = ms_from_json(d["source"]), ms_from_json(d["target"])
        entries = [[int(v) for v in r] for r in d["entries"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"bad graph: {exc}") from exc
    rows = d.get("rows", list(src.support))
    cols = d.get("cols", list(tgt.support))
    if list(rows) != list(src.support) or list(cols) != list(tgt.support):
        # reorder to canonical label order
        ri = {lab: i for i, lab in enumerate(rows)}
        ci = {lab: j for j, lab in enumerate(cols)}
        try:
            entries = [[entries[ri[t]][ci[s]] for s in tgt.support] for t in src.support]
        except KeyError as exc:
            raise SchemaError(f"graph labels do not match endpoints: {exc}") from exc
    return GraphMorphism(src, tgt, tuple(tuple(r) for r in entries))


def morphism_to_json(x: SchMorphism) -> dict:
    return {"source": ms_to_json(x.source), "target": ms_to_json(x.target),
            "ring": x.ring.tag,
            "terms": [{"coeff": coeff_to_json(c, x.ring), "graph": graph_to_json(g)}
                      for g, c in x.terms.items()]}


def morphism_from_json(d: dict, ring: CoeffRing | None = None) -> SchMorphism:
    if "terms" not in d:
        # a bare graph is accepted as a morphism with coefficient 1
        g = graph_from_json(d)
        return SchMorphism.of(g, 1, ring or ZZ)
    ring = ring or ring_from_tag(d.get("ring", "Z"))
    terms = {}
    src = tgt = None
    for t in d["terms"]:
        g = graph_from_json(t["graph"])
        terms[g] = terms.get(g, 0) + coeff_from_json(t.get("coeff", "1"), ring)
        src, tgt = g.source, g.target
    if "source" in d:
        src, tgt = ms_from_json(d["source"]), ms_from_json(d["target"])
    if src is None:
        raise SchemaError("zero morphism needs explicit source and target")
    return SchMorphism(src, tgt, terms, ring)


__all__ = [
    "SchemaError",
    "VERSION",
    "coeff_from_json",
    "coeff_to_json",
    "graph_from_json",
    "graph_to_json",
    "matrix_from_json",
    "matrix_to_json",
    "morphism_from_json",
    "morphism_to_json",
    "ms_from_json",
    "ms_to_json",
    "multijection_from_json",
    "multijection_to_json",
]
