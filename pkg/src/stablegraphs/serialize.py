"""JSON schemas for every value the CLI consumes or emits, plus DOT export.

Graph documents look like::

    {"rank": 1,
     "flags": [0, 1, 2],
     "vertices": [{"id": 0, "genus": 0, "class": [1]}],
     "boundary": {"0": 0, "1": 0, "2": 0},
     "involution": {"0": 0, "1": 2, "2": 1}}

Map keys are strings because JSON objects demand it; everything else is an
integer.  Emission is deterministic: keys sorted, ids as constructed.
"""

from __future__ import annotations

from typing import Any

from .graphs import MarkedGraph, edges, tails
from .isogeny import ContractStep, ExtendedIsogeny, ForgetStep, extended_isogeny
from .monoid import LinearForm, MonoidElement, MonoidHom
from .morphisms import CombinatorialMorphism, Contraction
from .profiles import BUILTIN_PROFILES, VarietyProfile
from .pullback import MarkedMorphism


class SchemaError(ValueError):
    """Document shape does not match the expected schema."""


def _need(doc: dict, key: str, kind=None):
    if not isinstance(doc, dict) or key not in doc:
        raise SchemaError(f"missing key {key!r}")
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"key {key!r} has wrong type, expected {kind}")
    return value


def _int_key_map(doc: Any, what: str) -> dict[int, int]:
    if not isinstance(doc, dict):
        raise SchemaError(f"{what} must be an object")
    try:
        return {int(k): int(v) for k, v in doc.items()}
    except (TypeError, ValueError) as exc:
        raise SchemaError(f"{what} must map integers to integers") from exc


# -- graphs ---------------------------------------------------------------


def graph_to_json(g: MarkedGraph) -> dict:
    return {
        "rank": g.rank,
        "flags": list(g.flags),
        "vertices": [
            {"id": v, "genus": g.genus[v], "class": list(g.classes[v].coords)} for v in g.vertices
        ],
        "boundary": {str(f): g.boundary[f] for f in g.flags},
        "involution": {str(f): g.involution[f] for f in g.flags},
    }


def graph_from_json(doc: dict) -> MarkedGraph:
    flags = _need(doc, "flags", list)
    vertices = _need(doc, "vertices", list)
    boundary = _int_key_map(_need(doc, "boundary"), "boundary")
    involution = _int_key_map(_need(doc, "involution"), "involution")
    genus: dict[int, int] = {}
    classes: dict[int, MonoidElement] = {}
    rank = doc.get("rank")
    for entry in vertices:
        vid = int(_need(entry, "id"))
        genus[vid] = int(_need(entry, "genus"))
        coords = entry.get("class", [])
        if not isinstance(coords, list):
            raise SchemaError("vertex class must be an array of integers")
        classes[vid] = MonoidElement(tuple(int(c) for c in coords))
        if rank is None:
            rank = len(coords)
    if rank is None:
        rank = 0
    return MarkedGraph(
        flags=tuple(int(f) for f in flags),
        vertices=tuple(genus),
        boundary=boundary,
        involution=involution,
        genus=genus,
        classes=classes,
        rank=int(rank),
    )


# -- monoid values --------------------------------------------------------


def hom_to_json(h: MonoidHom) -> dict:
    return {"rows": [list(r) for r in h.rows], "source_rank": h.source_rank}


def hom_from_json(doc: dict) -> MonoidHom:
    rows = _need(doc, "rows", list)
    return MonoidHom(tuple(tuple(int(x) for x in row) for row in rows), int(_need(doc, "source_rank")))


def profile_from_json(doc: dict) -> VarietyProfile:
    return VarietyProfile(
        name=str(doc.get("name", "custom")),
        dimension=int(_need(doc, "dim")),
        canonical=LinearForm(tuple(int(c) for c in _need(doc, "canonical", list))),
        ample=LinearForm(tuple(int(c) for c in _need(doc, "ample", list))),
    )


def profile_to_json(p: VarietyProfile) -> dict:
    return {"name": p.name, "dim": p.dimension, "canonical": list(p.canonical.coeffs), "ample": list(p.ample.coeffs)}


def resolve_profile(spec: str | dict | None) -> VarietyProfile:
    import json
    from pathlib import Path

    if spec is None:
        raise SchemaError("a profile is required; pass --profile")
    if isinstance(spec, dict):
        return profile_from_json(spec)
    if spec in BUILTIN_PROFILES:
        return BUILTIN_PROFILES[spec]
    path = Path(spec)
    if path.exists():
        return profile_from_json(json.loads(path.read_text()))
    raise SchemaError(f"unknown profile {spec!r}; use P1|P2|P3|point or a JSON file path")


# -- morphisms ------------------------------------------------------------


def contraction_to_json(c: Contraction) -> dict:
    return {
        "kind": "contraction",
        "source": graph_to_json(c.source),
        "target": graph_to_json(c.target),
        "flagmap": {str(k): v for k, v in sorted(c.flagmap.items())},
        "vertexmap": {str(k): v for k, v in sorted(c.vertexmap.items())},
    }


def contraction_from_json(doc: dict) -> Contraction:
    if doc.get("kind") != "contraction":
        raise SchemaError("expected kind 'contraction'")
    return Contraction(
        source=graph_from_json(_need(doc, "source", dict)),
        target=graph_from_json(_need(doc, "target", dict)),
        flagmap=_int_key_map(_need(doc, "flagmap"), "flagmap"),
        vertexmap=_int_key_map(_need(doc, "vertexmap"), "vertexmap"),
    )


def combinatorial_to_json(a: CombinatorialMorphism) -> dict:
    doc = {
        "kind": "combinatorial",
        "source": graph_to_json(a.source),
        "target": graph_to_json(a.target),
        "flagmap": {str(k): v for k, v in sorted(a.flagmap.items())},
        "vertexmap": {str(k): v for k, v in sorted(a.vertexmap.items())},
    }
    if a.hom is not None:
        doc["hom"] = hom_to_json(a.hom)
    return doc


def combinatorial_from_json(doc: dict) -> CombinatorialMorphism:
    if doc.get("kind") != "combinatorial":
        raise SchemaError("expected kind 'combinatorial'")
    return CombinatorialMorphism(
        source=graph_from_json(_need(doc, "source", dict)),
        target=graph_from_json(_need(doc, "target", dict)),
        flagmap=_int_key_map(_need(doc, "flagmap"), "flagmap"),
        vertexmap=_int_key_map(_need(doc, "vertexmap"), "vertexmap"),
        hom=hom_from_json(doc["hom"]) if "hom" in doc else None,
    )


def morphism_from_json(doc: dict) -> Contraction | CombinatorialMorphism:
    kind = _need(doc, "kind")
    if kind == "contraction":
        return contraction_from_json(doc)
    if kind == "combinatorial":
        return combinatorial_from_json(doc)
    raise SchemaError(f"unknown morphism kind {kind!r}")


def marked_to_json(m: MarkedMorphism) -> dict:
    return {
        "kind": "marked",
        "xi": hom_to_json(m.hom),
        "a": combinatorial_to_json(m.comb),
        "mid": graph_to_json(m.mid),
        "phi": contraction_to_json(m.contr),
    }


def marked_from_json(doc: dict) -> MarkedMorphism:
    if doc.get("kind") != "marked":
        raise SchemaError("expected kind 'marked'")
    return MarkedMorphism(
        hom=hom_from_json(_need(doc, "xi", dict)),
        comb=combinatorial_from_json(_need(doc, "a", dict)),
        mid=graph_from_json(_need(doc, "mid", dict)),
        contr=contraction_from_json(_need(doc, "phi", dict)),
    )


def isogeny_to_json(e: ExtendedIsogeny) -> dict:
    steps = []
    for s in e.steps:
        if isinstance(s, ForgetStep):
            steps.append({"op": "forget", "tail": s.tail})
        else:
            steps.append({"op": "contract", "edge": list(s.edge)})
    return {
        "kind": "extended-isogeny",
        "source": graph_to_json(e.source),
        "glues": [list(p) for p in e.glued],
        "steps": steps,
        "target": graph_to_json(e.target),
    }


def isogeny_from_json(doc: dict) -> ExtendedIsogeny:
    if doc.get("kind") != "extended-isogeny":
        raise SchemaError("expected kind 'extended-isogeny'")
    source = graph_from_json(_need(doc, "source", dict))
    glues = [(int(p[0]), int(p[1])) for p in doc.get("glues", [])]
    steps = []
    for s in doc.get("steps", []):
        op = _need(s, "op")
        if op == "forget":
            steps.append(ForgetStep(int(_need(s, "tail"))))
        elif op == "contract":
            e = _need(s, "edge", list)
            steps.append(ContractStep((int(e[0]), int(e[1]))))
        else:
            raise SchemaError(f"unknown isogeny step {op!r}")
    return extended_isogeny(source, glues, steps)


# -- DOT export -----------------------------------------------------------


def export_dot(g: MarkedGraph) -> str:
    """Deterministic DOT text: labelled vertex nodes, edge arcs, and tails
    drawn as half-edges toward invisible anchor points."""
    lines = ["graph marked_graph {"]
    for v in g.vertices:
        cls = ",".join(str(c) for c in g.classes[v].coords)
        lines.append(f'  v{v} [label="g={g.genus[v]},b=({cls})"];')
    for f1, f2 in edges(g):
        lines.append(f"  v{g.boundary[f1]} -- v{g.boundary[f2]} [label=\"{f1}-{f2}\"];")
    for f in tails(g):
        lines.append(f'  t{f} [shape=point,style=invis];')
        lines.append(f'  v{g.boundary[f]} -- t{f} [label="{f}",style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"
