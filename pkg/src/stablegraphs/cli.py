"""Command line interface: one JSON document in, one JSON document out.

Every verb reads a single document from stdin (or ``--in``) and writes its
result to stdout (or ``--out``) with sorted keys, so outputs are
byte-identical across runs.  Exit codes: 0 success, 2 malformed input,
3 domain validation failure (the payload lists the violated conditions),
4 size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys

from .canonical import DEFAULT_MAX_FLAGS
from .cartesian import cartesian_pullback, enumerate_stable_graphs
from .errors import SizeCapError, StableGraphsError, ValidationError
from .graphs import (
    edges,
    euler_characteristic,
    genus,
    is_stable,
    tails,
)
from .isogeny import compose_extended, stably_forget_tail
from .morphisms import (
    contract_edges,
    cut_edge,
    glue_tails,
    validate_combinatorial,
    validate_contraction,
)
from .profiles import deg_graph, dim_graph
from .pullback import compose_marked, stable_pullback
from .serialize import (
    SchemaError,
    combinatorial_from_json,
    combinatorial_to_json,
    contraction_from_json,
    contraction_to_json,
    export_dot,
    graph_from_json,
    graph_to_json,
    hom_from_json,
    isogeny_from_json,
    isogeny_to_json,
    marked_from_json,
    marked_to_json,
    resolve_profile,
)
from .stabilize import pushforward, stabilize

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_DOMAIN = 3
EXIT_SIZE = 4


def _check_size(doc, cap: int) -> None:
    if isinstance(doc, dict) and isinstance(doc.get("flags"), list) and len(doc["flags"]) > cap:
        raise SizeCapError(f"graph has {len(doc['flags'])} flags, cap is {cap}")
    if isinstance(doc, dict):
        for value in doc.values():
            _check_size(value, cap)
    elif isinstance(doc, list):
        for value in doc:
            _check_size(value, cap)


def _run_validate(doc, args):
    kind = doc.get("kind") if isinstance(doc, dict) else None
    if kind == "contraction":
        violations = validate_contraction(contraction_from_json(doc))
    elif kind == "combinatorial":
        violations = validate_combinatorial(combinatorial_from_json(doc))
    elif kind == "marked":
        from .pullback import validate_marked

        violations = validate_marked(marked_from_json(doc))
    elif kind == "extended-isogeny":
        from .isogeny import validate_extended

        violations = validate_extended(isogeny_from_json(doc))
    else:
        graph_from_json(doc)  # structural validation happens in the constructor
        violations = []
    if violations:
        raise ValidationError(violations)
    return {"ok": True}


def _run_invariants(doc, args):
    g = graph_from_json(doc)
    try:
        gen = genus(g)
    except ValueError:
        gen = None
    return {
        "tails": len(tails(g)),
        "edges": len(edges(g)),
        "chi": euler_characteristic(g),
        "genus": gen,
        "stable": is_stable(g),
    }


def _run_stabilize(doc, args):
    g = graph_from_json(doc)
    stable, morphism = stabilize(g)
    return {"graph": graph_to_json(stable), "morphism": combinatorial_to_json(morphism)}


def _run_pushforward(doc, args):
    hom = hom_from_json(doc["xi"]) if "xi" in doc else None
    if hom is None:
        raise SchemaError("pushforward needs 'xi'")
    g = graph_from_json(doc["graph"]) if "graph" in doc else None
    if g is None:
        raise SchemaError("pushforward needs 'graph'")
    result, morphism = pushforward(hom, g)
    return {"graph": graph_to_json(result), "morphism": marked_to_json(morphism)}


def _run_contract(doc, args):
    g = graph_from_json(doc["graph"]) if "graph" in doc else None
    if g is None or "edges" not in doc:
        raise SchemaError("contract needs 'graph' and 'edges'")
    edge_set = [(int(e[0]), int(e[1])) for e in doc["edges"]]
    return contraction_to_json(contract_edges(g, edge_set))


def _run_cut(doc, args):
    g = graph_from_json(doc["graph"]) if "graph" in doc else None
    if g is None or "edge" not in doc:
        raise SchemaError("cut needs 'graph' and 'edge'")
    e = doc["edge"]
    cut, morphism = cut_edge(g, (int(e[0]), int(e[1])))
    return {"graph": graph_to_json(cut), "morphism": combinatorial_to_json(morphism)}


def _run_glue(doc, args):
    g = graph_from_json(doc["graph"]) if "graph" in doc else None
    if g is None or "tails" not in doc:
        raise SchemaError("glue needs 'graph' and 'tails'")
    t = doc["tails"]
    glued, morphism = glue_tails(g, int(t[0]), int(t[1]))
    return {"graph": graph_to_json(glued), "morphism": combinatorial_to_json(morphism)}


def _run_forget(doc, args):
    g = graph_from_json(doc["graph"]) if "graph" in doc else None
    if g is None or "tail" not in doc:
        raise SchemaError("forget needs 'graph' and 'tail'")
    result = stably_forget_tail(g, int(doc["tail"]))
    return {
        "graph": graph_to_json(result.graph),
        "morphism": combinatorial_to_json(result.morphism),
        "tailmap": {str(k): v for k, v in sorted(result.tail_map.items())},
        "type": result.kind,
    }


def _run_compose(doc, args):
    first = doc.get("first")
    second = doc.get("second")
    if first is None or second is None:
        raise SchemaError("compose needs 'first' and 'second' (applied first, then second)")
    if first.get("kind") == "marked":
        composite = compose_marked(marked_from_json(second), marked_from_json(first))
        return marked_to_json(composite)
    if first.get("kind") == "extended-isogeny":
        composite = compose_extended(isogeny_from_json(second), isogeny_from_json(first))
        return isogeny_to_json(composite)
    raise SchemaError("compose handles kinds 'marked' and 'extended-isogeny'")


def _run_pullback(doc, args):
    for key in ("xi", "phi", "a"):
        if key not in doc:
            raise SchemaError(f"pullback needs {key!r}")
    xi = hom_from_json(doc["xi"])
    phi = contraction_from_json(doc["phi"])
    a = combinatorial_from_json(doc["a"])
    if "rho" in doc and graph_from_json(doc["rho"]) != a.source:
        raise SchemaError("'rho' must equal the source of 'a'")
    pi, psi, b = stable_pullback(xi, phi, a)
    return {
        "pi": graph_to_json(pi),
        "psi": contraction_to_json(psi),
        "b": combinatorial_to_json(b),
    }


def _run_cartesian(doc, args):
    profile = resolve_profile(doc.get("profile", args.profile))
    if "phi" not in doc or "b" not in doc:
        raise SchemaError("cartesian needs 'phi' (extended isogeny) and 'b' (combinatorial)")
    phi = isogeny_from_json(doc["phi"])
    b = combinatorial_from_json(doc["b"])
    members = cartesian_pullback(profile, phi, b)
    return {
        "family": [
            {
                "a": combinatorial_to_json(m.identification),
                "graph": graph_to_json(m.graph),
                "lift": isogeny_to_json(m.lift),
                "deg": deg_graph(profile, m.graph),
            }
            for m in members
        ],
        "deg": deg_graph(profile, b.target),
        "size": len(members),
    }


def _run_boundary(doc, args):
    profile = resolve_profile(doc.get("profile", args.profile))
    graphs = enumerate_stable_graphs(
        profile,
        genus_total=int(doc.get("genus", 0)),
        num_tails=int(doc.get("tails", 0)),
        ample_bound=int(doc.get("ample_bound", 0)),
        max_vertices=int(doc.get("max_vertices", 1)),
    )
    return {"count": len(graphs), "graphs": [graph_to_json(g) for g in graphs]}


def _run_dim(doc, args):
    profile = resolve_profile(doc.get("profile", args.profile))
    g = graph_from_json(doc["graph"] if "graph" in doc else doc)
    return {"dim": dim_graph(profile, g)}


def _run_deg(doc, args):
    profile = resolve_profile(doc.get("profile", args.profile))
    g = graph_from_json(doc["graph"] if "graph" in doc else doc)
    return {"deg": deg_graph(profile, g)}


def _run_export_dot(doc, args):
    return export_dot(graph_from_json(doc))


VERBS = {
    "validate": _run_validate,
    "invariants": _run_invariants,
    "stabilize": _run_stabilize,
    "pushforward": _run_pushforward,
    "contract": _run_contract,
    "cut": _run_cut,
    "glue": _run_glue,
    "forget": _run_forget,
    "compose": _run_compose,
    "pullback": _run_pullback,
    "cartesian": _run_cartesian,
    "boundary": _run_boundary,
    "dim": _run_dim,
    "deg": _run_deg,
    "export-dot": _run_export_dot,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="stablegraphs",
        description="Calculus of stable marked modular graphs (JSON in, JSON out).",
    )
    parser.add_argument("verb", choices=sorted(VERBS), help="operation to run")
    parser.add_argument("--in", dest="infile", default=None, help="input JSON file (default: stdin)")
    parser.add_argument("--out", dest="outfile", default=None, help="output file (default: stdout)")
    parser.add_argument("--profile", default=None, help="P1|P2|P3|point or a profile JSON file")
    parser.add_argument("--max-flags", type=int, default=DEFAULT_MAX_FLAGS, help="size cap on graphs")
    parser.add_argument("--seed", type=int, default=0, help="seed for randomized suites (reserved)")
    return parser


def _emit(payload, outfile: str | None) -> None:
    if isinstance(payload, str):
        text = payload
    else:
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if outfile:
        with open(outfile, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.infile:
            with open(args.infile, "r", encoding="utf-8") as fh:
                raw = fh.read()
        else:
            raw = sys.stdin.read()
        try:
            doc = json.loads(raw) if raw.strip() else {}
        except json.JSONDecodeError as exc:
            raise SchemaError(f"input is not valid JSON: {exc}") from exc
        _check_size(doc, args.max_flags)
        payload = VERBS[args.verb](doc, args)
        _emit(payload, args.outfile)
        return EXIT_OK
    except SchemaError as exc:
        _emit({"error": {"type": "schema", "message": str(exc)}}, args.outfile)
        return EXIT_SCHEMA
    except SizeCapError as exc:
        _emit({"error": {"type": "size-cap", "message": str(exc)}}, args.outfile)
        return EXIT_SIZE
    except ValidationError as exc:
        _emit(
            {
                "error": {
                    "type": "validation",
                    "conditions": sorted(set(exc.conditions)),
                    "message": str(exc),
                }
            },
            args.outfile,
        )
        return EXIT_DOMAIN
    except (KeyError, TypeError, IndexError) as exc:
        _emit({"error": {"type": "schema", "message": f"malformed document: {exc!r}"}}, args.outfile)
        return EXIT_SCHEMA
    except StableGraphsError as exc:
        _emit({"error": {"type": "domain", "message": str(exc)}}, args.outfile)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
