"""Stabilization of marked graphs and pushforward along a change of marking.

An unstable vertex (class zero, 2*genus + valence < 3) is removed by one of
four local surgeries, chosen by its flag configuration:

* case I:   a single flag, half of an edge; the far half becomes a tail
* case II:  one tail plus one edge half; the far half becomes a tail
* case III: two halves of distinct non-loop edges; the far halves are glued
* case IV:  all flags paired within the vertex (tails or loops); the whole
            one-vertex component is removed

Each step removes exactly one vertex, so iteration terminates; the result is
stable and receives a combinatorial morphism into the original graph through
which every combinatorial morphism from a stable graph factors uniquely.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Callable, Iterable

from .errors import SizeCapError, ValidationError, Violation, ensure_valid
from .graphs import MarkedGraph, is_stable, is_stable_vertex, relabel_classes, valence
from .monoid import MonoidHom
from .morphisms import (
    CombinatorialMorphism,
    compose_combinatorial,
    validate_combinatorial,
)


@dataclass(frozen=True)
class ReductionStep:
    """One vertex removal: which case fired, at which vertex, what changed."""

    case: str  # "I" | "II" | "III" | "IV"
    vertex: int
    removed_flags: tuple[int, ...]
    new_tails: tuple[int, ...]  # flags whose involution became the identity
    glued: tuple[int, int] | None  # case III: the far halves now forming an edge


def _reduction_case(g: MarkedGraph, v: int) -> str | None:
    """Which removal case applies at v, or None when v is stable.

    The guards are disjoint: an unstable vertex matches exactly one case.
    """
    if is_stable_vertex(g, v):
        return None
    at_v = g.flags_at(v)
    external = [f for f in at_v if g.involution[f] != f and g.boundary[g.involution[f]] != v]
    if not external:
        return "IV"
    if len(at_v) == 1:
        return "I"
    # unstable with class zero forces genus 0 and valence <= 2 here
    if len(external) == 1:
        return "II"
    return "III"


def _apply_reduction(g: MarkedGraph, v: int, case: str) -> tuple[MarkedGraph, ReductionStep]:
    at_v = g.flags_at(v)
    if case == "I":
        (f1,) = at_v
        f2 = g.involution[f1]
        removed = (f1,)
        new_tails = (f2,)
        glued = None
    elif case == "II":
        tail = next(f for f in at_v if g.involution[f] == f)
        half = next(f for f in at_v if g.involution[f] != f)
        removed = tuple(sorted((tail, half)))
        new_tails = (g.involution[half],)
        glued = None
    elif case == "III":
        h1, h2 = sorted(at_v)
        removed = (h1, h2)
        new_tails = ()
        glued = (g.involution[h1], g.involution[h2])
    else:  # IV
        removed = tuple(sorted(at_v))
        new_tails = ()
        glued = None
    kept = tuple(f for f in g.flags if f not in set(removed))
    involution = {f: g.involution[f] for f in kept}
    for t in new_tails:
        involution[t] = t
    if glued:
        involution[glued[0]] = glued[1]
        involution[glued[1]] = glued[0]
    smaller = MarkedGraph(
        flags=kept,
        vertices=tuple(w for w in g.vertices if w != v),
        boundary={f: g.boundary[f] for f in kept},
        involution=involution,
        genus={w: gv for w, gv in g.genus.items() if w != v},
        classes={w: c for w, c in g.classes.items() if w != v},
        rank=g.rank,
    )
    return smaller, ReductionStep(case, v, removed, new_tails, glued)


def _pick_vertex_ascending(g: MarkedGraph) -> tuple[int, str] | None:
    for v in g.vertices:
        case = _reduction_case(g, v)
        if case is not None:
            return v, case
    return None


def stabilize_with_trace(
    g: MarkedGraph,
    pick: Callable[[MarkedGraph], tuple[int, str] | None] = _pick_vertex_ascending,
) -> tuple[MarkedGraph, CombinatorialMorphism, tuple[ReductionStep, ...]]:
    """Stabilize, also reporting the surgery steps in application order.

    ``pick`` selects the next unstable vertex; the default scans ascending
    vertex ids.  Any selection order yields the same result up to canonical
    isomorphism (and in fact literally the same graph, since surviving ids
    never change).
    """
    current = g
    steps: list[ReductionStep] = []
    while True:
        chosen = pick(current)
        if chosen is None:
            break
        v, case = chosen
        current, step = _apply_reduction(current, v, case)
        steps.append(step)
    morphism = CombinatorialMorphism(
        source=current,
        target=g,
        flagmap={f: f for f in current.flags},
        vertexmap={v: v for v in current.vertices},
    )
    ensure_valid(validate_combinatorial(morphism), "stabilization morphism invalid")
    return current, morphism, tuple(steps)


def stabilize(g: MarkedGraph) -> tuple[MarkedGraph, CombinatorialMorphism]:
    """The stable graph under g with its canonical morphism into g."""
    stable, morphism, _ = stabilize_with_trace(g)
    return stable, morphism


def pushforward(hom: MonoidHom, g: MarkedGraph) -> tuple[MarkedGraph, "pullback.MarkedMorphism"]:
    """Change the marking monoid along hom, then stabilize.

    Requires g stable over its own monoid; the result is the universal stable
    graph over the hom's target, packaged as a morphism in the marked stable
    graph category (combinatorial part the stabilization, contraction part
    the identity).
    """
    from . import pullback  # deferred: pullback builds on this module

    if not is_stable(g):
        raise ValidationError([Violation("pushforward-unstable-source", "pushforward requires a stable graph")])
    relabeled = relabel_classes(g, hom)
    stable, a = stabilize(relabeled)
    morphism = pullback.MarkedMorphism(
        hom=hom,
        comb=CombinatorialMorphism(
            source=stable, target=g, flagmap=dict(a.flagmap), vertexmap=dict(a.vertexmap), hom=hom
        ),
        mid=stable,
        contr=_identity_contraction(stable),
    )
    pullback.check_marked(morphism)
    return stable, morphism


def _identity_contraction(g: MarkedGraph):
    from .morphisms import identity_contraction

    return identity_contraction(g)


def absolute_stabilization(g: MarkedGraph) -> tuple[MarkedGraph, CombinatorialMorphism]:
    """Forget all classes (push to the trivial monoid) and stabilize.

    The returned morphism goes from the stable rank-0 graph into the rank-0
    relabelling of g, with the same flag/vertex ids as g.
    """
    relabeled = relabel_classes(g, MonoidHom.to_trivial(g.rank))
    return stabilize(relabeled)


# -- exhaustive morphism enumeration and the universal property oracle ----


def enumerate_combinatorial_morphisms(
    src: MarkedGraph, tgt: MarkedGraph, cap: int = 200_000
) -> list[CombinatorialMorphism]:
    """All combinatorial morphisms src -> tgt over a common monoid.

    Backtracks over genus/class/valence compatible vertex assignments, then
    over per-vertex flag injections, validating each candidate in full.
    Intended for oracle use on very small graphs.
    """
    if src.rank != tgt.rank:
        return []
    candidates: dict[int, list[int]] = {}
    for v in src.vertices:
        opts = [
            w
            for w in tgt.vertices
            if tgt.genus[w] == src.genus[v]
            and tgt.classes[w] == src.classes[v]
            and valence(tgt, w) >= valence(src, v)
        ]
        if not opts:
            return []
        candidates[v] = opts

    results: list[CombinatorialMorphism] = []
    svs = list(src.vertices)

    def flag_assignments(vmap: dict[int, int]):
        per_vertex: list[list[dict[int, int]]] = []
        for v in svs:
            at_v = src.flags_at(v)
            tgt_at = tgt.flags_at(vmap[v])
            options = [dict(zip(at_v, pick)) for pick in permutations(tgt_at, len(at_v))]
            if not options:
                return
            per_vertex.append(options)
        for combo in product(*per_vertex):
            fmap: dict[int, int] = {}
            for d in combo:
                fmap.update(d)
            yield fmap

    count = 0
    for assignment in product(*(candidates[v] for v in svs)):
        vmap = dict(zip(svs, assignment))
        for fmap in flag_assignments(vmap):
            count += 1
            if count > cap:
                raise SizeCapError(f"morphism enumeration exceeded {cap} candidates")
            cand = CombinatorialMorphism(source=src, target=tgt, flagmap=fmap, vertexmap=vmap)
            if not validate_combinatorial(cand):
                results.append(cand)
    return results


@dataclass
class UniversalPropertyReport:
    sources_checked: int = 0
    morphisms_checked: int = 0
    counterexamples: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def _default_source_pool(g: MarkedGraph, limit: int) -> list[MarkedGraph]:
    """Stable graphs derived from g itself: its stabilization, components,
    edge cuts and stable tail forgets thereof."""
    from .graphs import component_of, connected_components, edges
    from .morphisms import cut_edge, forget_tail

    stable, _ = stabilize(g)
    pool: list[MarkedGraph] = [stable]
    for comp in connected_components(stable):
        pool.append(component_of(stable, min(comp)))
    for e in edges(stable):
        pool.append(cut_edge(stable, e)[0])
    for f in stable.flags:
        if stable.involution[f] == f:
            smaller, _ = forget_tail(stable, f)
            if is_stable(smaller):
                pool.append(smaller)
    return pool[:limit]


def check_universal_property(
    g: MarkedGraph,
    pool: Iterable[MarkedGraph] | None = None,
    pool_limit: int = 50,
    max_flags: int = 10,
) -> UniversalPropertyReport:
    """Certify by brute force that the stabilization is universal.

    For every stable graph in the pool, composition with the stabilization
    morphism must be a bijection between morphisms into the stabilization and
    morphisms into g.  Both hom-sets are enumerated exhaustively.
    """
    if len(g.flags) > max_flags:
        raise SizeCapError(f"universal property oracle capped at {max_flags} flags")
    stable, a = stabilize(g)
    report = UniversalPropertyReport()
    sources = list(pool) if pool is not None else _default_source_pool(g, pool_limit)
    for sigma in sources[:pool_limit]:
        if not is_stable(sigma):
            continue
        report.sources_checked += 1
        into_stable = enumerate_combinatorial_morphisms(sigma, stable)
        into_g = enumerate_combinatorial_morphisms(sigma, g)
        report.morphisms_checked += len(into_g)
        composed_keys = set()
        for c in into_stable:
            comp = compose_combinatorial(a, c)
            composed_keys.add((tuple(sorted(comp.flagmap.items())), tuple(sorted(comp.vertexmap.items()))))
        direct_keys = {
            (tuple(sorted(b.flagmap.items())), tuple(sorted(b.vertexmap.items()))) for b in into_g
        }
        if len(composed_keys) != len(into_stable):
            report.counterexamples.append(
                f"factorization not unique for source with {len(sigma.flags)} flags"
            )
        if composed_keys != direct_keys:
            report.counterexamples.append(
                f"hom-sets differ through stabilization for source with {len(sigma.flags)} flags: "
                f"{len(composed_keys)} composed vs {len(direct_keys)} direct"
            )
    return report
