"""The two morphism species on marked graphs.

A contraction collapses a set of edges: its flag map goes from the target's
flags back into the source's (injectively), its vertex map goes forward
(surjectively), and the genus of a target vertex absorbs the first Betti
number of the piece contracted onto it.

A combinatorial morphism maps flags and vertices forward, is injective on
the flags at each vertex, preserves genus and class, and is required to
preserve the flag equivalence generated by involution orbits and by genus
zero, class zero vertices.  Cutting an edge, forgetting a tail and including
a component are the basic examples.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import ValidationError, Violation, ensure_valid
from .graphs import (
    MarkedGraph,
    MonoidElement,
    betti1,
    edges,
    flag_partition,
    relabel_classes,
)
from .monoid import MonoidHom


@dataclass(frozen=True)
class Contraction:
    """Edge contraction source -> target.

    ``flagmap`` sends target flags into source flags (contravariant),
    ``vertexmap`` sends source vertices onto target vertices.
    """

    source: MarkedGraph
    target: MarkedGraph
    flagmap: dict[int, int]
    vertexmap: dict[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "flagmap", dict(self.flagmap))
        object.__setattr__(self, "vertexmap", dict(self.vertexmap))

    def contracted_flags(self) -> tuple[int, ...]:
        image = set(self.flagmap.values())
        return tuple(f for f in self.source.flags if f not in image)

    def contracted_edges(self) -> tuple[tuple[int, int], ...]:
        gone = set(self.contracted_flags())
        return tuple(e for e in edges(self.source) if e[0] in gone)

    def is_elementary(self) -> bool:
        return len(self.contracted_edges()) == 1


def validate_contraction(c: Contraction) -> list[Violation]:
    """Check all structural and marking conditions; empty list means valid."""
    out: list[Violation] = []
    src, tgt = c.source, c.target
    if src.rank != tgt.rank:
        out.append(Violation("contraction-rank", f"source rank {src.rank} != target rank {tgt.rank}"))
        return out
    if set(c.flagmap) != set(tgt.flags) or not set(c.flagmap.values()) <= set(src.flags):
        out.append(Violation("contraction-maps-total", "flag map must send exactly the target flags into source flags"))
        return out
    if set(c.vertexmap) != set(src.vertices) or not set(c.vertexmap.values()) <= set(tgt.vertices):
        out.append(Violation("contraction-maps-total", "vertex map must send exactly the source vertices into target vertices"))
        return out
    if len(set(c.flagmap.values())) != len(c.flagmap):
        out.append(Violation("contraction-1-injective", "flag map is not injective"))
    if set(c.vertexmap.values()) != set(tgt.vertices):
        out.append(Violation("contraction-1-surjective", "vertex map is not surjective"))
    for f, pre in c.flagmap.items():
        if c.vertexmap[src.boundary[pre]] != tgt.boundary[f]:
            out.append(Violation("contraction-2-boundary", f"boundary square fails at target flag {f}"))
            break
    for f, pre in c.flagmap.items():
        if c.flagmap[tgt.involution[f]] != src.involution[pre]:
            out.append(Violation("contraction-3-involution", f"involution square fails at target flag {f}"))
            break
    else:
        src_tails = {f for f in src.flags if src.involution[f] == f}
        tail_image = {c.flagmap[f] for f in tgt.flags if tgt.involution[f] == f}
        if tail_image != src_tails:
            out.append(Violation("contraction-4-tails", "tails do not correspond bijectively"))
    if out:
        return out

    # fibers must be exactly the connectivity classes of the contracted edges
    gone = set(c.contracted_flags())
    parent = {v: v for v in src.vertices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in gone:
        a, b = find(src.boundary[f]), find(src.boundary[src.involution[f]])
        if a != b:
            parent[a] = b
    fibers: dict[int, set[int]] = {}
    for v in src.vertices:
        fibers.setdefault(c.vertexmap[v], set()).add(v)
    classes: dict[int, set[int]] = {}
    for v in src.vertices:
        classes.setdefault(find(v), set()).add(v)
    if sorted(fibers.values(), key=min) != sorted(classes.values(), key=min):
        out.append(Violation("contraction-5-fibers", "vertex fibers differ from contracted-edge connectivity classes"))
        return out

    for v in sorted(fibers):
        piece = contracted_piece(c, v)
        expected_g = sum(src.genus[w] for w in fibers[v]) + betti1(piece)
        if tgt.genus[v] != expected_g:
            out.append(Violation("contraction-genus", f"genus at target vertex {v}: {tgt.genus[v]} != {expected_g}"))
        total = MonoidElement.zero(src.rank)
        for w in fibers[v]:
            total = total + src.classes[w]
        if tgt.classes[v] != total:
            out.append(Violation("contraction-class", f"class at target vertex {v} is not the fiber sum"))
    return out


def contracted_piece(c: Contraction, v: int) -> MarkedGraph:
    """The subgraph of the source being contracted onto target vertex v."""
    if v not in c.target.genus:
        raise KeyError(f"unknown target vertex id {v}")
    src = c.source
    gone = set(c.contracted_flags())
    fiber = {w for w in src.vertices if c.vertexmap[w] == v}
    fs = [f for f in src.flags if f in gone and src.boundary[f] in fiber]
    return MarkedGraph(
        flags=tuple(fs),
        vertices=tuple(sorted(fiber)),
        boundary={f: src.boundary[f] for f in fs},
        involution={f: src.involution[f] for f in fs},
        genus={w: src.genus[w] for w in fiber},
        classes={w: src.classes[w] for w in fiber},
        rank=src.rank,
    )


def contract_edges(g: MarkedGraph, edge_set: Iterable[tuple[int, int]]) -> Contraction:
    """Contract the given edges of g; deterministic target ids.

    Each fiber of merged vertices survives under its minimum vertex id, and
    the remaining flags keep their ids, so repeated runs and differently
    ordered elementary factorizations produce literally equal targets.
    """
    all_edges = set(edges(g))
    chosen = {tuple(sorted(e)) for e in edge_set}
    for e in chosen:
        if e not in all_edges:
            raise ValidationError([Violation("contraction-edge-unknown", f"{e} is not an edge")])
    gone = {f for e in chosen for f in e}
    parent = {v: v for v in g.vertices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f1, f2 in chosen:
        a, b = find(g.boundary[f1]), find(g.boundary[f2])
        if a != b:
            parent[a] = b
    fibers: dict[int, list[int]] = {}
    for v in g.vertices:
        fibers.setdefault(find(v), []).append(v)
    rep = {v: min(fiber) for fiber in fibers.values() for v in fiber}

    kept = [f for f in g.flags if f not in gone]
    sub_by_rep: dict[int, list[int]] = {}
    for v in g.vertices:
        sub_by_rep.setdefault(rep[v], []).append(v)

    tgt_genus: dict[int, int] = {}
    tgt_classes: dict[int, MonoidElement] = {}
    for r, fiber in sub_by_rep.items():
        fiber_flags = [f for f in gone if g.boundary[f] in set(fiber)]
        piece = MarkedGraph(
            flags=tuple(fiber_flags),
            vertices=tuple(fiber),
            boundary={f: g.boundary[f] for f in fiber_flags},
            involution={f: g.involution[f] for f in fiber_flags},
            genus={v: g.genus[v] for v in fiber},
            classes={v: g.classes[v] for v in fiber},
            rank=g.rank,
        )
        tgt_genus[r] = sum(g.genus[v] for v in fiber) + betti1(piece)
        total = MonoidElement.zero(g.rank)
        for v in fiber:
            total = total + g.classes[v]
        tgt_classes[r] = total

    target = MarkedGraph(
        flags=tuple(kept),
        vertices=tuple(sorted(sub_by_rep)),
        boundary={f: rep[g.boundary[f]] for f in kept},
        involution={f: g.involution[f] for f in kept},
        genus=tgt_genus,
        classes=tgt_classes,
        rank=g.rank,
    )
    c = Contraction(source=g, target=target, flagmap={f: f for f in kept}, vertexmap=dict(rep))
    ensure_valid(validate_contraction(c), "contract_edges produced an invalid contraction")
    return c


def identity_contraction(g: MarkedGraph) -> Contraction:
    return contract_edges(g, ())


def decompose_elementary(c: Contraction, order: Iterable[tuple[int, int]] | None = None) -> list[Contraction]:
    """Factor into single-edge contractions, ascending contracted-edge id.

    ``order`` overrides the default ordering; it must be a permutation of
    the contracted edge set.  When c contracts at least one edge the factors
    compose literally to c: the last factor is conjugated by the unique
    isomorphism between the deterministic chain target and c's own target.
    A contraction with no contracted edges (an isomorphism) decomposes into
    the empty list.
    """
    ensure_valid(validate_contraction(c), "cannot decompose an invalid contraction")
    if order is None:
        remaining = sorted(c.contracted_edges())
    else:
        remaining = [tuple(sorted(e)) for e in order]
        if sorted(remaining) != sorted(c.contracted_edges()):
            raise ValidationError([Violation("contraction-order", "order must permute the contracted edges")])
    if not remaining:
        return []
    factors: list[Contraction] = []
    current = c.source
    for e in remaining:
        step = contract_edges(current, [e])
        factors.append(step)
        current = step.target
    # retarget the final factor onto c.target via the unique isomorphism
    last = factors[-1]
    retargeted = Contraction(
        source=last.source,
        target=c.target,
        flagmap={t: last.flagmap[c.flagmap[t]] for t in c.target.flags},
        vertexmap={v: c.vertexmap[last.vertexmap[v]] for v in last.source.vertices},
    )
    ensure_valid(validate_contraction(retargeted), "retargeted elementary factor invalid")
    factors[-1] = retargeted
    return factors


def compose_contractions(outer: Contraction, inner: Contraction) -> Contraction:
    """outer o inner, defined when inner.target equals outer.source literally."""
    if inner.target != outer.source:
        raise ValidationError([Violation("contraction-compose-endpoints", "inner target differs from outer source")])
    composite = Contraction(
        source=inner.source,
        target=outer.target,
        flagmap={f: inner.flagmap[outer.flagmap[f]] for f in outer.target.flags},
        vertexmap={v: outer.vertexmap[inner.vertexmap[v]] for v in inner.source.vertices},
    )
    ensure_valid(validate_contraction(composite), "composite contraction invalid")
    return composite


@dataclass(frozen=True)
class CombinatorialMorphism:
    """Flag/vertex maps source -> target preserving the graph structure.

    ``hom`` is the optional marking homomorphism: when present, the source
    lives over the hom's target monoid, the target graph over its source
    monoid, and classes match after pushing the target's classes through.
    """

    source: MarkedGraph
    target: MarkedGraph
    flagmap: dict[int, int]
    vertexmap: dict[int, int]
    hom: MonoidHom | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "flagmap", dict(self.flagmap))
        object.__setattr__(self, "vertexmap", dict(self.vertexmap))

    def marked_target(self) -> MarkedGraph:
        """The target with classes pushed into the source's monoid."""
        return relabel_classes(self.target, self.hom) if self.hom is not None else self.target

    def is_complete(self) -> bool:
        """Bijective on the flags at every source vertex."""
        for v in self.source.vertices:
            at_v = self.source.flags_at(v)
            target_at = self.target.flags_at(self.vertexmap[v])
            if len({self.flagmap[f] for f in at_v}) != len(target_at):
                return False
        return True


def validate_combinatorial(a: CombinatorialMorphism) -> list[Violation]:
    out: list[Violation] = []
    src, tgt = a.source, a.target
    if a.hom is None:
        if src.rank != tgt.rank:
            out.append(Violation("combinatorial-rank", f"source rank {src.rank} != target rank {tgt.rank}"))
            return out
    else:
        if a.hom.source_rank != tgt.rank or a.hom.target_rank != src.rank:
            out.append(Violation("combinatorial-rank", "marking homomorphism ranks do not match the graphs"))
            return out
    if set(a.flagmap) != set(src.flags) or not set(a.flagmap.values()) <= set(tgt.flags):
        out.append(Violation("combinatorial-maps-total", "flag map must send exactly the source flags into target flags"))
        return out
    if set(a.vertexmap) != set(src.vertices) or not set(a.vertexmap.values()) <= set(tgt.vertices):
        out.append(Violation("combinatorial-maps-total", "vertex map must send exactly the source vertices into target vertices"))
        return out
    for f in src.flags:
        if tgt.boundary[a.flagmap[f]] != a.vertexmap[src.boundary[f]]:
            out.append(Violation("combinatorial-1-boundary", f"boundary square fails at flag {f}"))
            break
    for v in src.vertices:
        at_v = src.flags_at(v)
        if len({a.flagmap[f] for f in at_v}) != len(at_v):
            out.append(Violation("combinatorial-2-injective", f"flag map not injective at vertex {v}"))
            break
    marked = a.marked_target()
    part = flag_partition(marked)
    for f1, f2 in edges(src):
        if not part.same_block(a.flagmap[f1], a.flagmap[f2]):
            out.append(Violation("combinatorial-3-equivalence", f"edge ({f1},{f2}) maps to inequivalent flags"))
            break
    for v in src.vertices:
        if src.classes[v] != marked.classes[a.vertexmap[v]]:
            out.append(Violation("combinatorial-4-class", f"class mismatch at vertex {v}"))
            break
    for v in src.vertices:
        if src.genus[v] != tgt.genus[a.vertexmap[v]]:
            out.append(Violation("combinatorial-5-genus", f"genus mismatch at vertex {v}"))
            break
    return out


def identity_combinatorial(g: MarkedGraph) -> CombinatorialMorphism:
    return CombinatorialMorphism(
        source=g, target=g, flagmap={f: f for f in g.flags}, vertexmap={v: v for v in g.vertices}
    )


def compose_combinatorial(outer: CombinatorialMorphism, inner: CombinatorialMorphism) -> CombinatorialMorphism:
    """outer o inner; marking homs compose as inner.hom o outer.hom.

    The marking hom of a morphism points from the target's monoid to the
    source's, so along a composite source -> mid -> target the homs compose
    the other way around.
    """
    if inner.target != outer.source:
        raise ValidationError([Violation("combinatorial-compose-endpoints", "inner target differs from outer source")])
    if inner.hom is None and outer.hom is None:
        hom = None
    else:
        inner_hom = inner.hom or MonoidHom.identity(inner.source.rank)
        outer_hom = outer.hom or MonoidHom.identity(outer.source.rank)
        hom = inner_hom.compose(outer_hom)
    composite = CombinatorialMorphism(
        source=inner.source,
        target=outer.target,
        flagmap={f: outer.flagmap[inner.flagmap[f]] for f in inner.source.flags},
        vertexmap={v: outer.vertexmap[inner.vertexmap[v]] for v in inner.source.vertices},
        hom=hom,
    )
    ensure_valid(validate_combinatorial(composite), "composite combinatorial morphism invalid")
    return composite


# -- basic constructions -------------------------------------------------


def cut_edge(g: MarkedGraph, edge: tuple[int, int]) -> tuple[MarkedGraph, CombinatorialMorphism]:
    """Cut one edge into two tails; returns (cut graph, morphism cut -> g)."""
    f1, f2 = edge
    if g.involution.get(f1) != f2 or f1 == f2:
        raise ValidationError([Violation("cut-not-edge", f"({f1},{f2}) is not an edge")])
    involution = dict(g.involution)
    involution[f1] = f1
    involution[f2] = f2
    cut = MarkedGraph(g.flags, g.vertices, g.boundary, involution, g.genus, g.classes, g.rank)
    a = CombinatorialMorphism(
        source=cut, target=g, flagmap={f: f for f in g.flags}, vertexmap={v: v for v in g.vertices}
    )
    ensure_valid(validate_combinatorial(a), "cut_edge morphism invalid")
    return cut, a


def forget_tail(g: MarkedGraph, f: int) -> tuple[MarkedGraph, CombinatorialMorphism]:
    """Drop one tail flag; the result may be unstable.

    Returns (smaller graph, inclusion morphism into g).
    """
    if f not in g.boundary or g.involution[f] != f:
        raise ValidationError([Violation("forget-not-tail", f"{f} is not a tail")])
    kept = tuple(x for x in g.flags if x != f)
    smaller = MarkedGraph(
        flags=kept,
        vertices=g.vertices,
        boundary={x: g.boundary[x] for x in kept},
        involution={x: g.involution[x] for x in kept},
        genus=g.genus,
        classes=g.classes,
        rank=g.rank,
    )
    a = CombinatorialMorphism(
        source=smaller, target=g, flagmap={x: x for x in kept}, vertexmap={v: v for v in g.vertices}
    )
    ensure_valid(validate_combinatorial(a), "forget_tail morphism invalid")
    return smaller, a


def glue_tails(g: MarkedGraph, f: int, fbar: int) -> tuple[MarkedGraph, CombinatorialMorphism]:
    """Join two tails into an edge; returns (glued graph, morphism g -> glued)."""
    if f == fbar or g.involution.get(f) != f or g.involution.get(fbar) != fbar:
        raise ValidationError([Violation("glue-not-tails", f"{f} and {fbar} must be distinct tails")])
    involution = dict(g.involution)
    involution[f] = fbar
    involution[fbar] = f
    glued = MarkedGraph(g.flags, g.vertices, g.boundary, involution, g.genus, g.classes, g.rank)
    c = CombinatorialMorphism(
        source=g, target=glued, flagmap={x: x for x in g.flags}, vertexmap={v: v for v in g.vertices}
    )
    ensure_valid(validate_combinatorial(c), "glue_tails morphism invalid")
    return glued, c


def add_tail(g: MarkedGraph, v: int, flag_id: int | None = None) -> tuple[MarkedGraph, int]:
    """Attach a fresh tail at vertex v; returns (bigger graph, new flag id)."""
    if v not in g.genus:
        raise KeyError(f"unknown vertex id {v}")
    new = flag_id if flag_id is not None else ((max(g.flags) + 1) if g.flags else 0)
    if new in g.boundary:
        raise ValueError(f"flag id {new} already in use")
    bigger = MarkedGraph(
        flags=g.flags + (new,),
        vertices=g.vertices,
        boundary={**g.boundary, new: v},
        involution={**g.involution, new: new},
        genus=g.genus,
        classes=g.classes,
        rank=g.rank,
    )
    return bigger, new


def component_inclusion(g: MarkedGraph, component: MarkedGraph) -> CombinatorialMorphism:
    """Inclusion of a subgraph whose flags and vertices keep their ids."""
    a = CombinatorialMorphism(
        source=component,
        target=g,
        flagmap={f: f for f in component.flags},
        vertexmap={v: v for v in component.vertices},
    )
    ensure_valid(validate_combinatorial(a), "component inclusion invalid")
    return a
