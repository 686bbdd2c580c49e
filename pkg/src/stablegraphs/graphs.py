"""Marked modular graphs: flags, vertices, involution, boundary, genus, class.

A graph is a finite set of flags (half-edges) F, a finite set of vertices V,
a boundary map F -> V attaching each flag to a vertex, and an involution
j: F -> F.  Fixed points of j are tails, two-element orbits are edges.  A
marked graph additionally carries a genus label and a class in N^k at each
vertex; rank 0 recovers plain modular graphs (genus labels only).

Flag ids and vertex ids are opaque small integers in two independent
namespaces.  All values are immutable after construction; every operation
returns fresh graphs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import RankMismatchError, Violation, ensure_valid
from .monoid import MonoidElement, MonoidHom


@dataclass(frozen=True)
class MarkedGraph:
    flags: tuple[int, ...]
    vertices: tuple[int, ...]
    boundary: dict[int, int]
    involution: dict[int, int]
    genus: dict[int, int]
    classes: dict[int, MonoidElement]
    rank: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "flags", tuple(sorted(self.flags)))
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices)))
        object.__setattr__(self, "boundary", dict(self.boundary))
        object.__setattr__(self, "involution", dict(self.involution))
        object.__setattr__(self, "genus", dict(self.genus))
        object.__setattr__(self, "classes", dict(self.classes))
        ensure_valid(self._structural_violations(), "invalid graph")

    def _structural_violations(self) -> list[Violation]:
        out: list[Violation] = []
        fset, vset = set(self.flags), set(self.vertices)
        if len(fset) != len(self.flags):
            out.append(Violation("flag-duplicate", "flag ids repeat"))
        if len(vset) != len(self.vertices):
            out.append(Violation("vertex-duplicate", "vertex ids repeat"))
        if set(self.boundary) != fset:
            out.append(Violation("boundary-total", "boundary map not defined on exactly the flag set"))
        elif not set(self.boundary.values()) <= vset:
            out.append(Violation("boundary-total", "boundary map hits unknown vertex"))
        if set(self.involution) != fset:
            out.append(Violation("j-total", "involution not defined on exactly the flag set"))
        else:
            if not set(self.involution.values()) <= fset:
                out.append(Violation("j-involution", "involution hits unknown flag"))
            elif any(self.involution[self.involution[f]] != f for f in self.flags):
                out.append(Violation("j-involution", "involution composed with itself is not the identity"))
        if set(self.genus) != vset:
            out.append(Violation("genus-total", "genus map not defined on exactly the vertex set"))
        elif any(g < 0 for g in self.genus.values()):
            out.append(Violation("genus-negative", "vertex genus must be non-negative"))
        if set(self.classes) != vset:
            out.append(Violation("class-total", "class map not defined on exactly the vertex set"))
        elif any(c.rank != self.rank for c in self.classes.values()):
            out.append(Violation("class-rank", "vertex class has wrong monoid rank"))
        return out

    # -- basic accessors -------------------------------------------------

    def partner(self, f: int) -> int:
        return self.involution[f]

    def is_tail(self, f: int) -> bool:
        return self.involution[f] == f

    def flags_at(self, v: int) -> tuple[int, ...]:
        if v not in self.genus:
            raise KeyError(f"unknown vertex id {v}")
        return tuple(f for f in self.flags if self.boundary[f] == v)

    def num_flags(self) -> int:
        return len(self.flags)

    def class_of(self, v: int) -> MonoidElement:
        return self.classes[v]


def marked_graph(
    rank: int,
    vertices: Mapping[int, tuple[int, int | tuple[int, ...] | MonoidElement | None]],
    tails: Mapping[int, int] | None = None,
    edges: Iterable[tuple[tuple[int, int], tuple[int, int]]] | None = None,
) -> MarkedGraph:
    """Build a graph from vertex data plus tail and edge attachments.

    ``vertices`` maps vertex id to ``(genus, class)``, where class may be an
    int (rank 1), a coordinate tuple, a MonoidElement, or None for zero.
    ``tails`` maps flag id to vertex id.  ``edges`` lists pairs
    ``((f1, v1), (f2, v2))`` joining flag f1 at v1 to flag f2 at v2.
    """
    boundary: dict[int, int] = {}
    involution: dict[int, int] = {}
    genus: dict[int, int] = {}
    classes: dict[int, MonoidElement] = {}
    for v, (g, cls) in vertices.items():
        genus[v] = g
        if cls is None:
            classes[v] = MonoidElement.zero(rank)
        elif isinstance(cls, MonoidElement):
            classes[v] = cls
        elif isinstance(cls, int):
            if rank == 0:
                if cls != 0:
                    raise RankMismatchError("non-zero class on a rank-0 graph")
                classes[v] = MonoidElement(())
            else:
                classes[v] = MonoidElement((cls,) + (0,) * (rank - 1))
        else:
            classes[v] = MonoidElement(tuple(cls))
    for f, v in (tails or {}).items():
        boundary[f] = v
        involution[f] = f
    for (f1, v1), (f2, v2) in edges or ():
        boundary[f1] = v1
        boundary[f2] = v2
        involution[f1] = f2
        involution[f2] = f1
    return MarkedGraph(
        flags=tuple(boundary),
        vertices=tuple(genus),
        boundary=boundary,
        involution=involution,
        genus=genus,
        classes=classes,
        rank=rank,
    )


def modular_graph(vertices, tails=None, edges=None) -> MarkedGraph:
    """Rank-0 graph: vertices map to genus only, classes are all trivial."""
    return marked_graph(0, {v: (g, None) for v, g in vertices.items()}, tails, edges)


def empty_graph(rank: int = 0) -> MarkedGraph:
    return MarkedGraph((), (), {}, {}, {}, {}, rank)


# -- invariants ----------------------------------------------------------


def tails(g: MarkedGraph) -> tuple[int, ...]:
    return tuple(f for f in g.flags if g.involution[f] == f)


def edges(g: MarkedGraph) -> tuple[tuple[int, int], ...]:
    """Two-element involution orbits as sorted (min, max) pairs, sorted."""
    out = set()
    for f in g.flags:
        p = g.involution[f]
        if p != f:
            out.add((min(f, p), max(f, p)))
    return tuple(sorted(out))


def valence(g: MarkedGraph, v: int) -> int:
    return len(g.flags_at(v))


def connected_components(g: MarkedGraph) -> tuple[frozenset[int], ...]:
    """Partition of the vertex set by edge paths, sorted by smallest member."""
    parent = {v: v for v in g.vertices}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f1, f2 in edges(g):
        a, b = find(g.boundary[f1]), find(g.boundary[f2])
        if a != b:
            parent[a] = b
    groups: dict[int, set[int]] = {}
    for v in g.vertices:
        groups.setdefault(find(v), set()).add(v)
    return tuple(sorted((frozenset(s) for s in groups.values()), key=min))


def betti1(g: MarkedGraph) -> int:
    """Cycle rank of the realization: #E - #V + #components."""
    return len(edges(g)) - len(g.vertices) + len(connected_components(g))


def euler_characteristic(g: MarkedGraph) -> int:
    """chi of the realization minus the total genus; chi(|g|) = #components - betti1."""
    return (len(connected_components(g)) - betti1(g)) - sum(g.genus.values())


def genus(g: MarkedGraph) -> int:
    """Genus 1 - chi, defined for non-empty connected graphs only."""
    if not g.vertices:
        raise ValueError("genus undefined for the empty graph")
    if len(connected_components(g)) != 1:
        raise ValueError("genus undefined for disconnected graphs")
    return 1 - euler_characteristic(g)


def total_class(g: MarkedGraph) -> MonoidElement:
    total = MonoidElement.zero(g.rank)
    for v in g.vertices:
        total = total + g.classes[v]
    return total


def is_stable_vertex(g: MarkedGraph, v: int) -> bool:
    """A vertex with trivial class must satisfy 2*genus + valence >= 3."""
    if not g.classes[v].is_zero():
        return True
    return 2 * g.genus[v] + valence(g, v) >= 3


def is_stable(g: MarkedGraph) -> bool:
    return all(is_stable_vertex(g, v) for v in g.vertices)


def unstable_vertices(g: MarkedGraph) -> tuple[int, ...]:
    return tuple(v for v in g.vertices if not is_stable_vertex(g, v))


def is_forest(g: MarkedGraph) -> bool:
    """No cycles and no higher-genus vertices (tree level)."""
    return betti1(g) == 0 and all(gv == 0 for gv in g.genus.values())


@dataclass(frozen=True)
class FlagPartition:
    """Partition of the flag set; blocks sorted, each block a sorted tuple."""

    blocks: tuple[tuple[int, ...], ...]
    _index: dict[int, int] = field(compare=False, default_factory=dict)

    def __post_init__(self) -> None:
        idx = {f: i for i, block in enumerate(self.blocks) for f in block}
        object.__setattr__(self, "_index", idx)

    def block_of(self, f: int) -> tuple[int, ...]:
        return self.blocks[self._index[f]]

    def same_block(self, f1: int, f2: int) -> bool:
        return self._index[f1] == self._index[f2]


def is_free_vertex(g: MarkedGraph, v: int) -> bool:
    """Genus zero and trivial class: marked points on it may be permuted freely."""
    return g.genus[v] == 0 and g.classes[v].is_zero()


def flag_partition(g: MarkedGraph) -> FlagPartition:
    """Finest partition joining involution orbits and, at every genus-zero
    class-zero vertex, all flags attached there."""
    parent = {f: f for f in g.flags}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for f in g.flags:
        union(f, g.involution[f])
    for v in g.vertices:
        if is_free_vertex(g, v):
            at_v = g.flags_at(v)
            for f in at_v[1:]:
                union(at_v[0], f)
    groups: dict[int, list[int]] = {}
    for f in g.flags:
        groups.setdefault(find(f), []).append(f)
    return FlagPartition(tuple(sorted(tuple(sorted(b)) for b in groups.values())))


# -- constructions -------------------------------------------------------


def relabel_classes(g: MarkedGraph, hom: MonoidHom) -> MarkedGraph:
    """Push every vertex class through a monoid homomorphism."""
    if hom.source_rank != g.rank:
        raise RankMismatchError(f"hom source rank {hom.source_rank} != graph rank {g.rank}")
    return MarkedGraph(
        g.flags, g.vertices, g.boundary, g.involution, g.genus,
        {v: hom(c) for v, c in g.classes.items()}, hom.target_rank,
    )


def forget_marking(g: MarkedGraph) -> MarkedGraph:
    """The underlying modular graph: same shape and genera, rank-0 classes."""
    return relabel_classes(g, MonoidHom.to_trivial(g.rank))


def disjoint_union_with_maps(
    a: MarkedGraph, b: MarkedGraph
) -> tuple[MarkedGraph, dict[int, int], dict[int, int], dict[int, int], dict[int, int]]:
    """Disjoint union with fresh ids for the second summand.

    Returns (union, a_flagmap, a_vertexmap, b_flagmap, b_vertexmap) embedding
    each summand.  The first summand keeps its ids; the second is shifted past
    the first's maxima, so the construction is deterministic.
    """
    if a.rank != b.rank:
        raise RankMismatchError(f"cannot union graphs of rank {a.rank} and {b.rank}")
    foff = (max(a.flags) + 1) if a.flags else 0
    voff = (max(a.vertices) + 1) if a.vertices else 0
    bshift = min(b.flags) if b.flags else 0
    vshift = min(b.vertices) if b.vertices else 0
    a_f = {f: f for f in a.flags}
    a_v = {v: v for v in a.vertices}
    b_f = {f: f - bshift + foff for f in b.flags}
    b_v = {v: v - vshift + voff for v in b.vertices}
    union = MarkedGraph(
        flags=a.flags + tuple(b_f[f] for f in b.flags),
        vertices=a.vertices + tuple(b_v[v] for v in b.vertices),
        boundary={**a.boundary, **{b_f[f]: b_v[v] for f, v in b.boundary.items()}},
        involution={**a.involution, **{b_f[f]: b_f[p] for f, p in b.involution.items()}},
        genus={**a.genus, **{b_v[v]: g for v, g in b.genus.items()}},
        classes={**a.classes, **{b_v[v]: c for v, c in b.classes.items()}},
        rank=a.rank,
    )
    return union, a_f, a_v, b_f, b_v


def disjoint_union(a: MarkedGraph, b: MarkedGraph) -> MarkedGraph:
    return disjoint_union_with_maps(a, b)[0]


def fresh_flag_ids(g: MarkedGraph, count: int) -> list[int]:
    start = (max(g.flags) + 1) if g.flags else 0
    return list(range(start, start + count))


def fresh_vertex_ids(g: MarkedGraph, count: int) -> list[int]:
    start = (max(g.vertices) + 1) if g.vertices else 0
    return list(range(start, start + count))


def induced_subgraph(g: MarkedGraph, vertex_set: Iterable[int]) -> MarkedGraph:
    """Subgraph on the given vertices, keeping every flag attached to them.

    Flags whose partner lies outside the vertex set become tails.
    """
    vs = set(vertex_set)
    fs = [f for f in g.flags if g.boundary[f] in vs]
    fset = set(fs)
    return MarkedGraph(
        flags=tuple(fs),
        vertices=tuple(v for v in g.vertices if v in vs),
        boundary={f: g.boundary[f] for f in fs},
        involution={f: (g.involution[f] if g.involution[f] in fset else f) for f in fs},
        genus={v: g.genus[v] for v in vs},
        classes={v: g.classes[v] for v in vs},
        rank=g.rank,
    )


def component_of(g: MarkedGraph, v: int) -> MarkedGraph:
    for comp in connected_components(g):
        if v in comp:
            return induced_subgraph(g, comp)
    raise KeyError(f"unknown vertex id {v}")
