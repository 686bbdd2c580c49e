"""Canonical labelling and isomorphism testing for small marked graphs.

Graphs in this calculus are tiny (a configurable cap, 16 flags by default),
so we canonicalise by exhaustive search over vertex orderings instead of
anything clever.  The search space is cut down in three ways:

* components are canonicalised independently and then sorted, so symmetric
  unions of many small pieces never multiply into one big search;
* vertices are first partitioned by an iterated invariant refinement
  (genus, class, valence, tail/loop counts, then neighbour signatures), and
  only orderings respecting the partition are tried;
* for a fixed vertex ordering the flag numbering is forced by a
  deterministic grouping rule, so no search happens at flag level.

Flags and vertices may additionally carry "colors" (arbitrary hashable
decorations).  Colors participate in the refinement and in the final
encoding, which lets callers compare whole diagrams, i.e. graphs together
with maps into fixed external graphs, up to isomorphism: relabel only the
middle graph and record the maps as colors.
"""

from __future__ import annotations

from itertools import permutations, product
from typing import Hashable, Mapping

from .errors import SizeCapError
from .graphs import MarkedGraph, connected_components, induced_subgraph

DEFAULT_MAX_FLAGS = 16

Encoding = tuple
Labeling = tuple[dict[int, int], dict[int, int]]  # flag -> slot, vertex -> slot


def _vertex_classes(
    g: MarkedGraph,
    vertex_order_universe: list[int],
    flag_colors: Mapping[int, Hashable],
    vertex_colors: Mapping[int, Hashable],
) -> list[list[int]]:
    """Partition vertices into invariant classes, refined to a fixed point."""

    def base_inv(v: int):
        at_v = [f for f in g.flags if g.boundary[f] == v]
        ntails = sum(1 for f in at_v if g.involution[f] == f)
        nloops = sum(1 for f in at_v if g.involution[f] != f and g.boundary[g.involution[f]] == v)
        fcols = tuple(sorted(repr(flag_colors.get(f)) for f in at_v))
        return (
            g.genus[v],
            g.classes[v].coords,
            len(at_v),
            ntails,
            nloops,
            repr(vertex_colors.get(v)),
            fcols,
        )

    inv = {v: base_inv(v) for v in vertex_order_universe}
    while True:
        refined = {}
        for v in vertex_order_universe:
            nbrs = []
            for f in g.flags:
                if g.boundary[f] == v and g.involution[f] != f:
                    w = g.boundary[g.involution[f]]
                    if w != v:
                        nbrs.append(inv[w])
            refined[v] = (inv[v], tuple(sorted(map(repr, nbrs))))
        old_sizes = sorted(map(repr, inv.values()))
        new_sizes = sorted(map(repr, refined.values()))
        if len(set(old_sizes)) == len(set(new_sizes)):
            break
        inv = refined
    classes: dict[str, list[int]] = {}
    for v in vertex_order_universe:
        classes.setdefault(repr(inv[v]), []).append(v)
    return [classes[k] for k in sorted(classes)]


def _encode_with_vertex_order(
    g: MarkedGraph,
    order: list[int],
    flag_colors: Mapping[int, Hashable],
    vertex_colors: Mapping[int, Hashable],
) -> tuple[Encoding, Labeling]:
    """Deterministic encoding of the graph for a fixed vertex ordering.

    Flags are numbered vertex by vertex.  Within a vertex the groups come in
    the order: flags paired to already-numbered flags (sorted by partner
    slot), tails, loops (halves paired adjacently), then flags pointing at
    later vertices (grouped by the target's position).  Interchangeable
    flags within a group are distinguished only by color.
    """
    vpos = {v: i for i, v in enumerate(order)}
    fslot: dict[int, int] = {}
    next_slot = 0
    for v in order:
        at_v = [f for f in g.flags if g.boundary[f] == v]
        back, tails_here, loops, forward = [], [], [], []
        for f in at_v:
            p = g.involution[f]
            if p == f:
                tails_here.append(f)
            elif p in fslot:
                back.append(f)
            elif g.boundary[p] == v:
                loops.append(f)
            else:
                forward.append(f)
        back.sort(key=lambda f: fslot[g.involution[f]])
        tails_here.sort(key=lambda f: (repr(flag_colors.get(f)), f))
        # pair the halves of each loop adjacently, loops ordered by color
        loop_pairs = []
        seen = set()
        for f in loops:
            if f in seen:
                continue
            p = g.involution[f]
            seen.add(f)
            seen.add(p)
            h1, h2 = sorted((f, p), key=lambda x: (repr(flag_colors.get(x)), x))
            loop_pairs.append((h1, h2))
        loop_pairs.sort(key=lambda pr: (repr(flag_colors.get(pr[0])), repr(flag_colors.get(pr[1]))))
        loops_flat = [x for pr in loop_pairs for x in pr]
        forward.sort(
            key=lambda f: (
                vpos[g.boundary[g.involution[f]]],
                repr(flag_colors.get(f)),
                repr(flag_colors.get(g.involution[f])),
                f,
            )
        )
        for f in back + tails_here + loops_flat + forward:
            fslot[f] = next_slot
            next_slot += 1
    enc = (
        len(order),
        next_slot,
        tuple((g.genus[v], g.classes[v].coords) for v in order),
        tuple(vpos[g.boundary[f]] for f in sorted(fslot, key=fslot.get)),
        tuple(fslot[g.involution[f]] for f in sorted(fslot, key=fslot.get)),
        tuple(repr(vertex_colors.get(v)) for v in order),
        tuple(repr(flag_colors.get(f)) for f in sorted(fslot, key=fslot.get)),
    )
    return enc, (fslot, dict(vpos))


def _component_best(
    g: MarkedGraph,
    comp_vertices: list[int],
    flag_colors: Mapping[int, Hashable],
    vertex_colors: Mapping[int, Hashable],
    search_cap: int,
) -> tuple[Encoding, Labeling]:
    classes = _vertex_classes(g, comp_vertices, flag_colors, vertex_colors)
    total = 1
    for c in classes:
        for i in range(2, len(c) + 1):
            total *= i
        if total > search_cap:
            raise SizeCapError(f"canonical labelling search space exceeds {search_cap} orderings")
    best: tuple[Encoding, Labeling] | None = None
    for perm_choice in product(*(permutations(c) for c in classes)):
        order = [v for group in perm_choice for v in group]
        enc, lab = _encode_with_vertex_order(g, order, flag_colors, vertex_colors)
        if best is None or enc < best[0]:
            best = (enc, lab)
    assert best is not None
    return best


def canonical_encoding(
    g: MarkedGraph,
    flag_colors: Mapping[int, Hashable] | None = None,
    vertex_colors: Mapping[int, Hashable] | None = None,
    max_flags: int = DEFAULT_MAX_FLAGS,
    search_cap: int = 2_000_000,
) -> tuple[Encoding, Labeling]:
    """Minimal encoding over all admissible labellings, plus one witness.

    The witness labelling maps original flag/vertex ids to slots 0..n-1.
    Isomorphic graphs (with matching colors under the isomorphism) yield
    equal encodings, and conversely.
    """
    if len(g.flags) > max_flags:
        raise SizeCapError(f"graph has {len(g.flags)} flags, cap is {max_flags}")
    fc = flag_colors or {}
    vc = vertex_colors or {}
    pieces = []
    for comp in connected_components(g):
        sub = induced_subgraph(g, comp)
        enc, (fslot, vslot) = _component_best(sub, list(sub.vertices), fc, vc, search_cap)
        pieces.append((enc, fslot, vslot))
    pieces.sort(key=lambda p: p[0])
    flag_lab: dict[int, int] = {}
    vertex_lab: dict[int, int] = {}
    foff = voff = 0
    shifted = []
    for enc, fslot, vslot in pieces:
        for f, s in fslot.items():
            flag_lab[f] = s + foff
        for v, s in vslot.items():
            vertex_lab[v] = s + voff
        shifted.append(enc)
        voff += enc[0]
        foff += enc[1]
    return (g.rank, len(g.vertices), len(g.flags), tuple(shifted)), (flag_lab, vertex_lab)


def canonicalize(g: MarkedGraph, max_flags: int = DEFAULT_MAX_FLAGS) -> tuple[MarkedGraph, dict[int, int], dict[int, int]]:
    """Relabel onto slots 0..n-1 canonically; returns (graph, flagmap, vertexmap)."""
    _, (fmap, vmap) = canonical_encoding(g, max_flags=max_flags)
    canon = MarkedGraph(
        flags=tuple(fmap[f] for f in g.flags),
        vertices=tuple(vmap[v] for v in g.vertices),
        boundary={fmap[f]: vmap[v] for f, v in g.boundary.items()},
        involution={fmap[f]: fmap[p] for f, p in g.involution.items()},
        genus={vmap[v]: gen for v, gen in g.genus.items()},
        classes={vmap[v]: c for v, c in g.classes.items()},
        rank=g.rank,
    )
    return canon, fmap, vmap


def canonical_form(g: MarkedGraph, max_flags: int = DEFAULT_MAX_FLAGS) -> MarkedGraph:
    return canonicalize(g, max_flags)[0]


def canonical_key(g: MarkedGraph, max_flags: int = DEFAULT_MAX_FLAGS) -> Encoding:
    """Hashable isomorphism invariant: equal keys iff isomorphic graphs."""
    return canonical_encoding(g, max_flags=max_flags)[0]


def is_isomorphic(a: MarkedGraph, b: MarkedGraph, max_flags: int = DEFAULT_MAX_FLAGS) -> bool:
    if a.rank != b.rank or len(a.flags) != len(b.flags) or len(a.vertices) != len(b.vertices):
        return False
    return canonical_key(a, max_flags) == canonical_key(b, max_flags)


def diagram_key(
    g: MarkedGraph,
    flag_decorations: Mapping[int, Hashable] | None = None,
    vertex_decorations: Mapping[int, Hashable] | None = None,
    max_flags: int = DEFAULT_MAX_FLAGS,
) -> Encoding:
    """Isomorphism invariant of a graph decorated with maps to fixed targets.

    Two diagrams around middle graphs g and g' (with identical external
    objects) are isomorphic exactly when their keys agree: the decorations
    pin down how each flag and vertex maps outward, and only the middle
    graph is relabelled.
    """
    return canonical_encoding(g, flag_decorations, vertex_decorations, max_flags=max_flags)[0]
