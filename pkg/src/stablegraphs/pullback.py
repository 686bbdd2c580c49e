"""Stable pullback and the category of marked stable graphs.

A morphism (A, tau) -> (B, sigma) is a quadruple: a monoid homomorphism
xi: A -> B, a stable B-graph mid, a combinatorial morphism mid -> tau
covering xi, and a contraction mid -> sigma.  Composition lifts the middle
combinatorial morphism across the other morphism's contraction via the
stable pullback construction, one elementary contraction at a time:

* pulling back across a loop contraction attaches a loop (and drops the
  genus by one) at every vertex lying over the contraction target;
* pulling back across a non-loop edge contraction splits every vertex lying
  over the target into two halves joined by a new edge, distributing its
  flags by where they go in the contraction source, and re-contracts any
  split whose halves would be unstable.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError, Violation, ensure_valid
from .graphs import MarkedGraph, is_stable, relabel_classes
from .monoid import MonoidHom
from .morphisms import (
    CombinatorialMorphism,
    Contraction,
    compose_combinatorial,
    compose_contractions,
    decompose_elementary,
    identity_combinatorial,
    identity_contraction,
    validate_combinatorial,
    validate_contraction,
)


@dataclass(frozen=True)
class MarkedMorphism:
    """Morphism (A, tau) -> (B, sigma) in the marked stable graph category."""

    hom: MonoidHom  # xi: A -> B
    comb: CombinatorialMorphism  # mid -> tau, covering xi
    mid: MarkedGraph  # stable B-graph
    contr: Contraction  # mid -> sigma

    @property
    def source_graph(self) -> MarkedGraph:
        return self.comb.target

    @property
    def target_graph(self) -> MarkedGraph:
        return self.contr.target


def validate_marked(m: MarkedMorphism) -> list[Violation]:
    out: list[Violation] = []
    if m.comb.source != m.mid or m.contr.source != m.mid:
        out.append(Violation("marked-middle", "combinatorial part and contraction must share the middle graph"))
        return out
    if not is_stable(m.mid):
        out.append(Violation("marked-middle-unstable", "middle graph must be stable"))
    if m.comb.hom != m.hom:
        out.append(Violation("marked-hom", "combinatorial part does not cover the stored homomorphism"))
    out.extend(validate_combinatorial(m.comb))
    out.extend(validate_contraction(m.contr))
    return out


def check_marked(m: MarkedMorphism) -> None:
    ensure_valid(validate_marked(m), "invalid marked morphism")


def identity_marked(g: MarkedGraph) -> MarkedMorphism:
    if not is_stable(g):
        raise ValidationError([Violation("marked-unstable", "identity morphism needs a stable graph")])
    ident = identity_combinatorial(g)
    return MarkedMorphism(
        hom=MonoidHom.identity(g.rank),
        comb=CombinatorialMorphism(
            source=g, target=g, flagmap=dict(ident.flagmap), vertexmap=dict(ident.vertexmap),
            hom=MonoidHom.identity(g.rank),
        ),
        mid=g,
        contr=identity_contraction(g),
    )


def _route_flag(phi: Contraction, a: CombinatorialMorphism, f: int) -> int:
    """Where a rho-flag lands in the contraction source: phi^F after a."""
    return phi.flagmap[a.flagmap[f]]


def _elementary_pullback(
    xi: MonoidHom, phi: Contraction, a: CombinatorialMorphism
) -> tuple[MarkedGraph, Contraction, CombinatorialMorphism]:
    """Pull a morphism rho -> target back across one elementary contraction.

    phi: sigma -> tau contracts a single edge; a: rho -> tau covers xi with
    rho stable.  Returns (pi, psi: pi -> rho, b: pi -> sigma covering xi).
    """
    sigma, tau, rho = phi.source, phi.target, a.source
    if not phi.is_elementary():
        raise ValidationError([Violation("pullback-not-elementary", "internal step expects one contracted edge")])
    f, fbar = phi.contracted_edges()[0]
    v1, v2 = sigma.boundary[f], sigma.boundary[fbar]
    (v0,) = {phi.vertexmap[v1], phi.vertexmap[v2]}
    over = [w for w in rho.vertices if a.vertexmap[w] == v0]

    inv_vertexmap = {}
    for v in sigma.vertices:
        inv_vertexmap.setdefault(phi.vertexmap[v], v)

    if v1 == v2:
        # loop contraction: hang a loop off every vertex over v0, dropping genus
        for w in over:
            if rho.genus[w] < 1:
                raise ValidationError(
                    [Violation("pullback-loop-genus", f"vertex {w} over a contracted loop must have genus >= 1")]
                )
        flags = list(rho.flags)
        boundary = dict(rho.boundary)
        involution = dict(rho.involution)
        genus = dict(rho.genus)
        b_flagmap = {x: phi.flagmap[a.flagmap[x]] for x in rho.flags}
        next_id = (max(rho.flags) + 1) if rho.flags else 0
        for w in sorted(over):
            l1, l2 = next_id, next_id + 1
            next_id += 2
            flags += [l1, l2]
            boundary[l1] = boundary[l2] = w
            involution[l1] = l2
            involution[l2] = l1
            genus[w] -= 1
            b_flagmap[l1] = f
            b_flagmap[l2] = fbar
        pi = MarkedGraph(
            flags=tuple(flags),
            vertices=rho.vertices,
            boundary=boundary,
            involution=involution,
            genus=genus,
            classes=rho.classes,
            rank=rho.rank,
        )
        psi = Contraction(
            source=pi, target=rho, flagmap={x: x for x in rho.flags}, vertexmap={v: v for v in pi.vertices}
        )
        b_vertexmap = {w: (v1 if w in set(over) else inv_vertexmap[a.vertexmap[w]]) for w in pi.vertices}
        b = CombinatorialMorphism(source=pi, target=sigma, flagmap=b_flagmap, vertexmap=b_vertexmap, hom=xi)
    else:
        # non-loop contraction: split each vertex over v0, re-merge unstable splits
        marked_sigma = relabel_classes(sigma, xi)
        flags = list(rho.flags)
        boundary = dict(rho.boundary)
        involution = dict(rho.involution)
        genus = dict(rho.genus)
        classes = dict(rho.classes)
        b_flagmap = {x: phi.flagmap[a.flagmap[x]] for x in rho.flags}
        b_vertexmap: dict[int, int] = {}
        psi_vertexmap: dict[int, int] = {}
        for w in rho.vertices:
            if w not in set(over):
                b_vertexmap[w] = inv_vertexmap[a.vertexmap[w]]
                psi_vertexmap[w] = w
        next_flag = (max(rho.flags) + 1) if rho.flags else 0
        next_vertex = (max(rho.vertices) + 1) if rho.vertices else 0
        contracted: list[tuple[int, int]] = []
        for w in sorted(over):
            side1 = [x for x in rho.flags if rho.boundary[x] == w and sigma.boundary[_route_flag(phi, a, x)] == v1]
            side2 = [x for x in rho.flags if rho.boundary[x] == w and sigma.boundary[_route_flag(phi, a, x)] == v2]
            g1, g2 = sigma.genus[v1], sigma.genus[v2]
            c1, c2 = marked_sigma.classes[v1], marked_sigma.classes[v2]
            stable1 = bool(c1) or 2 * g1 + len(side1) + 1 >= 3
            stable2 = bool(c2) or 2 * g2 + len(side2) + 1 >= 3
            if stable1 and stable2:
                wprime, wsecond = w, next_vertex
                next_vertex += 1
                e1, e2 = next_flag, next_flag + 1
                next_flag += 2
                flags += [e1, e2]
                boundary[e1], boundary[e2] = wprime, wsecond
                involution[e1], involution[e2] = e2, e1
                for x in side2:
                    boundary[x] = wsecond
                genus[wprime], genus[wsecond] = g1, g2
                classes[wprime], classes[wsecond] = c1, c2
                b_flagmap[e1], b_flagmap[e2] = f, fbar
                b_vertexmap[wprime], b_vertexmap[wsecond] = v1, v2
                psi_vertexmap[wprime] = psi_vertexmap[wsecond] = w
                contracted.append((e1, e2))
            else:
                # re-contract: keep w whole and map it to the stable side;
                # both sides unstable would contradict rho being stable
                assert stable1 or stable2, "both split halves unstable contradicts stability of the source"
                psi_vertexmap[w] = w
                if stable1:
                    b_vertexmap[w] = v1
                    for x in side2:
                        b_flagmap[x] = f
                else:
                    b_vertexmap[w] = v2
                    for x in side1:
                        b_flagmap[x] = fbar
        pi = MarkedGraph(
            flags=tuple(flags),
            vertices=tuple(psi_vertexmap),
            boundary=boundary,
            involution=involution,
            genus=genus,
            classes=classes,
            rank=rho.rank,
        )
        psi = Contraction(source=pi, target=rho, flagmap={x: x for x in rho.flags}, vertexmap=psi_vertexmap)
        b = CombinatorialMorphism(source=pi, target=sigma, flagmap=b_flagmap, vertexmap=b_vertexmap, hom=xi)

    ensure_valid(validate_contraction(psi), "pullback contraction invalid")
    ensure_valid(validate_combinatorial(b), "pullback combinatorial morphism invalid")
    if not is_stable(pi):
        raise ValidationError([Violation("pullback-unstable", "stable pullback produced an unstable graph")])
    return pi, psi, b


def stable_pullback(
    xi: MonoidHom,
    phi: Contraction,
    a: CombinatorialMorphism,
    edge_order=None,
) -> tuple[MarkedGraph, Contraction, CombinatorialMorphism]:
    """Lift a covering morphism across a contraction.

    Inputs: phi: sigma -> tau a contraction over the source monoid,
    a: rho -> tau a combinatorial morphism covering xi with rho stable.
    Returns (pi, psi: pi -> rho, b: pi -> sigma covering xi); psi contracts
    exactly the edges inserted by the construction.

    phi is factored into elementary contractions in ascending contracted-edge
    order (or the given ``edge_order``); the result does not depend on this
    choice, up to isomorphism of the whole output diagram.
    """
    ensure_valid(validate_contraction(phi), "stable_pullback: invalid contraction")
    ensure_valid(validate_combinatorial(a), "stable_pullback: invalid covering morphism")
    covering = a.hom if a.hom is not None else MonoidHom.identity(a.source.rank)
    if covering != xi:
        raise ValidationError([Violation("pullback-hom", "covering morphism does not cover xi")])
    if not is_stable(a.source):
        raise ValidationError([Violation("pullback-unstable-input", "the graph being pulled back must be stable")])
    if a.target != phi.target:
        raise ValidationError([Violation("pullback-endpoints", "covering morphism must land in the contraction target")])

    factors = decompose_elementary(phi, edge_order)
    current_a = a
    psis: list[Contraction] = []
    for step in reversed(factors):
        # step: current sigma_k -> sigma_{k-1}; current_a lands in sigma_{k-1}
        pi, psi_step, b_step = _elementary_pullback(xi, step, current_a)
        psis.append(psi_step)
        current_a = b_step
    if not factors:
        pi = a.source
        psi = identity_contraction(pi)
        b = CombinatorialMorphism(
            source=pi,
            target=phi.source,
            flagmap={x: phi.flagmap[a.flagmap[x]] for x in pi.flags},
            vertexmap={
                w: next(v for v in phi.source.vertices if phi.vertexmap[v] == a.vertexmap[w])
                for w in pi.vertices
            },
            hom=xi,
        )
        ensure_valid(validate_combinatorial(b), "identity pullback invalid")
        return pi, psi, b
    psi = psis[0]
    for nxt in psis[1:]:
        psi = compose_contractions(psi, nxt)
    return current_a.source, psi, current_a


def compose_marked(outer: MarkedMorphism, inner: MarkedMorphism) -> MarkedMorphism:
    """Compose (B,sigma) -> (C,rho) after (A,tau) -> (B,sigma).

    The middle graph of the composite is the stable pullback of the outer
    middle across the inner contraction.
    """
    if inner.target_graph != outer.source_graph:
        raise ValidationError([Violation("marked-compose-endpoints", "inner target differs from outer source")])
    pi, chi, c = stable_pullback(outer.hom, inner.contr, outer.comb)
    composite = MarkedMorphism(
        hom=outer.hom.compose(inner.hom),
        comb=compose_combinatorial(inner.comb, c),
        mid=pi,
        contr=compose_contractions(outer.contr, chi),
    )
    check_marked(composite)
    return composite


def pullback_diagram_key(
    pi: MarkedGraph, psi: Contraction, b: CombinatorialMorphism
) -> tuple:
    """Isomorphism invariant of a pullback square with rho and sigma fixed.

    Only pi is relabelled; the maps out of it (psi into rho, b into sigma)
    ride along as decorations, so two squares over the same rho and sigma
    get equal keys exactly when they differ by an isomorphism of pi
    commuting with both maps.
    """
    from .canonical import diagram_key

    psi_preimage = {src_flag: rho_flag for rho_flag, src_flag in psi.flagmap.items()}
    flag_dec = {f: (b.flagmap[f], psi_preimage.get(f)) for f in pi.flags}
    vertex_dec = {v: (b.vertexmap[v], psi.vertexmap[v]) for v in pi.vertices}
    return diagram_key(pi, flag_dec, vertex_dec)


def marked_key(m: MarkedMorphism) -> tuple:
    """Isomorphism-class invariant of a marked morphism.

    Two morphisms between the same literal endpoint graphs are the same
    morphism of the category exactly when their keys agree: the middle graph
    is relabelled, its maps to the endpoints become decorations, and the
    marking homomorphism is compared on the nose.
    """
    from .canonical import diagram_key

    contr_preimage = {mid_flag: tgt_flag for tgt_flag, mid_flag in m.contr.flagmap.items()}
    flag_dec = {f: (m.comb.flagmap[f], contr_preimage.get(f)) for f in m.mid.flags}
    vertex_dec = {v: (m.comb.vertexmap[v], m.contr.vertexmap[v]) for v in m.mid.vertices}
    return (m.hom.rows, m.hom.source_rank, diagram_key(m.mid, flag_dec, vertex_dec))


def lift_contraction(phi: Contraction) -> MarkedMorphism:
    """A contraction of stable graphs as a morphism in the same direction."""
    if not is_stable(phi.source) or not is_stable(phi.target):
        raise ValidationError([Violation("lift-unstable", "lifting requires stable endpoints")])
    ensure_valid(validate_contraction(phi), "cannot lift an invalid contraction")
    rank = phi.source.rank
    ident = identity_combinatorial(phi.source)
    return MarkedMorphism(
        hom=MonoidHom.identity(rank),
        comb=CombinatorialMorphism(
            source=phi.source, target=phi.source,
            flagmap=dict(ident.flagmap), vertexmap=dict(ident.vertexmap),
            hom=MonoidHom.identity(rank),
        ),
        mid=phi.source,
        contr=phi,
    )


def lift_combinatorial(a: CombinatorialMorphism) -> MarkedMorphism:
    """A combinatorial morphism of stable graphs as a morphism in the
    opposite direction: from its target object to its source object."""
    if not is_stable(a.source) or not is_stable(a.target):
        raise ValidationError([Violation("lift-unstable", "lifting requires stable endpoints")])
    ensure_valid(validate_combinatorial(a), "cannot lift an invalid combinatorial morphism")
    if a.hom is not None and a.hom != MonoidHom.identity(a.target.rank):
        raise ValidationError([Violation("lift-hom", "only same-monoid morphisms lift directly")])
    rank = a.source.rank
    return MarkedMorphism(
        hom=MonoidHom.identity(rank),
        comb=CombinatorialMorphism(
            source=a.source, target=a.target,
            flagmap=dict(a.flagmap), vertexmap=dict(a.vertexmap),
            hom=MonoidHom.identity(rank),
        ),
        mid=a.source,
        contr=identity_contraction(a.source),
    )
