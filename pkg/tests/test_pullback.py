import random
from itertools import permutations

import pytest

from stablegraphs.canonical import is_isomorphic
from stablegraphs.errors import ValidationError
from stablegraphs.graphs import edges, is_stable, marked_graph, relabel_classes
from stablegraphs.monoid import MonoidHom
from stablegraphs.morphisms import (
    compose_combinatorial,
    compose_contractions,
    CombinatorialMorphism,
    contract_edges,
    cut_edge,
    validate_combinatorial,
    validate_contraction,
)
from stablegraphs.pullback import (
    compose_marked,
    identity_marked,
    lift_combinatorial,
    lift_contraction,
    marked_key,
    pullback_diagram_key,
    stable_pullback,
    validate_marked,
)

from strategies import rand_covering, rand_graph, rand_hom, rand_marked_morphism


def identity_cover(g, rank=None):
    ident = MonoidHom.identity(g.rank if rank is None else rank)
    return CombinatorialMorphism(
        source=g, target=g, flagmap={f: f for f in g.flags}, vertexmap={v: v for v in g.vertices}, hom=ident
    )


def test_pullback_along_identity():
    g = marked_graph(1, {0: (1, 1)}, tails={0: 0})
    phi = contract_edges(g, ())
    a = identity_cover(g)
    pi, psi, b = stable_pullback(MonoidHom.identity(1), phi, a)
    assert pi == g
    assert psi.contracted_edges() == ()
    assert b.flagmap == a.flagmap


def test_pullback_case_ii_both_sides_stable():
    # contracting the bridge of two class-(1) vertices, pulled back along itself
    sigma = marked_graph(1, {0: (0, 1), 1: (0, 1)}, tails={0: 0, 1: 1}, edges=[((2, 0), (3, 1))])
    phi = contract_edges(sigma, [(2, 3)])
    tau = phi.target
    a = identity_cover(tau)
    pi, psi, b = stable_pullback(MonoidHom.identity(1), phi, a)
    assert is_isomorphic(pi, sigma)
    assert len(psi.contracted_edges()) == 1
    assert validate_combinatorial(b) == []


def test_pullback_case_ii_unstable_split_recontracts():
    # over N^2 both sides are stable; xi kills the second coordinate, so the
    # (0,1)-side of the split would become an unstable class-zero vertex and
    # the construction re-contracts, leaving rho unchanged
    sigma = marked_graph(
        2, {0: (0, (1, 0)), 1: (0, (0, 1))}, tails={0: 0, 1: 1}, edges=[((2, 0), (3, 1))]
    )
    phi = contract_edges(sigma, [(2, 3)])
    tau = phi.target
    xi = MonoidHom(((1, 0),), 2)  # (a, b) -> (a)
    rho = relabel_classes(tau, xi)
    assert is_stable(rho)
    a = CombinatorialMorphism(
        source=rho, target=tau, flagmap={f: f for f in tau.flags}, vertexmap={v: v for v in tau.vertices}, hom=xi
    )
    pi, psi, b = stable_pullback(xi, phi, a)
    assert pi == rho
    assert psi.contracted_edges() == ()
    assert validate_combinatorial(b) == []


def test_pullback_case_i_loop():
    sigma = marked_graph(1, {0: (1, 1)}, tails={4: 0}, edges=[((0, 0), (1, 0))])
    phi = contract_edges(sigma, [(0, 1)])
    tau = phi.target
    assert tau.genus[0] == 2
    a = identity_cover(tau)
    pi, psi, b = stable_pullback(MonoidHom.identity(1), phi, a)
    assert is_isomorphic(pi, sigma)
    assert pi.genus[0] == 1
    assert len(psi.contracted_edges()) == 1


def test_pullback_loop_requires_positive_genus():
    sigma = marked_graph(1, {0: (1, 1)}, edges=[((0, 0), (1, 0))])
    phi = contract_edges(sigma, [(0, 1)])
    tau = phi.target
    bad_rho = marked_graph(1, {0: (0, 2)}, tails={9: 0})
    a = CombinatorialMorphism(
        source=bad_rho, target=tau, flagmap={}, vertexmap={0: 0}, hom=MonoidHom.identity(1)
    )
    # the covering morphism itself is invalid (genus mismatch), so the
    # construction refuses before the loop case is even reached
    with pytest.raises(ValidationError):
        stable_pullback(MonoidHom.identity(1), phi, a)


def test_pullback_vertex_square_commutes():
    rng = random.Random(89)
    for _ in range(40):
        g = rand_graph(rng, rank=2, max_flags=10, stable=True, min_edges=1)
        if not edges(g):
            continue
        pool = list(edges(g))
        phi = contract_edges(g, rng.sample(pool, rng.randint(1, min(2, len(pool)))))
        tau = phi.target
        xi = rand_hom(rng, 2, rng.randint(1, 2))
        a = rand_covering(rng, tau, xi)
        pi, psi, b = stable_pullback(xi, phi, a)
        assert validate_contraction(psi) == []
        assert validate_combinatorial(b) == []
        assert is_stable(pi)
        for v in pi.vertices:
            assert a.vertexmap[psi.vertexmap[v]] == phi.vertexmap[b.vertexmap[v]]


def _find_commuting_iso(pi1, psi1, b1, pi2, psi2, b2):
    """Brute-force isomorphism pi1 -> pi2 commuting with both squares' maps."""
    from itertools import permutations

    if len(pi1.flags) != len(pi2.flags) or len(pi1.vertices) != len(pi2.vertices):
        return None
    pre1 = {mid: rho for rho, mid in psi1.flagmap.items()}
    pre2 = {mid: rho for rho, mid in psi2.flagmap.items()}

    def vdec(pi, psi, b, v):
        return (pi.genus[v], pi.classes[v], b.vertexmap[v], psi.vertexmap[v])

    def fdec(pi, psi, b, pre, f):
        return (b.flagmap[f], pre.get(f))

    v1s = list(pi1.vertices)
    for perm in permutations(pi2.vertices):
        vmap = dict(zip(v1s, perm))
        if any(vdec(pi1, psi1, b1, v) != vdec(pi2, psi2, b2, vmap[v]) for v in v1s):
            continue

        def extend(idx, fmap):
            if idx == len(v1s):
                if all(fmap[pi1.involution[f]] == pi2.involution[fmap[f]] for f in fmap):
                    return dict(fmap)
                return None
            v = v1s[idx]
            sflags = pi1.flags_at(v)
            tflags = pi2.flags_at(vmap[v])
            for pick in permutations(tflags):
                trial = dict(fmap)
                trial.update(zip(sflags, pick))
                if any(
                    fdec(pi1, psi1, b1, pre1, f) != fdec(pi2, psi2, b2, pre2, trial[f])
                    for f in sflags
                ):
                    continue
                found = extend(idx + 1, trial)
                if found is not None:
                    return found
            return None

        found = extend(0, {})
        if found is not None:
            return vmap, found
    return None


def test_equal_diagram_keys_certified_by_explicit_iso():
    rng = random.Random(93)
    done = 0
    while done < 10:
        g = rand_graph(rng, rank=2, max_flags=10, stable=True, min_edges=2, max_vertices=4)
        pool = list(edges(g))
        if len(pool) < 2:
            continue
        chosen = rng.sample(pool, 2)
        phi = contract_edges(g, chosen)
        xi = rand_hom(rng, 2, 1)
        a = rand_covering(rng, phi.target, xi, extra_ops=0)
        outputs = []
        for order in permutations(phi.contracted_edges()):
            outputs.append(stable_pullback(xi, phi, a, edge_order=order))
        (pi1, psi1, b1), (pi2, psi2, b2) = outputs[0], outputs[1]
        assert pullback_diagram_key(pi1, psi1, b1) == pullback_diagram_key(pi2, psi2, b2)
        assert _find_commuting_iso(pi1, psi1, b1, pi2, psi2, b2) is not None
        done += 1


def test_pullback_order_independence_sample():
    rng = random.Random(97)
    done = 0
    while done < 25:
        g = rand_graph(rng, rank=2, max_flags=12, stable=True, min_edges=3)
        pool = list(edges(g))
        if len(pool) < 2:
            continue
        chosen = rng.sample(pool, rng.randint(2, min(3, len(pool))))
        phi = contract_edges(g, chosen)
        xi = rand_hom(rng, 2, rng.randint(1, 2))
        a = rand_covering(rng, phi.target, xi)
        keys = set()
        for order in permutations(phi.contracted_edges()):
            pi, psi, b = stable_pullback(xi, phi, a, edge_order=order)
            keys.add(pullback_diagram_key(pi, psi, b))
        assert len(keys) == 1
        done += 1


def test_pullback_partition_square_commutes():
    # on flag-partition classes, mapping a cover flag into the pullback and
    # then down agrees with mapping it down and then into the contraction
    rng = random.Random(157)
    from stablegraphs.graphs import flag_partition

    done = 0
    while done < 25:
        g = rand_graph(rng, rank=2, max_flags=11, stable=True, min_edges=1, max_vertices=4)
        pool = list(edges(g))
        if not pool:
            continue
        phi = contract_edges(g, rng.sample(pool, rng.randint(1, min(2, len(pool)))))
        xi = rand_hom(rng, 2, rng.randint(1, 2))
        a = rand_covering(rng, phi.target, xi, extra_ops=1)
        pi, psi, b = stable_pullback(xi, phi, a)
        part_sigma = flag_partition(relabel_classes(phi.source, xi))
        for x in a.source.flags:
            via_pullback = b.flagmap[psi.flagmap[x]]
            via_base = phi.flagmap[a.flagmap[x]]
            assert part_sigma.same_block(via_pullback, via_base)
        done += 1


def test_vertical_pasting():
    # pulling back along a composite contraction equals pulling back in stages
    rng = random.Random(109)
    done = 0
    while done < 20:
        g = rand_graph(rng, rank=2, max_flags=12, stable=True, min_edges=2, max_vertices=5)
        pool = list(edges(g))
        if len(pool) < 2:
            continue
        first, second = rng.sample(pool, 2)
        inner = contract_edges(g, [first])  # sigma' -> sigma
        outer = contract_edges(inner.target, [second if second in edges(inner.target) else second])
        if second not in [e for e in edges(inner.target)]:
            continue
        composite = compose_contractions(outer, inner)
        xi = rand_hom(rng, 2, rng.randint(1, 2))
        a = rand_covering(rng, outer.target, xi, extra_ops=1)
        pi, psi, b = stable_pullback(xi, outer, a)
        pi2, psi2, b2 = stable_pullback(xi, inner, b)
        direct_pi, direct_psi, direct_b = stable_pullback(xi, composite, a)
        staged_psi = compose_contractions(psi, psi2)
        assert pullback_diagram_key(direct_pi, direct_psi, direct_b) == pullback_diagram_key(
            pi2, staged_psi, b2
        )
        done += 1


def test_horizontal_pasting():
    # pulling a twice-covered graph back along one contraction equals pulling
    # back each cover in turn; the homs compose
    rng = random.Random(111)
    done = 0
    while done < 20:
        g = rand_graph(rng, rank=2, max_flags=10, stable=True, min_edges=1, max_vertices=4)
        pool = list(edges(g))
        if not pool:
            continue
        phi = contract_edges(g, rng.sample(pool, rng.randint(1, min(2, len(pool)))))
        xi = rand_hom(rng, 2, rng.randint(1, 2))
        a = rand_covering(rng, phi.target, xi, extra_ops=0)
        pi, psi, b = stable_pullback(xi, phi, a)
        eta = rand_hom(rng, a.source.rank, rng.randint(1, 2))
        a2 = rand_covering(rng, a.source, eta, extra_ops=0)
        pi2, chi, b2 = stable_pullback(eta, psi, a2)
        direct_pi, direct_psi, direct_b = stable_pullback(
            eta.compose(xi), phi, compose_combinatorial(a, a2)
        )
        staged_b = compose_combinatorial(b, b2)
        assert pullback_diagram_key(direct_pi, direct_psi, direct_b) == pullback_diagram_key(
            pi2, chi, staged_b
        )
        done += 1


# -- the category ------------------------------------------------------------


def test_identity_morphism_validates():
    g = marked_graph(1, {0: (1, 1)}, tails={0: 0})
    m = identity_marked(g)
    assert validate_marked(m) == []


def test_compose_with_identity():
    rng = random.Random(101)
    for _ in range(15):
        m = rand_marked_morphism(rng, max_flags=8)
        left = compose_marked(identity_marked(m.target_graph), m)
        right = compose_marked(m, identity_marked(m.source_graph))
        assert marked_key(left) == marked_key(m)
        assert marked_key(right) == marked_key(m)


def test_compose_endpoint_mismatch():
    rng = random.Random(103)
    m1 = rand_marked_morphism(rng, max_flags=8)
    g = marked_graph(1, {0: (1, 1)}, tails={0: 0, 1: 0, 2: 0, 3: 0})
    m2 = identity_marked(g)
    if m1.target_graph != g:
        with pytest.raises(ValidationError):
            compose_marked(m2, m1)


def test_associativity_sample():
    rng = random.Random(107)
    done = 0
    while done < 15:
        m1 = rand_marked_morphism(rng, source_rank=2, target_rank=rng.randint(1, 2), max_flags=8)
        m2 = rand_marked_morphism(rng, source=m1.target_graph, source_rank=m1.target_graph.rank,
                                  target_rank=rng.randint(1, 2), max_flags=8)
        m3 = rand_marked_morphism(rng, source=m2.target_graph, source_rank=m2.target_graph.rank,
                                  target_rank=rng.randint(1, 2), max_flags=8)
        left = compose_marked(m3, compose_marked(m2, m1))
        right = compose_marked(compose_marked(m3, m2), m1)
        assert left.hom == right.hom
        assert marked_key(left) == marked_key(right)
        done += 1


def test_lift_contraction():
    sigma = marked_graph(1, {0: (0, 1), 1: (0, 1)}, tails={0: 0, 1: 1}, edges=[((2, 0), (3, 1))])
    phi = contract_edges(sigma, [(2, 3)])
    m = lift_contraction(phi)
    assert validate_marked(m) == []
    assert m.source_graph == sigma and m.target_graph == phi.target


def test_lift_cut_edge_reverses_direction():
    g = marked_graph(1, {0: (0, 1), 1: (0, 1)}, tails={0: 0, 1: 1}, edges=[((2, 0), (3, 1))])
    cut, a = cut_edge(g, (2, 3))
    m = lift_combinatorial(a)
    assert validate_marked(m) == []
    # the morphism runs from the glued graph's object to the cut graph's object
    assert m.source_graph == g and m.target_graph == cut


def test_lifted_identity_composes():
    g = marked_graph(1, {0: (1, 1)}, tails={0: 0})
    phi = contract_edges(g, ())
    m = lift_contraction(phi)
    composed = compose_marked(m, identity_marked(g))
    assert marked_key(composed) == marked_key(m)


def test_contraction_then_cut_composite():
    # refine the 4-tail boundary graph by one extra edge, lift the refining
    # contraction, then cut the boundary edge of its target; the composite's
    # middle graph must be the stable pullback of the cut across the
    # contraction
    refined = marked_graph(
        1,
        {0: (0, 1), 1: (0, 1), 2: (0, 1)},
        tails={0: 0, 1: 0, 4: 1, 5: 2},
        edges=[((2, 0), (3, 1)), ((6, 1), (7, 2))],
    )
    phi = contract_edges(refined, [(6, 7)])
    boundary_graph = phi.target  # two vertices, one edge, four tails
    m_contract = lift_contraction(phi)
    cut, a = cut_edge(boundary_graph, (2, 3))
    m_cut = lift_combinatorial(a)
    composite = compose_marked(m_cut, m_contract)
    assert composite.source_graph == refined
    assert composite.target_graph == cut
    pi, psi, b = stable_pullback(m_cut.hom, phi, m_cut.comb)
    assert is_isomorphic(composite.mid, pi)
    # the pullback cuts the corresponding edge upstairs and keeps the rest
    assert len(edges(pi)) == len(edges(refined)) - 1


def test_marked_key_separates_different_morphisms():
    # contracting distinguishable edges gives distinguishable morphisms
    g = marked_graph(
        1,
        {0: (0, 1), 1: (1, 0), 2: (2, 0)},
        edges=[((0, 0), (1, 1)), ((2, 1), (3, 2))],
    )
    m1 = lift_contraction(contract_edges(g, [(0, 1)]))
    m2 = lift_contraction(contract_edges(g, [(2, 3)]))
    assert marked_key(m1) != marked_key(m2)
    assert marked_key(m1) == marked_key(lift_contraction(contract_edges(g, [(0, 1)])))
