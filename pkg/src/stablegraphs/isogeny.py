"""Stably forgetting tails, isogenies, and the extended isogeny category.

Stably forgetting a tail drops the tail and restabilizes; because the graph
was stable before, at most one vertex removal fires.  The outcome is
classified into four types:

* type I:   the vertex stays stable, nothing else happens;
* type II:  the vertex dies carrying another tail; the far half of its edge
            becomes a tail, and the tail map remembers the surviving slot;
* type III: the vertex dies between two edges, whose far halves are glued;
* type IV:  a whole component (a lonely tripod or lonely elliptic vertex)
            vanishes; this is the only type changing component counts.

An isogeny is a composite of type I-III forgets and edge contractions; it
never changes the Euler characteristic or the component count.  An extended
isogeny may first glue pairs of tails into edges.  Both are stored
constructively as their step lists; composition follows the trace of glued
tails backwards through the first factor's steps and re-executes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .errors import ValidationError, Violation
from .graphs import (
    MarkedGraph,
    connected_components,
    euler_characteristic,
    is_stable,
    tails,
)
from .morphisms import (
    CombinatorialMorphism,
    compose_combinatorial,
    contract_edges,
    forget_tail,
    glue_tails,
    identity_combinatorial,
)
from .stabilize import stabilize_with_trace

TailMap = dict  # target tail id -> source tail id bookkeeping


@dataclass(frozen=True)
class StableForget:
    """Result of stably forgetting one tail."""

    forgotten: int
    graph: MarkedGraph  # the smaller stable graph
    morphism: CombinatorialMorphism  # smaller -> original
    tail_map: dict[int, int]  # tails of the smaller graph -> tails of the original
    kind: str  # "I" | "II" | "III" | "IV"


def stably_forget_tail(g: MarkedGraph, f: int) -> StableForget:
    """Forget tail f of a stable graph and restabilize.

    The tail map fixes every tail that survives as itself and, in type II,
    sends the newly created tail to the other tail that lived at the removed
    vertex; the forgotten tail is never in its image.
    """
    if not is_stable(g):
        raise ValidationError([Violation("forget-unstable", "stably forgetting needs a stable graph")])
    smaller, incl = forget_tail(g, f)
    stable, stab_morph, steps = stabilize_with_trace(smaller)
    morphism = compose_combinatorial(incl, stab_morph)
    if not steps:
        kind = "I"
        tail_map = {h: h for h in tails(stable)}
    else:
        (step,) = steps  # a stable graph destabilizes at one vertex at most
        if step.case == "II":
            kind = "II"
            (new_tail,) = step.new_tails
            removed_tail = next(x for x in step.removed_flags if g.involution[x] == x)
            tail_map = {h: h for h in tails(stable) if h != new_tail}
            tail_map[new_tail] = removed_tail
        elif step.case == "III":
            kind = "III"
            tail_map = {h: h for h in tails(stable)}
        else:
            kind = "IV"
            tail_map = {h: h for h in tails(stable)}
    if f in tail_map.values():
        raise AssertionError("forgotten tail leaked into the tail map image")
    return StableForget(forgotten=f, graph=stable, morphism=morphism, tail_map=tail_map, kind=kind)


# -- steps ----------------------------------------------------------------


@dataclass(frozen=True)
class ForgetStep:
    tail: int


@dataclass(frozen=True)
class ContractStep:
    edge: tuple[int, int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "edge", (min(self.edge), max(self.edge)))


IsogenyStep = ForgetStep | ContractStep


@dataclass(frozen=True)
class ExtendedIsogeny:
    """A glue-then-reduce morphism between stable marked graphs.

    ``glued`` lists pairs of source tails joined into edges first; ``steps``
    then forget tails or contract single edges, in order.  All intermediate
    data (graphs, per-step morphisms, the composite tail trace) is computed
    on construction; use :func:`extended_isogeny` to build one.
    """

    source: MarkedGraph
    glued: tuple[tuple[int, int], ...]
    steps: tuple[IsogenyStep, ...]
    # computed
    glued_graph: MarkedGraph = field(compare=False, default=None)
    target: MarkedGraph = field(compare=False, default=None)
    glue_morphism: CombinatorialMorphism = field(compare=False, default=None)
    step_results: tuple = field(compare=False, default=())
    forget_kinds: tuple[str, ...] = field(compare=False, default=())

    def tail_trace(self) -> dict[int, int]:
        """Target tails -> source tails: where each surviving slot came from.

        Walks the step results backwards: contractions identify tails by
        their flag bijection, forgets apply their tail maps.
        """
        trace = {h: h for h in tails(self.target)}
        for kind, result in reversed(self.step_results):
            if kind == "forget":
                trace = {h: result.tail_map[t] for h, t in trace.items()}
            else:
                trace = {h: result.flagmap[t] for h, t in trace.items()}
        return trace

    def is_isogeny(self) -> bool:
        """No gluing and no component-killing forgets."""
        return not self.glued and all(k != "IV" for k in self.forget_kinds)


def extended_isogeny(
    source: MarkedGraph,
    glued: Iterable[tuple[int, int]] = (),
    steps: Iterable[IsogenyStep] = (),
) -> ExtendedIsogeny:
    """Execute glue pairs then reduction steps, recording every intermediate."""
    if not is_stable(source):
        raise ValidationError([Violation("isogeny-unstable-source", "extended isogenies start at stable graphs")])
    current = source
    glue_pairs = tuple((int(x), int(y)) for x, y in glued)
    glue_morph = identity_combinatorial(source)
    for x, y in glue_pairs:
        current, step_morph = glue_tails(current, x, y)
        glue_morph = compose_combinatorial(step_morph, glue_morph)
    glued_graph = current
    results: list[tuple[str, object]] = []
    kinds: list[str] = []
    step_list = tuple(steps)
    for step in step_list:
        if isinstance(step, ForgetStep):
            res = stably_forget_tail(current, step.tail)
            results.append(("forget", res))
            kinds.append(res.kind)
            current = res.graph
        elif isinstance(step, ContractStep):
            contr = contract_edges(current, [step.edge])
            results.append(("contract", contr))
            current = contr.target
        else:
            raise TypeError(f"unknown step {step!r}")
    return ExtendedIsogeny(
        source=source,
        glued=glue_pairs,
        steps=step_list,
        glued_graph=glued_graph,
        target=current,
        glue_morphism=glue_morph,
        step_results=tuple(results),
        forget_kinds=tuple(kinds),
    )


def validate_extended(e: ExtendedIsogeny) -> list[Violation]:
    """The reduction part must be a genuine isogeny: components in bijection."""
    out: list[Violation] = []
    for kind in e.forget_kinds:
        if kind == "IV":
            out.append(Violation("isogeny-pi0", "a forget step killed a component; component sets not in bijection"))
            break
    if len(connected_components(e.glued_graph)) != len(connected_components(e.target)) and not out:
        out.append(Violation("isogeny-pi0", "component counts differ"))
    return out


def identity_extended(g: MarkedGraph) -> ExtendedIsogeny:
    return extended_isogeny(g, (), ())


def elementary_contraction_isogeny(g: MarkedGraph, edge: tuple[int, int]) -> ExtendedIsogeny:
    return extended_isogeny(g, (), (ContractStep(tuple(edge)),))


def elementary_forget_isogeny(g: MarkedGraph, tail: int) -> ExtendedIsogeny:
    return extended_isogeny(g, (), (ForgetStep(tail),))


def elementary_glue_isogeny(g: MarkedGraph, pair: tuple[int, int]) -> ExtendedIsogeny:
    return extended_isogeny(g, (tuple(pair),), ())


def is_elementary_extended(e: ExtendedIsogeny) -> bool:
    return (len(e.glued) + len(e.steps)) == 1


def compose_extended(outer: ExtendedIsogeny, inner: ExtendedIsogeny) -> ExtendedIsogeny:
    """outer o inner: trace outer's glue pairs back through inner, re-execute.

    Gluing a pair of tails of inner's target commutes with inner's reduction
    steps once the pair is rewritten through inner's tail trace, so the
    composite glues everything at the source and replays both step lists.
    The construction is checked by asserting the replay passes through
    outer's glued graph and ends at outer's target.
    """
    if inner.target != outer.source:
        raise ValidationError([Violation("isogeny-compose-endpoints", "inner target differs from outer source")])
    trace = inner.tail_trace()
    traced_pairs = tuple((trace[x], trace[y]) for x, y in outer.glued)
    composite = extended_isogeny(
        inner.source,
        inner.glued + traced_pairs,
        inner.steps + outer.steps,
    )
    if composite.target != outer.target:
        raise AssertionError("extended isogeny composition did not reproduce the outer target")
    return composite


def chi_drop(e: ExtendedIsogeny) -> int:
    """chi(source after gluing) - chi(target); zero for every isogeny."""
    return euler_characteristic(e.glued_graph) - euler_characteristic(e.target)
