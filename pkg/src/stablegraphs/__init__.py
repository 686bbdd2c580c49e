"""Combinatorial calculus of stable marked modular graphs.

Graphs with genus and curve-class labels, their contractions and
combinatorial morphisms, stabilization, stable pullback, isogenies,
cartesian (splitting) families over variety profiles, and the
dimension/degree ledger.
"""

from .errors import (
    RankMismatchError,
    SizeCapError,
    StableGraphsError,
    ValidationError,
    Violation,
)
from .monoid import (
    LinearForm,
    MonoidElement,
    MonoidHom,
    apply_hom,
    element,
    enumerate_pair_decompositions,
    eval_form,
)
from .graphs import (
    FlagPartition,
    MarkedGraph,
    betti1,
    connected_components,
    disjoint_union,
    edges,
    empty_graph,
    euler_characteristic,
    flag_partition,
    genus,
    is_forest,
    is_stable,
    is_stable_vertex,
    marked_graph,
    modular_graph,
    relabel_classes,
    tails,
    total_class,
    valence,
)
from .canonical import (
    canonical_form,
    canonical_key,
    canonicalize,
    diagram_key,
    is_isomorphic,
)
from .morphisms import (
    CombinatorialMorphism,
    Contraction,
    compose_combinatorial,
    compose_contractions,
    contract_edges,
    contracted_piece,
    cut_edge,
    decompose_elementary,
    forget_tail,
    glue_tails,
    identity_combinatorial,
    identity_contraction,
    validate_combinatorial,
    validate_contraction,
)
from .stabilize import (
    check_universal_property,
    enumerate_combinatorial_morphisms,
    pushforward,
    stabilize,
)
from .pullback import (
    MarkedMorphism,
    compose_marked,
    identity_marked,
    lift_combinatorial,
    lift_contraction,
    marked_key,
    pullback_diagram_key,
    stable_pullback,
    validate_marked,
)
from .profiles import (
    BUILTIN_PROFILES,
    POINT,
    VarietyProfile,
    deg_graph,
    dim_graph,
    projective_space,
)
from .isogeny import (
    ContractStep,
    ExtendedIsogeny,
    ForgetStep,
    StableForget,
    compose_extended,
    extended_isogeny,
    identity_extended,
    stably_forget_tail,
    validate_extended,
)
from .cartesian import (
    CartesianMorphism,
    CartesianObject,
    DegreeBoundCriterion,
    ElementaryCartesianMorphism,
    FamilyMember,
    ForestCriterion,
    cartesian_pullback,
    enumerate_stable_graphs,
    homogeneous_decomposition,
    is_admissible_member,
    is_stabilization_identification,
    oplus,
    otimes,
    pullback_object,
    tensor_unit,
    validate_cartesian_morphism,
    validate_cartesian_object,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
