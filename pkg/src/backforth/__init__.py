"""Asymmetric back-and-forth relations on finite relational structures.

The package decides one-directional simulation relations between finite
structures with pinned tuples, synthesizes the infinitary formulas that
witness failures, classifies formulas into the alternation hierarchy, and
builds the families, flowers, layered gadgets, and tagged unions used to
probe the relations' behaviour.  A small HTTP service exposes the solver as
an interactive two-player game.
"""

from .bfgame import (
    FormulaBudgetError,
    GameContractError,
    NodeBudgetError,
    Position,
    Verdict,
    best_reply,
    bf_equiv,
    bf_geq,
    bf_leq,
    bf_rank,
    distinguishing_formula,
    duplicator_reply,
    spoiler_witness,
)
from .constructions import (
    check_union_criteria,
    check_union_refutation,
    dominates,
    interval_factoring_check,
    parse_family_literal,
    verify_claim_geq3,
    verify_claim_subsetleq2,
)
from .formulas import (
    And,
    Atomic,
    ComplexityReport,
    Exists,
    Forall,
    Formula,
    Or,
    classify,
    eval_formula,
    make_and,
    make_or,
    negate,
    parse_formula,
    random_formula,
    serialize_formula,
    substitute,
)
from .structures import (
    ComponentSpec,
    Family,
    Signature,
    SizeBudgetError,
    Structure,
    StructureParseError,
    build_flower_graph,
    build_lemma21_pair,
    build_linear_order,
    close_family,
    disjoint_union,
    parse_structure,
    serialize_structure,
    structure_from_json,
    structure_to_json,
    union_components,
)
from .typeformulas import (
    RankBoundError,
    atomic_type_formula,
    canonical_type_formulas,
    internal_sigma,
    isolate_pi_type,
    synth_geq1_sentence,
    synth_leq1_sentence,
)

__all__ = [
    "And",
    "Atomic",
    "ComplexityReport",
    "ComponentSpec",
    "Exists",
    "Family",
    "Forall",
    "Formula",
    "FormulaBudgetError",
    "GameContractError",
    "NodeBudgetError",
    "Or",
    "Position",
    "RankBoundError",
    "Signature",
    "SizeBudgetError",
    "Structure",
    "StructureParseError",
    "Verdict",
    "atomic_type_formula",
    "best_reply",
    "bf_equiv",
    "bf_geq",
    "bf_leq",
    "bf_rank",
    "build_flower_graph",
    "build_lemma21_pair",
    "build_linear_order",
    "canonical_type_formulas",
    "check_union_criteria",
    "check_union_refutation",
    "classify",
    "close_family",
    "disjoint_union",
    "distinguishing_formula",
    "dominates",
    "duplicator_reply",
    "eval_formula",
    "internal_sigma",
    "interval_factoring_check",
    "isolate_pi_type",
    "make_and",
    "make_or",
    "negate",
    "parse_family_literal",
    "parse_formula",
    "parse_structure",
    "random_formula",
    "serialize_formula",
    "serialize_structure",
    "spoiler_witness",
    "structure_from_json",
    "structure_to_json",
    "substitute",
    "synth_geq1_sentence",
    "synth_leq1_sentence",
    "union_components",
    "verify_claim_geq3",
    "verify_claim_subsetleq2",
]

__version__ = "0.1.0"
