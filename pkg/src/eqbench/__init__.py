"""Workbench for equational axiom systems over a product and two divisions:
finite model enumeration, identity proving/refutation, structural
classification, and deductive-power comparison."""

from .axioms import (
    AxiomSystem,
    BUILTIN_NAMES,
    builtin_system,
    empty_system,
    load_axioms,
    make_system,
    merge,
)
from .consequence import (
    CandidateSpace,
    DerivationStep,
    DeriveBudgets,
    HoldsUpTo,
    Proved,
    Refuted,
    Unknown,
    Verdict,
    consequence_set,
    derive,
    semantic_consequence,
    validate_derivation,
)
from .models import (
    EnumOptions,
    FiniteAlgebra,
    canonical_form,
    count_models,
    enumerate_models,
    eval_term,
    from_record,
    make_algebra,
    satisfies,
    satisfies_all,
    to_record,
)
from .power import PowerReport, RankReport, compare, rank_all
from .structure import (
    StructureReport,
    classify_structure,
    identity_elements,
    is_abelian_group,
    is_associative,
    is_commutative,
    is_group,
    is_latin_square,
    ops_coincide,
)
from .terms import (
    App,
    Equation,
    Op,
    ParseError,
    Term,
    Var,
    format_equation,
    format_term,
    parse_equation,
    parse_term,
    substitute,
    variables_of,
)

__version__ = "0.1.0"
