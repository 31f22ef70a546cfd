"""Certify universal derived equivalences of finite posets at desk scale.

The package mechanizes a small calculus of matrix-valued formulas over
posets.  `poset_core` holds finite posets and their combinatorics;
`intmat` exact integer matrices; `formula_cat` the formula calculus with
its named constants; `gluing` the admissible-gluing data and the two
induced orders; `abelian_eval` evaluation into complexes of vector spaces
over exact fields; `harness` the randomized verification pipelines; and
`cli` the command-line front end.
"""

from .abelian_eval import (
    RATIONALS,
    DiagramMap,
    Field,
    PosetDiagram,
    VectComplex,
    cohomology_table,
    eval_cmorphism,
    eval_formula,
    eval_formula_map,
    eval_formula_morphism,
    eval_point_map,
    is_quasi_iso,
    is_quasi_iso_diagram,
    random_complex,
    random_diagram,
    random_qis_map,
    random_ses,
    shift_diagram,
)
from .errors import (
    AntichainViolation,
    CommutativityFailure,
    DiagramAxiomFailure,
    InternalInconsistency,
    NaturalityFailure,
    NoPathFound,
    NotATree,
    ParseError,
    PosetGlueError,
    SizeLimit,
)
from .formula_cat import (
    ALPHA1,
    ALPHA2,
    BETA1,
    BETA2,
    H121,
    H212,
    NU,
    PHI1,
    PHI2,
    TWO_CHAIN,
    XI1,
    XI2,
    XI12,
    XI121,
    XI212,
    CMorphism,
    CObject,
    Formula,
    FormulaMorphism,
    FormulaToPoint,
    check_formula,
    check_formula_morphism,
    check_homotopy,
    compose,
    compose_formulas,
    i_xi,
    shift,
    star,
    substitute,
    substitute_morphism,
    translation_formula,
)
from .gluing import (
    GluedOrder,
    GluingData,
    build_minus,
    build_plus,
    cross_witness,
    from_bgp,
    from_function,
    gluing_from_json,
    gluing_to_json,
    ordinal_witness,
    validate_gluing,
)
from .harness import (
    FIGURE_ONE_PAIRS,
    EpsilonTransform,
    EquivalenceCertificate,
    TrialRecord,
    TWO_CHAIN_MINUS,
    TWO_CHAIN_PLUS,
    build_epsilons,
    build_theorem_formulas,
    counterexample_data,
    figure_one_gluing,
    figure_one_poset,
    random_gluing,
    verify_bgp_path,
    verify_equivalence,
    verify_two_chain,
    verify_x1z,
)
from .intmat import Mat
from .poset_core import (
    Poset,
    direct_sum,
    hasse,
    is_isomorphic,
    opposite,
    ordinal_sum,
    poset_from_generators,
    poset_from_json,
    poset_loads,
    poset_to_dot,
    poset_to_json,
    product,
)
from .rng import SplitMix64, derive_seed

__version__ = "0.1.0"

__all__ = [
    "ALPHA1",
    "ALPHA2",
    "AntichainViolation",
    "BETA1",
    "BETA2",
    "CMorphism",
    "CObject",
    "CommutativityFailure",
    "DiagramAxiomFailure",
    "DiagramMap",
    "EpsilonTransform",
    "EquivalenceCertificate",
    "FIGURE_ONE_PAIRS",
    "Field",
    "Formula",
    "FormulaMorphism",
    "FormulaToPoint",
    "GluedOrder",
    "GluingData",
    "H121",
    "H212",
    "InternalInconsistency",
    "Mat",
    "NU",
    "NaturalityFailure",
    "NoPathFound",
    "NotATree",
    "PHI1",
    "PHI2",
    "ParseError",
    "Poset",
    "PosetDiagram",
    "PosetGlueError",
    "RATIONALS",
    "SizeLimit",
    "SplitMix64",
    "TWO_CHAIN",
    "TWO_CHAIN_MINUS",
    "TWO_CHAIN_PLUS",
    "TrialRecord",
    "VectComplex",
    "XI1",
    "XI12",
    "XI121",
    "XI2",
    "XI212",
    "build_epsilons",
    "build_minus",
    "build_plus",
    "build_theorem_formulas",
    "check_formula",
    "check_formula_morphism",
    "check_homotopy",
    "cohomology_table",
    "compose",
    "compose_formulas",
    "counterexample_data",
    "cross_witness",
    "derive_seed",
    "direct_sum",
    "eval_cmorphism",
    "eval_formula",
    "eval_formula_map",
    "eval_formula_morphism",
    "eval_point_map",
    "figure_one_gluing",
    "figure_one_poset",
    "from_bgp",
    "from_function",
    "gluing_from_json",
    "gluing_to_json",
    "hasse",
    "i_xi",
    "is_isomorphic",
    "is_quasi_iso",
    "is_quasi_iso_diagram",
    "opposite",
    "ordinal_sum",
    "ordinal_witness",
    "poset_from_generators",
    "poset_from_json",
    "poset_loads",
    "poset_to_dot",
    "poset_to_json",
    "product",
    "random_complex",
    "random_diagram",
    "random_gluing",
    "random_qis_map",
    "random_ses",
    "shift",
    "shift_diagram",
    "star",
    "substitute",
    "substitute_morphism",
    "translation_formula",
    "validate_gluing",
    "verify_bgp_path",
    "verify_equivalence",
    "verify_two_chain",
    "verify_x1z",
]
