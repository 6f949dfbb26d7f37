"""System properties, connectives, implications and inference over valuations."""

from .connectives import (
    Conjunction,
    ContentError,
    Disjunction,
    Negation,
    conjoin,
    disjoin,
    holds,
    negate,
    present,
)
from .formula import (
    SCHEMAS,
    And,
    Formula,
    FormulaError,
    Implies,
    Not,
    Or,
    SchemaVerdict,
    Var,
    Verdict,
    check_generalized_law,
    check_law_of_inference,
    check_particular_inference,
    eval_formula,
    match_schema,
    parse,
    parse_argument,
    schema,
    substitute,
    valuations,
    variables,
)
from .implication import (
    Law,
    LawView,
    Outcome,
    ParticularImplication,
    eval_particular_implication,
    generalize,
    implicate,
    instantiate,
    law_view,
)
from .properties import (
    Coherent,
    PropertyError,
    PropertyReport,
    Witness,
    check_coherence,
    check_completeness,
    check_faithfulness,
    check_s_completeness,
)
