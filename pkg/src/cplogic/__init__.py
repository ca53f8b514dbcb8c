"""Counting propositional logic with exact model-counting semantics,
a labelled sequent prover, prenex normal forms, and the counting type
system for a lambda calculus with named probabilistic choice."""

from .syntax import (  # noqa: F401
    And, App, Arrow, Atom, BAnd, BBot, BNeg, BOr, BTop, BVar, Base, BOT,
    BoolFormula, CQ, Choice, DQ, Derivation, Formula, FROM, INTO, Lam,
    LabelledFormula, Neg, Nu, O, Or, QualType, Rational, RESERVED_NAME,
    Sequent, SimpleType, Term, TOP, TypeDerivation, TypeJudgment, Var,
    alpha_rename_bound, cn, free_names, free_vars,
)
from .semantics import (  # noqa: F401
    ADecomposition, Valuation, Verdict, a_decompose, bool_of, decide,
    entails, eval_formula, labelled_valid, measure, mu_projection,
    sat_count, sequent_valid, weak_a_decompose,
)
from .normalform import (  # noqa: F401
    PrenexFormula, WagnerBlock, WagnerInstance, epsilon, epsilon_syntactic,
    export_wagner, nsnf, pnf, ppnf,
)
from .prover import (  # noqa: F401
    ProofOutcome, SequentSet, check_derivation, cut, decompose_step, ms,
    prove,
)
from .lambda_nu import (  # noqa: F401
    Distribution, Event, NuTree, PseudoValue, apply_event, distribution,
    is_pnf, normal_prob, normalizes_with_prob, pnf_term, reduce_term,
)
from .lcpl import (  # noqa: F401
    Annotations, RedStep, check_type_derivation, infer, translate_judgment,
    translate_type, transport_derivation,
)
from .mcpl import (  # noqa: F401
    McplDerivation, McplFlip, McplFormula, McplImp, McplSequent,
    check_mcpl_derivation, decorate,
)
