"""Hypothesis-free natural deduction, state semantics with checkable
certificates, constructive proof translation, and bounded proof search over
relational arithmetic."""

from .syntax import (
    And, Atom, Const, Exists, FALSUM, Falsum, ForAll, Formula, Implies, Or,
    ParseError, Signature, TOP, Term, Var, WConst, WitnessRegistry, alpha_eq,
    canon_key, formula_text, free_vars, neg, parse, positive_subformulas,
    substitute,
)
from .kernel import (
    CLASSICAL, Judgment, NON_HYPOTHETICAL, Proof, ProofError, assume,
    axiomatic, check_proof, checks, lem,
)
from .states import (
    BasicState, Edge, FineCert, FineExtensionError, IntenticState, Path,
    StateError, app, app_at, boost, check_fine_ext, identity_cert,
    is_fine_ext, leaf, make_edge, rep, validate_state, verify_fine_cert,
)
from .truthmaking import (
    ChildStep, MTWitness, WitnessError, check_entailment_certificate,
    check_mt_witness, holds, make_child_step, transport_boost, transport_fine,
    trivial_witness,
)
from .transform import (
    TranslationError, TranslationResult, entail, extract, translate,
)
from .pasearch import (
    AxiomBase, GoalPool, SearchConfig, SearchResult, Searcher, is_axiom,
    prove, prove_elim, prove_intro, relational_pa, uni,
)
from .frames import (
    FuzzReport, GenParams, commute_witness, gen_state, local_join, run_fuzz,
    run_trial, sample_witness,
)

__version__ = "0.1.0"
