//! Finite model building from generalized diagrams.
//!
//! A theory declares a sorted signature whose constructor symbols generate
//! the universe, a three-valued diagram of facts, rules and ground
//! equations, and optional axioms. The canonical model takes congruence
//! classes of generated terms as its elements and reads predicate
//! extensions off the diagram. Formulas are evaluated under strong Kleene
//! semantics at (world, time) points, and models can be expanded step by
//! step by forcing unknown atoms, adding elements or merging predicates.

pub mod congruence;
pub mod diagram;
pub mod error;
pub mod evaluate;
pub mod expand;
pub mod formula;
pub mod intension;
pub mod session;
pub mod signature;
pub mod theory;
pub mod truth;

pub use congruence::congruence_close;
pub use diagram::{build_canonical_model, Atom, DiagramRule, GDiagram, Model, PartialSet};
pub use error::{Error, Result};
pub use evaluate::{
    eval_formula, eval_modal, skolemize_existential, truth_set, EvalMode, EvalTrace, Evaluator, Interpretation,
    PointOfReference,
};
pub use expand::{
    add_element, check_consistency, check_consistency_at, extend_set, force, force_at, force_predicates_equal,
    replay, test_function_equality, Consistency, ExpansionStep, Obligation,
};
pub use formula::{apply_family, parse_atom, parse_formula, parse_term, Formula, IndexedFunctionFamily, ModalOp};
pub use intension::{
    as_indexed_diagrams, build_intensional_model, list_individual_concepts, IndexSet, IndexedDiagram,
    IndividualConcept, IntensionalModel,
};
pub use session::{run_transcript, BatchPolicy, CommandOutput, PendingChoice, Repl, Session, SessionConfig};
pub use signature::{generate_terms, generate_universe, DefaultTruth, GenLimits, Signature, Term, DEFAULT_DEPTH};
pub use theory::{parse_theory, Theory};
pub use truth::Truth3;
