//! Workbench library for unification modulo equational theories.
//!
//! The crate decides term equality and instantiation modulo a fixed menu of
//! theories (associativity, commutativity, idempotency, units, distributivity,
//! homomorphisms, description-logic conjunctions), computes unifier sets and
//! their minimal classes under both the restricted preorder (compare on the
//! problem variables) and the unrestricted one (compare everywhere), and
//! models the commutative-monoid theories by vectors and matrices over
//! semirings. Searches are bounded and honest: every bound shows up in the
//! result, and anything undecided is reported as such rather than guessed.

pub mod error;
pub mod term;
pub mod subst;
pub mod theory;
pub mod normal;
pub mod dio;
pub mod matching;
pub mod preorder;
pub mod unify;
pub mod construct;
pub mod semiring;
pub mod monoidal;

pub use construct::{
    domain_confined_equivalent, more_general_poset, rename_away, shrink_general,
    verify_descending_chain, ChainLink, ChainReport, ConfinedSearch, PosetReport,
    ShrinkCertificate,
};
pub use dio::{hilbert_basis, min_solutions_inhomogeneous, parse_dio_system, DioSystem, DioVector, HilbertBasis};
pub use error::{Error, Result};
pub use monoidal::{
    all_pairs, apply_via_matrix, coincide_on_p, greater_than_p, semiring_for, subst_to_matrix,
    term_to_vector, transfer_witness, vector_to_term, SemiringMatrix, SemiringVector,
};
pub use semiring::{
    check_candidate_triple, check_restrictive_window, int_window, language_sample, nat_window,
    poly_window, refute_restrictive_candidate, restrictive_preorder, semiring_law_violations,
    words_up_to, CandidateViolation, RestrictivePreorder, SemiringKind, SemiringValue,
    WindowReport,
};
pub use matching::{brute_force_matcher, match_modulo, MatchOutcome, MatchProblem};
pub use preorder::{
    compare, decide_instance, equivalent, strictly_more_general, Comparison, InstanceDecision,
    Scope,
};
pub use unify::{
    check_scope_transfer, enumerate_unifiers_bounded, in_every_complete_set, is_complete_within,
    mgu_syntactic, minimize_set, minimize_substitutions, parse_problem, probe_scope, probe_type,
    sigma_z_family, unify_theory, CompletenessCheck, ScopeProbe, ScopeStatus, ScopeTransferReport,
    SetStatus, TypeProbeReport, UnificationProblem, UnifierSet, VerdictHint,
};
pub use term::{parse_term, Signature, Symbol, Term};
pub use subst::{parse_substitution, FreshVarGen, Permutation, Substitution};
pub use theory::{theory_info, Flag, TheoryId, TheoryInfo, UnifType};
pub use normal::{enumerate_class, eq_modulo, normal_form, pi2_value, role_depth};
