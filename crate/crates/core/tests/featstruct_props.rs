//! Algebraic laws of unification on random feature structures, each over
//! at least 1000 cases.

mod common;

use common::fs_laws::*;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn unification_is_commutative(a in fs(), b in fs(), e in env()) {
        commutative(&a, &b, &e)?;
    }

    #[test]
    fn unification_is_associative_up_to_bindings(a in fs(), b in fs(), c in fs(), e in env()) {
        associative(&a, &b, &c, &e)?;
    }

    #[test]
    fn unification_is_idempotent(a in fs(), e in env()) {
        idempotent(&a, &e)?;
    }

    #[test]
    fn empty_structure_is_identity(a in fs(), e in env()) {
        empty_is_identity(&a, &e)?;
    }

    #[test]
    fn unify_leaves_inputs_alone(a in fs(), b in fs(), e in env()) {
        inputs_are_not_mutated(&a, &b, &e)?;
    }

    #[test]
    fn result_is_subsumed_by_inputs(a in fs(), b in fs(), e in env()) {
        result_subsumed_by_both_inputs(&a, &b, &e)?;
    }
}
