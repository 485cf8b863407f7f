//! Random feature structures and the algebraic laws of unification.

use metagramme::featstruct::{resolve, unify, BindingEnv, FeatureStructure, FeatureValue, VarId};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn value() -> impl Strategy<Value = FeatureValue> {
    prop_oneof![
        3 => prop_oneof![Just("sg"), Just("pl"), Just("active")].prop_map(FeatureValue::atom),
        2 => (0u32..5).prop_map(|v| FeatureValue::Var(VarId(v))),
    ]
}

pub fn fs() -> impl Strategy<Value = FeatureStructure> {
    proptest::collection::btree_map(prop_oneof![Just("num"), Just("dia"), Just("mode"), Just("gen")], value(), 0..4)
        .prop_map(|m| m.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

/// An environment with some variables already linked or bound.
pub fn env() -> impl Strategy<Value = BindingEnv> {
    proptest::collection::vec((value(), value()), 0..3).prop_map(|pairs| {
        let mut e = BindingEnv::new();
        for (x, y) in pairs {
            let mut trial = e.clone();
            if trial.unify_values(&x, &y).is_ok() {
                e = trial;
            }
        }
        e
    })
}

fn resolved(r: Result<(FeatureStructure, BindingEnv), impl std::fmt::Debug>) -> Option<FeatureStructure> {
    r.ok().map(|(f, e)| resolve(&f, &e))
}

/// Resolved values of a few probe variables, to compare environments.
fn probe(e: &BindingEnv) -> Vec<FeatureValue> {
    (0..5).map(|v| e.value_of(VarId(v))).collect()
}

pub type Law = Result<(), TestCaseError>;

pub fn commutative(a: &FeatureStructure, b: &FeatureStructure, e: &BindingEnv) -> Law {
    let ab = unify(a, b, e);
    let ba = unify(b, a, e);
    prop_assert_eq!(ab.is_ok(), ba.is_ok());
    if let (Ok((x, ex)), Ok((y, ey))) = (ab, ba) {
        prop_assert_eq!(resolve(&x, &ex), resolve(&y, &ey));
        prop_assert_eq!(probe(&ex), probe(&ey));
    }
    Ok(())
}

pub fn associative(a: &FeatureStructure, b: &FeatureStructure, c: &FeatureStructure, e: &BindingEnv) -> Law {
    let left = unify(a, b, e).and_then(|(ab, e1)| unify(&ab, c, &e1));
    let right = unify(b, c, e).and_then(|(bc, e1)| unify(a, &bc, &e1));
    prop_assert_eq!(left.is_ok(), right.is_ok());
    if let (Ok((x, ex)), Ok((y, ey))) = (left, right) {
        prop_assert_eq!(resolve(&x, &ex), resolve(&y, &ey));
        prop_assert_eq!(probe(&ex), probe(&ey));
    }
    Ok(())
}

pub fn idempotent(a: &FeatureStructure, e: &BindingEnv) -> Law {
    let (out, e2) = unify(a, a, e).map_err(|_| TestCaseError::fail("self-unification fails"))?;
    prop_assert_eq!(resolve(&out, &e2), resolve(a, e));
    prop_assert_eq!(probe(&e2), probe(e));
    Ok(())
}

pub fn empty_is_identity(a: &FeatureStructure, e: &BindingEnv) -> Law {
    let empty = FeatureStructure::new();
    for r in [unify(a, &empty, e), unify(&empty, a, e)] {
        let (out, e2) = r.map_err(|_| TestCaseError::fail("unifying with [] fails"))?;
        prop_assert_eq!(resolve(&out, &e2), resolve(a, e));
        prop_assert_eq!(probe(&e2), probe(e));
    }
    Ok(())
}

pub fn inputs_are_not_mutated(a: &FeatureStructure, b: &FeatureStructure, e: &BindingEnv) -> Law {
    let (a0, b0, e0) = (a.clone(), b.clone(), e.clone());
    let first = resolved(unify(a, b, e));
    let second = resolved(unify(a, b, e));
    prop_assert_eq!(first, second);
    prop_assert_eq!(a, &a0);
    prop_assert_eq!(b, &b0);
    prop_assert_eq!(e, &e0);
    Ok(())
}

pub fn result_subsumed_by_both_inputs(a: &FeatureStructure, b: &FeatureStructure, e: &BindingEnv) -> Law {
    if let Ok((out, e2)) = unify(a, b, e) {
        let r = resolve(&out, &e2);
        for side in [a, b] {
            for (k, _) in side.iter() {
                prop_assert!(r.get(k).is_some());
            }
            let s = resolve(side, &e2);
            for (k, v) in s.iter() {
                prop_assert_eq!(r.get(k), Some(v));
            }
        }
    }
    Ok(())
}
