//! Unifies two feature structures that share a variable, then shows a clash.
//!
//! `cargo run --example unify`

use metagramme::featstruct::{resolve, unify, BindingEnv, FeatureStructure};

fn main() {
    let subject = FeatureStructure::parse("[num=?0, pers=3]").unwrap();
    let verb = FeatureStructure::parse("[num=sg, mode=?1]").unwrap();
    let env = BindingEnv::new();
    let (out, env) = unify(&subject, &verb, &env).expect("compatible");
    println!("{subject} ⊔ {verb} = {}", resolve(&out, &env));
    println!("?0 is now {}", env.value_of(metagramme::featstruct::VarId(0)));

    let plural = FeatureStructure::parse("[num=pl]").unwrap();
    match unify(&out, &plural, &env) {
        Ok(_) => println!("unexpected success"),
        Err(e) => println!("{} ⊔ {plural} fails: {e}", resolve(&out, &env)),
    }
}
