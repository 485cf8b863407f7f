//! Compiles one family of the bundled grammar and prints its templates.
//!
//! `cargo run --example compile_family -- mwen0Vn1`

use std::time::Instant;

use metagramme::minigrammar::{project, Version};
use metagramme::treesolver::{compile_family_with, SolverCaps};

fn main() {
    let family = std::env::args().nth(1).unwrap_or_else(|| "n0Vn1".to_string());
    let p = project(Version::MwePlus).expect("bundled assets load");
    let start = Instant::now();
    let (templates, stats) = compile_family_with(&family, &p.grammar, SolverCaps::default()).expect("family compiles");
    println!("{family}: {} templates in {:?}", templates.len(), start.elapsed());
    for t in &templates {
        println!("{:<14} {:<40} {}", t.id, t.shape(), t.iface);
    }
    println!("{}", serde_json::to_string_pretty(&stats).unwrap());
}
