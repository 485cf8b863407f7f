//! Parses a sentence with the MWE-aware mini-grammar and prints every
//! derivation, marking idiomatic readings.
//!
//! `cargo run --example parse_sentence -- "Jean prend la porte"`

use metagramme::minigrammar::{compiled, Version};

fn main() {
    let sentence = std::env::args().nth(1).unwrap_or_else(|| "Jean prend la porte".to_string());
    let g = compiled(Version::MwePlus).expect("bundled grammar compiles");
    let r = g.parse_sentence(&sentence);
    for d in &r.diagnostics {
        eprintln!("{d}");
    }
    let report = r.report;
    println!("{sentence}: {} derivation(s), idiomatic={}", report.derivations.len(), report.idiomatic);
    for d in &report.derivations {
        let tag = if d.is_idiomatic() { d.mwe_readings.join(",") } else { "literal".into() };
        println!("[{tag}]\n  {}\n  {}", d.derived, d.derivation);
    }
}
