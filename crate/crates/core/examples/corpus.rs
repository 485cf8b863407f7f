//! Runs the bundled corpus and prints one line per sentence with its
//! expectation, followed by the skipped items.
//!
//! `cargo run --example corpus`

use metagramme::minigrammar::{compiled, corpus, skipped, Version};

fn main() {
    let g = compiled(Version::MwePlus).expect("bundled grammar compiles");
    let entries = corpus().expect("bundled corpus parses");
    let mut met = 0;
    for e in &entries {
        let r = g.parse_sentence_as(&e.sentence, e.start.as_ref().unwrap_or(&g.start_cat)).report;
        let ok = e.expect.met_by(&r);
        met += ok as usize;
        let mark = if ok { "ok " } else { "BAD" };
        println!("{mark} {:<12} {:<20} {:>2} parse(s)  {}", e.id, e.expect, r.derivations.len(), e.sentence);
    }
    println!("{met}/{} expectations met", entries.len());
    for (id, reason) in skipped() {
        println!("skipped {id}: {reason}");
    }
}
