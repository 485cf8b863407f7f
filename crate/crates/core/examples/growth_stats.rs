//! Class and MWE lemma growth between the bundled projects, and the
//! percentage rule applied to larger counts.
//!
//! `cargo run --example growth_stats`

use metagramme::cli::{growth_stats, percent_delta};
use metagramme::minigrammar::assets_dir;

fn main() {
    let projects = assets_dir().join("projects");
    for (a, b) in [("frenchtag.toml", "mwe.toml"), ("mwe.toml", "mwe-plus.toml")] {
        let s = growth_stats(&projects.join(a), &projects.join(b)).expect("projects load");
        println!(
            "{a} -> {b}: classes {} -> {} ({}), MWE lemmas {} -> {} ({})",
            s.before.classes, s.after.classes, s.classes_delta, s.before.mwe_lemmas, s.after.mwe_lemmas, s.mwe_lemmas_delta
        );
    }
    for (old, new) in [(285, 337), (5, 31), (337, 341)] {
        println!("{old} -> {new}: {}", percent_delta(old, new));
    }
}
