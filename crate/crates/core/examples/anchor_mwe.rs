//! Anchors an MWE lemma in its family and shows which templates survive the
//! lexical filters, with coanchors and equations filled in.
//!
//! `cargo run --example anchor_mwe -- mweLemmeFaireProfilBas`

use metagramme::anchoring::anchor_lemma;
use metagramme::minigrammar::{project, Version};
use metagramme::treesolver::compile_family;

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "mweLemmePrendreLaPorte".to_string());
    let p = project(Version::MwePlus).expect("bundled assets load");
    let Some(lemma) = p.lexicon.lemmas.iter().find(|l| l.name == name) else {
        eprintln!("no lemma class `{name}`");
        std::process::exit(1);
    };
    let templates = compile_family(&lemma.fam, &p.grammar).expect("family compiles");
    let a = anchor_lemma(lemma, &templates);
    println!("{name}: filters {}, {} of {} {} templates kept", lemma.filters, a.trees.len(), templates.len(), lemma.fam);
    for t in &a.trees {
        println!("  {:<14} {:<32} {}", t.template, t.shape(), t.lemma_id);
        for n in t.tree.nodes.iter().filter(|n| n.lex.is_some()) {
            println!("      {} {:?} top={}", n.cat, n.lex.as_deref().unwrap_or(""), n.top);
        }
    }
    for d in &a.diagnostics {
        println!("  note: {d}");
    }
}
