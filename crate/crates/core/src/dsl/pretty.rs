use std::fmt::Write;

use super::ast::*;
use crate::featstruct::{FeatureStructure, FeatureValue};

fn fs_expr(fs: &FsExpr) -> String {
    let items: Vec<String> = fs
        .iter()
        .map(|(k, v)| match v {
            ValueExpr::Atom(a) => format!("{k}={a}"),
            ValueExpr::Var(n) => format!("{k}=?{n}"),
        })
        .collect();
    format!("[{}]", items.join(", "))
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn invocation(inv: &Invocation) -> String {
    let mut s = String::new();
    if let Some(b) = &inv.bind_to {
        write!(s, "?{b} = ").unwrap();
    }
    let args: Vec<String> = inv
        .args
        .iter()
        .map(|a| match a {
            NodeArg::Var(v) => format!("?{v}"),
            NodeArg::Name(n) => n.clone(),
        })
        .collect();
    write!(s, "{}[{}]", inv.class, args.join(", ")).unwrap();
    if let Some(d) = &inv.decoration {
        write!(s, " *= {}", fs_expr(d)).unwrap();
    }
    s
}

fn node(n: &NodeDecl, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    write!(out, "{pad}node").unwrap();
    if let Some(v) = &n.var {
        write!(out, " ?{v}").unwrap();
    }
    if let Some(name) = &n.name {
        write!(out, " ({name})").unwrap();
    }
    let mut feats = Vec::new();
    if let Some(c) = &n.cat {
        feats.push(format!("cat={c}"));
    }
    if n.mark != Mark::None {
        feats.push(format!("mark={}", n.mark.as_str()));
    }
    if !n.top.is_empty() {
        feats.push(format!("top:{}", fs_expr(&n.top)));
    }
    if !n.bot.is_empty() {
        feats.push(format!("bot:{}", fs_expr(&n.bot)));
    }
    if !feats.is_empty() {
        write!(out, " [{}]", feats.join(", ")).unwrap();
    }
    if n.children.is_empty() {
        out.push('\n');
    } else {
        out.push_str(" {\n");
        for c in &n.children {
            node(c, depth + 1, out);
        }
        writeln!(out, "{pad}}}").unwrap();
    }
}

fn statement(s: &Statement, depth: usize, out: &mut String) {
    let pad = "  ".repeat(depth);
    match s {
        Statement::Conjunction(parts) => {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    writeln!(out, "{pad};").unwrap();
                }
                grouped(p, matches!(p, Statement::Conjunction(_) | Statement::Disjunction(_)), depth, out);
            }
        }
        Statement::Disjunction(alts) => {
            for (i, a) in alts.iter().enumerate() {
                if i > 0 {
                    writeln!(out, "{pad}|").unwrap();
                }
                let braces = match a {
                    Statement::Disjunction(_) => true,
                    Statement::Conjunction(xs) => xs.is_empty(),
                    _ => false,
                };
                grouped(a, braces, depth, out);
            }
        }
        Statement::Syn(ts) => {
            writeln!(out, "{pad}<syn> {{").unwrap();
            for t in ts {
                match t {
                    TreeStatement::Node(n) => node(n, depth + 1, out),
                    TreeStatement::Relation { lhs, op, rhs } => {
                        writeln!(out, "{pad}  ?{lhs} {} ?{rhs};", op.symbol()).unwrap()
                    }
                }
            }
            writeln!(out, "{pad}}}").unwrap();
        }
        Statement::Iface(fs) => writeln!(out, "{pad}<iface> {}", fs_expr(fs)).unwrap(),
        Statement::Invocation(inv) => writeln!(out, "{pad}{}", invocation(inv)).unwrap(),
        Statement::NodeEquation { lhs, rhs } => {
            let r = match rhs {
                NodeRef::Var(v) => format!("?{v}"),
                NodeRef::Field { var, field } => format!("?{var}.{field}"),
            };
            writeln!(out, "{pad}?{lhs} = {r}").unwrap();
        }
    }
}

fn grouped(s: &Statement, braces: bool, depth: usize, out: &mut String) {
    if braces {
        let pad = "  ".repeat(depth);
        writeln!(out, "{pad}{{").unwrap();
        statement(s, depth + 1, out);
        writeln!(out, "{pad}}}").unwrap();
    } else {
        statement(s, depth, out);
    }
}

/// Renders class declarations in the concrete syntax accepted by
/// [`parse_metagrammar`](super::parse_metagrammar).
pub fn pretty_metagrammar(classes: &[MgClassDecl]) -> String {
    let mut out = String::new();
    for (i, c) in classes.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        writeln!(out, "class {}", c.name).unwrap();
        if !c.imports.is_empty() {
            let imports: Vec<String> = c.imports.iter().map(invocation).collect();
            writeln!(out, "import {}", imports.join(" ")).unwrap();
        }
        if !c.exports.is_empty() {
            let v: Vec<String> = c.exports.iter().map(|x| format!("?{x}")).collect();
            writeln!(out, "export {}", v.join(" ")).unwrap();
        }
        if !c.declares.is_empty() {
            let v: Vec<String> = c.declares.iter().map(|x| format!("?{x}")).collect();
            writeln!(out, "declare {}", v.join(" ")).unwrap();
        }
        out.push_str("{\n");
        match &c.body {
            Statement::Conjunction(xs) if xs.is_empty() => {}
            body => statement(body, 1, &mut out),
        }
        out.push_str("}\n");
    }
    out
}

fn atom_fs(fs: &FeatureStructure) -> Vec<(String, String)> {
    fs.iter()
        .map(|(k, v)| {
            let v = match v {
                FeatureValue::Atom(a) => a.to_string(),
                FeatureValue::Var(v) => v.to_string(),
            };
            (k.clone(), v)
        })
        .collect()
}

/// Renders lexicon entries in the concrete syntax accepted by
/// [`parse_lexicon`](super::parse_lexicon). Lemma blocks come first.
pub fn pretty_lexicon(lemmas: &[LemmaEntryDecl], morphs: &[MorphEntryDecl]) -> String {
    let mut out = String::new();
    for l in lemmas {
        writeln!(out, "class {} {{\n<lemma> {{", l.name).unwrap();
        let mut fields = vec![
            format!("entry <- {}", quoted(&l.entry)),
            format!("cat <- {}", l.cat),
            format!("fam <- {}", l.fam),
        ];
        for (k, v) in atom_fs(&l.filters) {
            fields.push(format!("filter {k} = {v}"));
        }
        for c in &l.coanchors {
            fields.push(format!("coanchor {} -> {}/{}", c.node, quoted(&c.form), c.cat));
        }
        for e in &l.equations {
            let fs: Vec<String> = atom_fs(&e.features)
                .into_iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            fields.push(format!("equation {} -> {}", e.node, fs.join(", ")));
        }
        writeln!(out, " {} }}}}", fields.join(";\n ")).unwrap();
    }
    for m in morphs {
        writeln!(out, "class {} {{\n<morpho> {{", m.name).unwrap();
        let mut fields = vec![
            format!("morph <- {}", quoted(&m.morph)),
            format!("lemma <- {}", quoted(&m.lemma)),
            format!("cat <- {}", m.cat),
        ];
        if !m.feats.is_empty() {
            fields.push(format!("feats <- {}", m.feats));
        }
        writeln!(out, " {} }}}}", fields.join(";\n ")).unwrap();
    }
    out
}
