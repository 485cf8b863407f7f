use std::collections::{BTreeSet, HashSet};

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use super::DslError;
use crate::featstruct::{Atom, FeatureStructure, FeatureValue};

struct Parser {
    toks: Vec<Token>,
    i: usize,
}

type PResult<T> = Result<T, DslError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: tokenize(src)?,
            i: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.i + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn err<T>(&self, expected: impl Into<String>) -> PResult<T> {
        let pos = self.pos();
        Err(DslError::Syntax {
            line: pos.line,
            col: pos.col,
            expected: format!("{}, found {}", expected.into(), self.peek().describe()),
        })
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> PResult<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            self.err(what)
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("`{kw}`"))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err(what),
        }
    }

    fn atom(&mut self, what: &str) -> PResult<Atom> {
        match self.peek().clone() {
            Tok::Ident(s) if Atom::is_valid(&s) => {
                self.bump();
                Ok(Atom::new(s).expect("checked"))
            }
            _ => self.err(what),
        }
    }

    fn string(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Str(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err(what),
        }
    }

    fn var(&mut self, what: &str) -> PResult<String> {
        match self.peek().clone() {
            Tok::Var(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.err(what),
        }
    }

    // ---- metagrammar ----

    fn class_decl(&mut self) -> PResult<MgClassDecl> {
        let pos = self.pos();
        self.expect_keyword("class")?;
        let name = self.ident("a class name")?;
        let (mut imports, mut exports, mut declares) = (Vec::new(), Vec::new(), Vec::new());
        loop {
            if self.is_keyword("import") {
                self.bump();
                while matches!(self.peek(), Tok::Ident(s) if s != "export" && s != "declare")
                    && self.peek_at(1) == &Tok::LBrack
                {
                    imports.push(self.invocation(None)?);
                    self.eat(&Tok::Comma);
                }
            } else if self.is_keyword("export") {
                self.bump();
                self.var_list(&mut exports)?;
            } else if self.is_keyword("declare") {
                self.bump();
                self.var_list(&mut declares)?;
            } else {
                break;
            }
        }
        let body = self.block_body()?;
        Ok(MgClassDecl {
            name,
            imports,
            exports,
            declares,
            body,
            pos,
        })
    }

    fn var_list(&mut self, out: &mut Vec<String>) -> PResult<()> {
        let first = self.var("a variable")?;
        out.push(first);
        loop {
            self.eat(&Tok::Comma);
            match self.peek().clone() {
                Tok::Var(v) => {
                    self.bump();
                    out.push(v);
                }
                _ => return Ok(()),
            }
        }
    }

    /// `{ stmt }`, possibly empty.
    fn block_body(&mut self) -> PResult<Statement> {
        self.expect(Tok::LBrace, "`{`")?;
        if self.eat(&Tok::RBrace) {
            return Ok(Statement::Conjunction(Vec::new()));
        }
        let s = self.disjunction()?;
        self.expect(Tok::RBrace, "`}`")?;
        Ok(s)
    }

    fn disjunction(&mut self) -> PResult<Statement> {
        let mut alts = vec![self.conjunction()?];
        while self.eat(&Tok::Bar) {
            alts.push(self.conjunction()?);
        }
        Ok(if alts.len() == 1 {
            alts.pop().unwrap()
        } else {
            Statement::Disjunction(alts)
        })
    }

    fn conjunction(&mut self) -> PResult<Statement> {
        let mut parts = vec![self.primary()?];
        while self.eat(&Tok::Semi) {
            if matches!(self.peek(), Tok::RBrace | Tok::Bar | Tok::Eof) {
                break;
            }
            parts.push(self.primary()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Statement::Conjunction(parts)
        })
    }

    fn primary(&mut self) -> PResult<Statement> {
        match self.peek().clone() {
            Tok::LBrace => self.block_body(),
            Tok::Dim(d) if d == "syn" => {
                self.bump();
                self.expect(Tok::LBrace, "`{` after <syn>")?;
                let mut stmts = Vec::new();
                while !self.eat(&Tok::RBrace) {
                    if self.eat(&Tok::Semi) {
                        continue;
                    }
                    stmts.push(self.tree_statement()?);
                }
                Ok(Statement::Syn(stmts))
            }
            Tok::Dim(d) if d == "iface" => {
                self.bump();
                let close = if self.eat(&Tok::LBrace) {
                    Tok::RBrace
                } else if self.eat(&Tok::LBrack) {
                    Tok::RBrack
                } else {
                    return self.err("`{` or `[` after <iface>");
                };
                // `<iface>{ [a=b] }` is accepted as well
                let bracketed = close == Tok::RBrace && self.eat(&Tok::LBrack);
                let fs = self.fs_body(if bracketed { &Tok::RBrack } else { &close })?;
                if bracketed {
                    self.expect(Tok::RBrack, "`]`")?;
                }
                self.expect(close, "end of <iface> block")?;
                Ok(Statement::Iface(fs))
            }
            Tok::Var(v) => {
                self.bump();
                self.expect(Tok::Eq, "`=`")?;
                match self.peek().clone() {
                    Tok::Ident(_) => Ok(Statement::Invocation(self.invocation(Some(v))?)),
                    Tok::Var(w) => {
                        self.bump();
                        let rhs = if self.eat(&Tok::Dot) {
                            NodeRef::Field {
                                var: w,
                                field: self.ident("an exported variable name")?,
                            }
                        } else {
                            NodeRef::Var(w)
                        };
                        Ok(Statement::NodeEquation { lhs: v, rhs })
                    }
                    _ => self.err("a class invocation or a variable"),
                }
            }
            Tok::Ident(_) => Ok(Statement::Invocation(self.invocation(None)?)),
            _ => self.err("a statement"),
        }
    }

    fn invocation(&mut self, bind_to: Option<String>) -> PResult<Invocation> {
        let class = self.ident("a class name")?;
        self.expect(Tok::LBrack, "`[`")?;
        let mut args = Vec::new();
        while !self.eat(&Tok::RBrack) {
            if !args.is_empty() {
                self.expect(Tok::Comma, "`,` or `]`")?;
            }
            match self.bump() {
                Tok::Var(v) => args.push(NodeArg::Var(v)),
                Tok::Ident(n) => args.push(NodeArg::Name(n)),
                _ => {
                    self.i -= 1;
                    return self.err("a node argument");
                }
            }
        }
        let decoration = if self.eat(&Tok::StarEq) {
            self.expect(Tok::LBrack, "`[`")?;
            let fs = self.fs_body(&Tok::RBrack)?;
            self.expect(Tok::RBrack, "`]`")?;
            Some(fs)
        } else {
            None
        };
        Ok(Invocation {
            class,
            args,
            decoration,
            bind_to,
        })
    }

    /// `a=b, c=?X` up to (not including) `close`.
    fn fs_body(&mut self, close: &Tok) -> PResult<FsExpr> {
        let mut fs = FsExpr::new();
        while self.peek() != close {
            if !fs.is_empty() {
                self.expect(Tok::Comma, "`,`")?;
            }
            let (k, v) = self.feature_pair()?;
            if fs.insert(k.clone(), v).is_some() {
                return self.err(format!("no duplicate attribute `{k}`"));
            }
        }
        Ok(fs)
    }

    fn feature_pair(&mut self) -> PResult<(String, ValueExpr)> {
        let k = self.atom("an attribute name")?.as_str().to_string();
        self.expect(Tok::Eq, "`=`")?;
        let v = self.value()?;
        Ok((k, v))
    }

    fn value(&mut self) -> PResult<ValueExpr> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(ValueExpr::Var(v))
            }
            _ => Ok(ValueExpr::Atom(self.atom("an atom or a variable")?)),
        }
    }

    fn tree_statement(&mut self) -> PResult<TreeStatement> {
        if self.is_keyword("node") {
            return Ok(TreeStatement::Node(self.node_decl()?));
        }
        let lhs = self.var("`node` or a variable")?;
        let op = match self.bump() {
            Tok::Arrow => RelOp::Idom,
            Tok::ArrowStar => RelOp::Dom,
            Tok::Prec => RelOp::Iprec,
            Tok::PrecStar => RelOp::Prec,
            Tok::Eq => RelOp::Eq,
            _ => {
                self.i -= 1;
                return self.err("a relation (`->`, `->*`, `>>`, `>>*`, `=`)");
            }
        };
        let rhs = self.var("a variable")?;
        Ok(TreeStatement::Relation { lhs, op, rhs })
    }

    fn node_decl(&mut self) -> PResult<NodeDecl> {
        self.expect_keyword("node")?;
        let mut node = NodeDecl::default();
        if let Tok::Var(v) = self.peek().clone() {
            self.bump();
            node.var = Some(v);
        }
        if self.eat(&Tok::LParen) {
            node.name = Some(self.ident("a node name")?);
            self.expect(Tok::RParen, "`)`")?;
        }
        if self.eat(&Tok::LBrack) {
            self.node_features(&mut node)?;
        }
        if self.eat(&Tok::LBrace) {
            while !self.eat(&Tok::RBrace) {
                if self.eat(&Tok::Semi) {
                    continue;
                }
                node.children.push(self.node_decl()?);
            }
        }
        Ok(node)
    }

    fn node_features(&mut self, node: &mut NodeDecl) -> PResult<()> {
        let mut seen = HashSet::new();
        let mut first = true;
        while !self.eat(&Tok::RBrack) {
            if !first {
                self.expect(Tok::Comma, "`,` or `]`")?;
            }
            first = false;
            let key = self.atom("a node feature")?.as_str().to_string();
            let dup = |p: &Self, k: &str| p.err::<()>(format!("no duplicate node feature `{k}`"));
            match key.as_str() {
                "top" | "bot" => {
                    if !seen.insert(key.clone()) {
                        return dup(self, &key);
                    }
                    self.expect(Tok::Colon, "`:`")?;
                    self.expect(Tok::LBrack, "`[`")?;
                    let fs = self.fs_body(&Tok::RBrack)?;
                    self.expect(Tok::RBrack, "`]`")?;
                    let target = if key == "top" { &mut node.top } else { &mut node.bot };
                    for (k, v) in fs {
                        if target.insert(k.clone(), v).is_some() {
                            return dup(self, &k);
                        }
                    }
                }
                "cat" => {
                    if !seen.insert(key.clone()) {
                        return dup(self, &key);
                    }
                    self.expect(Tok::Eq, "`=`")?;
                    node.cat = Some(self.atom("a category")?);
                }
                "mark" => {
                    if !seen.insert(key.clone()) {
                        return dup(self, &key);
                    }
                    self.expect(Tok::Eq, "`=`")?;
                    let m = self.atom("a mark")?;
                    match Mark::parse(m.as_str()) {
                        Some(m) => node.mark = m,
                        None => {
                            self.i -= 1;
                            return self.err("one of none, anchor, subst, foot, coanchor");
                        }
                    }
                }
                _ => {
                    self.expect(Tok::Eq, "`=`")?;
                    let v = self.value()?;
                    if node.top.insert(key.clone(), v).is_some() {
                        return dup(self, &key);
                    }
                }
            }
        }
        Ok(())
    }

    // ---- lexicon ----

    fn lexicon_class(
        &mut self,
        lemmas: &mut Vec<LemmaEntryDecl>,
        morphs: &mut Vec<MorphEntryDecl>,
    ) -> PResult<()> {
        self.expect_keyword("class")?;
        let name = self.ident("a class name")?;
        self.expect(Tok::LBrace, "`{`")?;
        loop {
            match self.peek().clone() {
                Tok::Dim(d) if d == "lemma" => {
                    self.bump();
                    lemmas.push(self.lemma_block(&name)?);
                }
                Tok::Dim(d) if d == "morpho" => {
                    self.bump();
                    morphs.push(self.morph_block(&name)?);
                }
                Tok::Semi => {
                    self.bump();
                }
                Tok::RBrace => {
                    self.bump();
                    return Ok(());
                }
                _ => return self.err("`<lemma>`, `<morpho>` or `}`"),
            }
        }
    }

    fn field_sep(&mut self) -> PResult<bool> {
        if self.eat(&Tok::RBrace) {
            return Ok(false);
        }
        self.expect(Tok::Semi, "`;` or `}`")?;
        Ok(!self.eat(&Tok::RBrace))
    }

    fn set_once<T>(&self, slot: &mut Option<T>, v: T, field: &str) -> PResult<()> {
        if slot.is_some() {
            return self.err(format!("a single `{field}` field"));
        }
        *slot = Some(v);
        Ok(())
    }

    fn lemma_block(&mut self, name: &str) -> PResult<LemmaEntryDecl> {
        self.expect(Tok::LBrace, "`{`")?;
        let (mut entry, mut cat, mut fam) = (None, None, None);
        let mut filters = FeatureStructure::new();
        let (mut coanchors, mut equations) = (Vec::new(), Vec::new());
        let mut more = !self.eat(&Tok::RBrace);
        while more {
            let field = self.ident("a lemma field")?;
            match field.as_str() {
                "entry" => {
                    self.expect(Tok::LArrow, "`<-`")?;
                    let v = self.string("a quoted lemma")?;
                    self.set_once(&mut entry, v, "entry")?;
                }
                "cat" => {
                    self.expect(Tok::LArrow, "`<-`")?;
                    let v = self.atom("a category")?;
                    self.set_once(&mut cat, v, "cat")?;
                }
                "fam" => {
                    self.expect(Tok::LArrow, "`<-`")?;
                    let v = self.ident("a family name")?;
                    self.set_once(&mut fam, v, "fam")?;
                }
                "filter" => {
                    let k = self.atom("an attribute name")?;
                    self.expect(Tok::Eq, "`=`")?;
                    let v = self.atom("an atom")?;
                    if filters.insert(k.as_str(), FeatureValue::Atom(v)).is_some() {
                        return self.err(format!("a single filter on `{k}`"));
                    }
                }
                "coanchor" => {
                    let node = self.ident("a node name")?;
                    self.expect(Tok::Arrow, "`->`")?;
                    let form = self.string("a quoted form")?;
                    self.expect(Tok::Slash, "`/`")?;
                    let cat = self.atom("a category")?;
                    coanchors.push(Coanchor { node, form, cat });
                }
                "equation" => {
                    let node = self.ident("a node name")?;
                    self.expect(Tok::Arrow, "`->`")?;
                    let mut features = FeatureStructure::new();
                    loop {
                        let k = self.atom("an attribute name")?;
                        self.expect(Tok::Eq, "`=`")?;
                        let v = self.atom("an atom")?;
                        features.insert(k.as_str(), FeatureValue::Atom(v));
                        if !self.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    equations.push(Equation { node, features });
                }
                _ => {
                    self.i -= 1;
                    return self.err("entry, cat, fam, filter, coanchor or equation");
                }
            }
            more = self.field_sep()?;
        }
        let missing = |field: &str| DslError::MissingField {
            block: "lemma".into(),
            field: field.into(),
        };
        Ok(LemmaEntryDecl {
            name: name.to_string(),
            entry: entry.ok_or_else(|| missing("entry"))?,
            cat: cat.ok_or_else(|| missing("cat"))?,
            fam: fam.ok_or_else(|| missing("fam"))?,
            filters,
            coanchors,
            equations,
        })
    }

    fn morph_block(&mut self, name: &str) -> PResult<MorphEntryDecl> {
        self.expect(Tok::LBrace, "`{`")?;
        let (mut morph, mut lemma, mut cat, mut feats) = (None, None, None, None);
        let mut more = !self.eat(&Tok::RBrace);
        while more {
            let field = self.ident("a morpho field")?;
            self.expect(Tok::LArrow, "`<-`")?;
            match field.as_str() {
                "morph" => {
                    let v = self.string("a quoted form")?;
                    self.set_once(&mut morph, v, "morph")?;
                }
                "lemma" => {
                    let v = self.string("a quoted lemma")?;
                    self.set_once(&mut lemma, v, "lemma")?;
                }
                "cat" => {
                    let v = self.atom("a category")?;
                    self.set_once(&mut cat, v, "cat")?;
                }
                "feats" => {
                    self.expect(Tok::LBrack, "`[`")?;
                    let mut fs = FeatureStructure::new();
                    while !self.eat(&Tok::RBrack) {
                        if !fs.is_empty() {
                            self.expect(Tok::Comma, "`,`")?;
                        }
                        let k = self.atom("an attribute name")?;
                        self.expect(Tok::Eq, "`=`")?;
                        let v = self.atom("an atom")?;
                        if fs.insert(k.as_str(), FeatureValue::Atom(v)).is_some() {
                            return self.err(format!("no duplicate attribute `{k}`"));
                        }
                    }
                    self.set_once(&mut feats, fs, "feats")?;
                }
                _ => {
                    self.i -= 2;
                    return self.err("morph, lemma, cat or feats");
                }
            }
            more = self.field_sep()?;
        }
        let missing = |field: &str| DslError::MissingField {
            block: "morpho".into(),
            field: field.into(),
        };
        Ok(MorphEntryDecl {
            name: name.to_string(),
            morph: morph.ok_or_else(|| missing("morph"))?,
            lemma: lemma.ok_or_else(|| missing("lemma"))?,
            cat: cat.ok_or_else(|| missing("cat"))?,
            feats: feats.unwrap_or_default(),
        })
    }
}

/// Parses a metagrammar source into class declarations.
///
/// Classes without imports are scope-checked here; classes that import
/// others are checked once the whole project is linked.
pub fn parse_metagrammar(source: &str) -> Result<Vec<MgClassDecl>, DslError> {
    let mut p = Parser::new(source)?;
    let mut out: Vec<MgClassDecl> = Vec::new();
    let mut names = HashSet::new();
    while p.peek() != &Tok::Eof {
        let decl = p.class_decl()?;
        if !names.insert(decl.name.clone()) {
            return Err(DslError::DuplicateClass { name: decl.name });
        }
        out.push(decl);
    }
    for decl in out.iter().filter(|d| d.imports.is_empty()) {
        check_declared(decl, &BTreeSet::new())?;
    }
    Ok(out)
}

/// Every variable of `decl` must be declared or provided by `imported`.
pub(crate) fn check_declared(decl: &MgClassDecl, imported: &BTreeSet<String>) -> Result<(), DslError> {
    let mut used = Vec::new();
    used.extend(decl.exports.iter().cloned());
    for inv in &decl.imports {
        invocation_vars(inv, &mut used);
    }
    statement_vars(&decl.body, &mut used);
    for var in used {
        if !decl.declares.contains(&var) && !imported.contains(&var) {
            return Err(DslError::UndeclaredVariable {
                class: decl.name.clone(),
                var,
            });
        }
    }
    Ok(())
}

fn fs_vars(fs: &FsExpr, out: &mut Vec<String>) {
    out.extend(fs.values().filter_map(|v| match v {
        ValueExpr::Var(n) => Some(n.clone()),
        ValueExpr::Atom(_) => None,
    }));
}

fn invocation_vars(inv: &Invocation, out: &mut Vec<String>) {
    out.extend(inv.bind_to.iter().cloned());
    for a in &inv.args {
        if let NodeArg::Var(v) = a {
            out.push(v.clone());
        }
    }
    if let Some(d) = &inv.decoration {
        fs_vars(d, out);
    }
}

fn node_vars(n: &NodeDecl, out: &mut Vec<String>) {
    out.extend(n.var.iter().cloned());
    fs_vars(&n.top, out);
    fs_vars(&n.bot, out);
    for c in &n.children {
        node_vars(c, out);
    }
}

fn statement_vars(s: &Statement, out: &mut Vec<String>) {
    match s {
        Statement::Conjunction(xs) | Statement::Disjunction(xs) => {
            xs.iter().for_each(|x| statement_vars(x, out))
        }
        Statement::Syn(ts) => {
            for t in ts {
                match t {
                    TreeStatement::Node(n) => node_vars(n, out),
                    TreeStatement::Relation { lhs, rhs, .. } => {
                        out.push(lhs.clone());
                        out.push(rhs.clone());
                    }
                }
            }
        }
        Statement::Iface(fs) => fs_vars(fs, out),
        Statement::Invocation(inv) => invocation_vars(inv, out),
        Statement::NodeEquation { lhs, rhs } => {
            out.push(lhs.clone());
            match rhs {
                NodeRef::Var(v) | NodeRef::Field { var: v, .. } => out.push(v.clone()),
            }
        }
    }
}

/// Parses `<lemma>` and `<morpho>` classes, which may be freely interleaved.
pub fn parse_lexicon(
    source: &str,
) -> Result<(Vec<LemmaEntryDecl>, Vec<MorphEntryDecl>), DslError> {
    let mut p = Parser::new(source)?;
    let (mut lemmas, mut morphs) = (Vec::new(), Vec::new());
    while p.peek() != &Tok::Eof {
        p.lexicon_class(&mut lemmas, &mut morphs)?;
    }
    Ok((lemmas, morphs))
}
