use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::dsl::Mark;
use crate::featstruct::{Atom, FeatureStructure, FeatureValue, VarId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TreeKind {
    Initial,
    Auxiliary,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TemplateNode {
    pub id: usize,
    pub cat: Atom,
    pub mark: Mark,
    pub top: FeatureStructure,
    pub bot: FeatureStructure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// Surface form once the node is anchored.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lex: Option<String>,
}

/// An elementary tree. Nodes are stored in preorder, so the root is node 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeTemplate {
    pub id: String,
    pub family: String,
    pub kind: TreeKind,
    pub nodes: Vec<TemplateNode>,
    pub iface: FeatureStructure,
    pub provenance: Vec<String>,
}

impl TreeTemplate {
    pub fn root(&self) -> &TemplateNode {
        &self.nodes[0]
    }

    pub fn anchor(&self) -> Option<usize> {
        self.nodes.iter().position(|n| n.mark == Mark::Anchor)
    }

    pub fn foot(&self) -> Option<usize> {
        self.nodes.iter().position(|n| n.mark == Mark::Foot)
    }

    pub fn node_named(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.name.as_deref() == Some(name))
    }

    /// Largest feature variable number used, if any.
    pub fn max_var(&self) -> Option<u32> {
        self.nodes
            .iter()
            .flat_map(|n| n.top.vars().chain(n.bot.vars()))
            .chain(self.iface.vars())
            .map(|v| v.0)
            .max()
    }

    /// Bracketless shape such as `S(N↓ VN(V⋄) N↓)`; categories upper-cased,
    /// marks as suffixes.
    pub fn shape(&self) -> String {
        let mut s = String::new();
        self.shape_at(0, &mut s);
        s
    }

    fn shape_at(&self, i: usize, out: &mut String) {
        let n = &self.nodes[i];
        out.push_str(&n.cat.as_str().to_uppercase());
        out.push_str(n.mark.suffix());
        if !n.children.is_empty() {
            out.push('(');
            for (k, &c) in n.children.iter().enumerate() {
                if k > 0 {
                    out.push(' ');
                }
                self.shape_at(c, out);
            }
            out.push(')');
        }
    }

    /// Serialization used for ordering and deduplication: every node with
    /// its features, then the interface. Independent of id and family.
    pub fn canonical(&self) -> String {
        let mut s = String::new();
        for n in &self.nodes {
            let parent = n.parent.map_or("-".to_string(), |p| p.to_string());
            write!(
                s,
                "{}{}{} {} {} {} {};",
                n.cat,
                n.mark.suffix(),
                n.name.as_ref().map_or(String::new(), |x| format!("({x})")),
                parent,
                n.top,
                n.bot,
                n.lex.as_deref().unwrap_or("-")
            )
            .unwrap();
        }
        write!(s, " iface {}", self.iface).unwrap();
        s
    }

    /// Renumbers feature variables by first occurrence (preorder, top before
    /// bot, then iface).
    pub fn renumber_vars(&mut self) {
        let mut map: BTreeMap<VarId, VarId> = BTreeMap::new();
        let rename = |fs: &FeatureStructure, map: &mut BTreeMap<VarId, VarId>| {
            for v in fs.vars() {
                let next = VarId(map.len() as u32);
                map.entry(v).or_insert(next);
            }
        };
        for n in &self.nodes {
            rename(&n.top, &mut map);
            rename(&n.bot, &mut map);
        }
        rename(&self.iface, &mut map);
        let apply = |fs: &FeatureStructure| fs.map_vars(|v| FeatureValue::Var(map[&v]));
        for n in &mut self.nodes {
            n.top = apply(&n.top);
            n.bot = apply(&n.bot);
        }
        self.iface = apply(&self.iface);
    }
}
