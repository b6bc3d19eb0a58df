use std::fmt;

use serde::{Deserialize, Serialize};

/// The eight binary operations of the H-expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum OpKind {
    Join,
    Union,
    And,
    CompEq,
    CompLt,
    CompGt,
    Sub,
    Add,
}

impl OpKind {
    pub const ALL: [OpKind; 8] = [
        OpKind::Join,
        OpKind::Union,
        OpKind::And,
        OpKind::CompEq,
        OpKind::CompLt,
        OpKind::CompGt,
        OpKind::Sub,
        OpKind::Add,
    ];

    /// Resolves an operation name, ignoring case. Accepts both the symbolic
    /// comparison spellings (`comp_=`) and the word spellings (`comp_eq`).
    pub fn from_name(name: &str) -> Option<OpKind> {
        let lower = name.to_ascii_lowercase();
        let kind = match lower.as_str() {
            "join" => OpKind::Join,
            "union" => OpKind::Union,
            "and" => OpKind::And,
            "comp_=" | "comp_eq" | "comp=" => OpKind::CompEq,
            "comp_<" | "comp_lt" | "comp<" => OpKind::CompLt,
            "comp_>" | "comp_gt" | "comp>" => OpKind::CompGt,
            "sub" => OpKind::Sub,
            "add" => OpKind::Add,
            _ => return None,
        };
        Some(kind)
    }

    /// Canonical upper-case spelling used by the serializer.
    pub fn canonical_name(self) -> &'static str {
        match self {
            OpKind::Join => "JOIN",
            OpKind::Union => "UNION",
            OpKind::And => "AND",
            OpKind::CompEq => "COMP_=",
            OpKind::CompLt => "COMP_<",
            OpKind::CompGt => "COMP_>",
            OpKind::Sub => "SUB",
            OpKind::Add => "ADD",
        }
    }

    pub fn is_comparison(self) -> bool {
        matches!(self, OpKind::CompEq | OpKind::CompLt | OpKind::CompGt)
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canonical_name())
    }
}

/// A single-hop question at a leaf of the tree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Primitive {
    pub text: String,
    /// Main entity supplied by the dataset builder. Never part of the
    /// textual form.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entity_hint: Option<String>,
}

impl Primitive {
    pub fn new(text: impl Into<String>) -> Self {
        Primitive {
            text: text.into(),
            entity_hint: None,
        }
    }

    pub fn with_hint(text: impl Into<String>, hint: impl Into<String>) -> Self {
        Primitive {
            text: text.into(),
            entity_hint: Some(hint.into()),
        }
    }
}

/// H-expression tree. `Operation` is written `OP[ left, right ]`, where
/// `left` is q2 and `right` is q1 (q1 executes first).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum HExpr {
    Primitive(Primitive),
    Operation {
        kind: OpKind,
        left: Box<HExpr>,
        right: Box<HExpr>,
    },
}

impl HExpr {
    pub fn primitive(text: impl Into<String>) -> HExpr {
        HExpr::Primitive(Primitive::new(text))
    }

    pub fn op(kind: OpKind, left: HExpr, right: HExpr) -> HExpr {
        HExpr::Operation {
            kind,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Number of nodes on the longest root-to-leaf path; a bare primitive
    /// has depth 1.
    pub fn depth(&self) -> usize {
        match self {
            HExpr::Primitive(_) => 1,
            HExpr::Operation { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            HExpr::Primitive(_) => 1,
            HExpr::Operation { left, right, .. } => left.leaf_count() + right.leaf_count(),
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            HExpr::Primitive(_) => 1,
            HExpr::Operation { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    /// Follows `path` from this node.
    pub fn get(&self, path: &NodePath) -> Option<&HExpr> {
        let mut node = self;
        for branch in path.branches() {
            node = match (node, branch) {
                (HExpr::Operation { left, .. }, Branch::Left) => left,
                (HExpr::Operation { right, .. }, Branch::Right) => right,
                (HExpr::Primitive(_), _) => return None,
            };
        }
        Some(node)
    }

    /// Structural equality that ignores entity hints.
    pub fn same_shape(&self, other: &HExpr) -> bool {
        match (self, other) {
            (HExpr::Primitive(a), HExpr::Primitive(b)) => a.text == b.text,
            (
                HExpr::Operation {
                    kind: ka,
                    left: la,
                    right: ra,
                },
                HExpr::Operation {
                    kind: kb,
                    left: lb,
                    right: rb,
                },
            ) => ka == kb && la.same_shape(lb) && ra.same_shape(rb),
            _ => false,
        }
    }
}

impl fmt::Display for HExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::serialize(self))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Branch {
    Left,
    Right,
}

/// Location of a node, as the sequence of branches taken from the root.
/// Displayed as `root`, `root/L`, `root/R/L`, ...
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodePath(Vec<Branch>);

impl NodePath {
    pub fn root() -> Self {
        NodePath(Vec::new())
    }

    pub fn child(&self, branch: Branch) -> Self {
        let mut v = self.0.clone();
        v.push(branch);
        NodePath(v)
    }

    pub fn branches(&self) -> &[Branch] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for NodePath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("root")?;
        for b in &self.0 {
            f.write_str(match b {
                Branch::Left => "/L",
                Branch::Right => "/R",
            })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for NodePath {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let rest = s
            .strip_prefix("root")
            .ok_or_else(|| format!("node path must start with 'root': {s:?}"))?;
        let mut branches = Vec::new();
        for part in rest.split('/').skip(1) {
            match part {
                "L" => branches.push(Branch::Left),
                "R" => branches.push(Branch::Right),
                other => return Err(format!("bad node path segment {other:?}")),
            }
        }
        if !rest.is_empty() && !rest.starts_with('/') {
            return Err(format!("bad node path {s:?}"));
        }
        Ok(NodePath(branches))
    }
}

impl Serialize for NodePath {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for NodePath {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn op_names_are_case_insensitive() {
        for name in ["JOIN", "join", "Join"] {
            assert_eq!(OpKind::from_name(name), Some(OpKind::Join));
        }
        assert_eq!(OpKind::from_name("comp_="), Some(OpKind::CompEq));
        assert_eq!(OpKind::from_name("COMP_<"), Some(OpKind::CompLt));
        assert_eq!(OpKind::from_name("Comp_>"), Some(OpKind::CompGt));
        assert_eq!(OpKind::from_name("FOO"), None);
        assert_eq!(OpKind::from_name("or"), None);
    }

    #[test]
    fn every_kind_round_trips_through_its_canonical_name() {
        for kind in OpKind::ALL {
            assert_eq!(OpKind::from_name(kind.canonical_name()), Some(kind));
        }
    }

    #[test]
    fn node_path_display_and_parse() {
        let p = NodePath::root().child(Branch::Right).child(Branch::Left);
        assert_eq!(p.to_string(), "root/R/L");
        assert_eq!("root/R/L".parse::<NodePath>().unwrap(), p);
        assert_eq!("root".parse::<NodePath>().unwrap(), NodePath::root());
        assert!("rootx".parse::<NodePath>().is_err());
    }

    #[test]
    fn depth_counts_nodes_on_longest_path() {
        let chain = HExpr::op(
            OpKind::Join,
            HExpr::primitive("q4"),
            HExpr::op(
                OpKind::Join,
                HExpr::primitive("q3"),
                HExpr::op(OpKind::Join, HExpr::primitive("q2"), HExpr::primitive("q1")),
            ),
        );
        assert_eq!(chain.depth(), 4);
        assert_eq!(chain.leaf_count(), 4);
        assert_eq!(chain.node_count(), 7);
    }
}
