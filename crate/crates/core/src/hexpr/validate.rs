use serde::{Deserialize, Serialize};

use super::ast::{Branch, HExpr, NodePath, OpKind, Primitive};
use super::placeholder::PlaceholderRecognizer;

pub const DEFAULT_MAX_DEPTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub node_path: NodePath,
}

impl Diagnostic {
    pub fn error(code: &str, message: impl Into<String>, node_path: NodePath) -> Self {
        Diagnostic {
            severity: Severity::Error,
            code: code.to_string(),
            message: message.into(),
            node_path,
        }
    }

    pub fn warning(code: &str, message: impl Into<String>, node_path: NodePath) -> Self {
        Diagnostic {
            severity: Severity::Warning,
            code: code.to_string(),
            message: message.into(),
            node_path,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub executable: bool,
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn from_diagnostics(diagnostics: Vec<Diagnostic>) -> Self {
        let executable = !diagnostics.iter().any(|d| d.severity == Severity::Error);
        ValidationReport {
            executable,
            diagnostics,
        }
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }
}

#[derive(Debug, Clone)]
pub struct ValidateConfig {
    pub max_depth: usize,
    pub recognizer: PlaceholderRecognizer,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            max_depth: DEFAULT_MAX_DEPTH,
            recognizer: PlaceholderRecognizer::default(),
        }
    }
}

/// Primitive paths in execution order: right subtree, then left subtree.
/// Answer slot `Ans#k` belongs to the k-th element.
pub fn execution_order(expr: &HExpr) -> Vec<NodePath> {
    fn walk(node: &HExpr, path: NodePath, out: &mut Vec<NodePath>) {
        match node {
            HExpr::Primitive(_) => out.push(path),
            HExpr::Operation { left, right, .. } => {
                walk(right, path.child(Branch::Right), out);
                walk(left, path.child(Branch::Left), out);
            }
        }
    }
    let mut out = Vec::with_capacity(expr.leaf_count());
    walk(expr, NodePath::root(), &mut out);
    out
}

/// Primitives paired with their paths, in execution order.
pub fn primitives_in_order(expr: &HExpr) -> Vec<(NodePath, &Primitive)> {
    execution_order(expr)
        .into_iter()
        .map(|path| match expr.get(&path) {
            Some(HExpr::Primitive(p)) => (path, p),
            _ => unreachable!("execution_order only yields primitive paths"),
        })
        .collect()
}

pub fn validate(expr: &HExpr) -> ValidationReport {
    validate_with(expr, &ValidateConfig::default())
}

pub fn validate_with(expr: &HExpr, config: &ValidateConfig) -> ValidationReport {
    let mut diagnostics = Vec::new();

    let depth = expr.depth();
    if depth > config.max_depth {
        diagnostics.push(Diagnostic::error(
            "depth-exceeded",
            format!("tree depth {depth} exceeds limit {}", config.max_depth),
            NodePath::root(),
        ));
    }

    for (position, (path, prim)) in primitives_in_order(expr).into_iter().enumerate() {
        let exec_index = position + 1;
        for ph in config.recognizer.find(&prim.text) {
            if ph.index >= exec_index {
                diagnostics.push(Diagnostic::error(
                    "unresolvable-placeholder",
                    format!(
                        "{} refers to slot {} but only {} answer(s) exist when question {} runs",
                        ph.surface_form,
                        ph.index,
                        exec_index - 1,
                        exec_index
                    ),
                    path.clone(),
                ));
            }
        }
    }

    check_joins(expr, NodePath::root(), config, &mut diagnostics);

    ValidationReport::from_diagnostics(diagnostics)
}

fn check_joins(
    node: &HExpr,
    path: NodePath,
    config: &ValidateConfig,
    out: &mut Vec<Diagnostic>,
) {
    if let HExpr::Operation { kind, left, right } = node {
        if *kind == OpKind::Join && !has_placeholder(left, &config.recognizer) {
            out.push(Diagnostic::warning(
                "join-without-placeholder",
                "left operand of JOIN never uses an earlier answer",
                path.child(Branch::Left),
            ));
        }
        check_joins(left, path.child(Branch::Left), config, out);
        check_joins(right, path.child(Branch::Right), config, out);
    }
}

fn has_placeholder(node: &HExpr, recognizer: &PlaceholderRecognizer) -> bool {
    match node {
        HExpr::Primitive(p) => !recognizer.find(&p.text).is_empty(),
        HExpr::Operation { left, right, .. } => {
            has_placeholder(left, recognizer) || has_placeholder(right, recognizer)
        }
    }
}
