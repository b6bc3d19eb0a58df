//! H-expression syntax: the AST, the textual grammar and its canonical
//! serializer, placeholder recognition, and static validation.

mod ast;
mod parser;
mod placeholder;
mod validate;

pub use ast::{Branch, HExpr, NodePath, OpKind, Primitive};
pub use parser::{parse_hexpression, ParseError, ParseErrorKind, MAX_NESTING};
pub use placeholder::{find_placeholders, PlaceholderRecognizer, PlaceholderRef};
pub use validate::{
    execution_order, primitives_in_order, validate, validate_with, Diagnostic, Severity,
    ValidateConfig, ValidationReport, DEFAULT_MAX_DEPTH,
};

/// Canonical text: upper-case operation names, `OP[ left, right ]` spacing,
/// and `\,` `\[` `\]` `\\` escapes inside questions. Entity hints are not
/// part of the textual form.
impl std::str::FromStr for HExpr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_hexpression(s)
    }
}

pub fn serialize(expr: &HExpr) -> String {
    let mut out = String::new();
    write_expr(expr, &mut out);
    out
}

fn write_expr(expr: &HExpr, out: &mut String) {
    match expr {
        HExpr::Primitive(p) => out.push_str(&parser::escape(&p.text)),
        HExpr::Operation { kind, left, right } => {
            out.push_str(kind.canonical_name());
            out.push_str("[ ");
            write_expr(left, out);
            out.push_str(", ");
            write_expr(right, out);
            out.push_str(" ]");
        }
    }
}
