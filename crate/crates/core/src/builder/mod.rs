//! Gold H-expressions from dataset annotations.

mod musique;
mod templates;
mod twowiki;

use serde::{Deserialize, Serialize};

use crate::hexpr::{serialize, Diagnostic, NodePath, OpKind};

pub use musique::{build_from_musique, musique_facts, MusiqueParagraph, MusiqueRecord, MusiqueType, SubQuestion};
pub use templates::{template_question, TemplateError, TemplateTable, DEFAULT_TEMPLATE, SUBJECT_SLOT};
pub use twowiki::{build_from_2wiki, twowiki_facts, Evidence, TwoWikiRecord, TwoWikiType};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BuildError {
    #[error("record {id}: {reason}")]
    InvalidRecord { id: String, reason: String },
    #[error("record {id}: unsupported decomposition shape: {reason}")]
    UnsupportedShape { id: String, reason: String },
    #[error("record {id}: unsupported reasoning type {reasoning_type:?}")]
    UnsupportedReasoningType { id: String, reasoning_type: String },
}

const LESS: &[&str] = &["first", "earlier", "earliest"];
const GREATER: &[&str] = &["later", "latest", "last", "longer", "more"];
const EQUAL: &[&str] = &["same", "both"];

/// Comparison operation implied by the question wording. The first keyword
/// found wins; with none, COMP_= plus a warning.
pub fn choose_comparison_kind(question: &str) -> (OpKind, Option<Diagnostic>) {
    let lowered = question.to_lowercase();
    for token in lowered.split(|c: char| !c.is_alphanumeric()) {
        if LESS.contains(&token) {
            return (OpKind::CompLt, None);
        }
        if GREATER.contains(&token) {
            return (OpKind::CompGt, None);
        }
        if EQUAL.contains(&token) {
            return (OpKind::CompEq, None);
        }
    }
    let warning = Diagnostic::warning(
        "comparison-kind-defaulted",
        format!("no comparison keyword in {question:?}; using COMP_="),
        NodePath::root(),
    );
    (OpKind::CompEq, Some(warning))
}

/// One line of converter output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvertedRecord {
    pub id: String,
    pub question: String,
    pub hexpression: String,
    pub answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reasoning_type: Option<String>,
}

pub fn convert_musique(record: &MusiqueRecord) -> Result<ConvertedRecord, BuildError> {
    let expr = build_from_musique(record)?;
    Ok(ConvertedRecord {
        id: record.id.clone(),
        question: record.question.clone(),
        hexpression: serialize(&expr),
        answer: record.answer.clone(),
        reasoning_type: record.reasoning_type().map(|t| t.as_str().to_string()),
    })
}

pub fn convert_2wiki(record: &TwoWikiRecord, templates: &TemplateTable) -> Result<ConvertedRecord, BuildError> {
    let expr = build_from_2wiki(record, templates)?;
    Ok(ConvertedRecord {
        id: record.id.clone(),
        question: record.question.clone(),
        hexpression: serialize(&expr),
        answer: record.answer.clone(),
        reasoning_type: Some(record.kind()?.as_str().to_string()),
    })
}
