use std::collections::BTreeMap;
use std::path::Path;

use crate::jsonl::JsonlError;

pub const SUBJECT_SLOT: &str = "{subject}";
pub const DEFAULT_TEMPLATE: &str = "What is {relation} of {subject}?";

const BUILTIN: &[(&str, &str)] = &[
    ("country", "What is country of {subject}?"),
    ("country of citizenship", "What is country of citizenship of {subject}?"),
    ("country of origin", "What is country of origin of {subject}?"),
    ("place of birth", "What is place of birth of {subject}?"),
    ("place of death", "Where is {subject}'s place of death?"),
    ("place of burial", "Where is place of burial of {subject}?"),
    ("date of birth", "When is date of birth of {subject}?"),
    ("date of death", "When is date of death of {subject}?"),
    ("publication date", "What is publication date of {subject}?"),
    ("director", "Who is director of {subject}?"),
    ("founded by", "{subject} is founded by who?"),
    ("spouse", "Who is spouse of {subject}?"),
    ("sibling", "Who is sibling of {subject}?"),
    ("father", "Who is father of {subject}?"),
    ("mother", "Who is mother of {subject}?"),
    ("member of sports team", "What is member of sports team of {subject}?"),
    ("composer", "Who is composer of {subject}?"),
    ("performer", "Who is performer of {subject}?"),
    ("educated at", "Where is {subject} educated at?"),
];

#[derive(Debug, thiserror::Error)]
pub enum TemplateError {
    #[error("template for {relation:?} must contain exactly one {{subject}}: {template:?}")]
    BadTemplate { relation: String, template: String },
    #[error(transparent)]
    Io(#[from] JsonlError),
    #[error("template file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Relation → question template with a single `{subject}` slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemplateTable {
    templates: BTreeMap<String, String>,
}

impl Default for TemplateTable {
    fn default() -> Self {
        TemplateTable {
            templates: BUILTIN
                .iter()
                .map(|(r, t)| (r.to_string(), t.to_string()))
                .collect(),
        }
    }
}

fn key(relation: &str) -> String {
    relation.trim().to_lowercase()
}

impl TemplateTable {
    /// A table with no relation-specific templates.
    pub fn empty() -> Self {
        TemplateTable {
            templates: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, relation: &str, template: &str) -> Result<(), TemplateError> {
        if template.matches(SUBJECT_SLOT).count() != 1 {
            return Err(TemplateError::BadTemplate {
                relation: relation.to_string(),
                template: template.to_string(),
            });
        }
        self.templates.insert(key(relation), template.to_string());
        Ok(())
    }

    pub fn get(&self, relation: &str) -> Option<&str> {
        self.templates.get(&key(relation)).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.templates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.templates.is_empty()
    }

    /// Built-in table overlaid with a JSON object `{"relation": "template"}`.
    pub fn from_json_str(json: &str) -> Result<Self, TemplateError> {
        let extra: BTreeMap<String, String> = serde_json::from_str(json)?;
        let mut table = TemplateTable::default();
        for (relation, template) in extra {
            table.insert(&relation, &template)?;
        }
        Ok(table)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, TemplateError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| JsonlError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }
}

/// The relation's template if known, else `What is {relation} of {subject}?`.
/// The subject is inserted verbatim; a title ending in `?` does not double
/// the final question mark.
pub fn template_question(subject: &str, relation: &str, templates: &TemplateTable) -> String {
    let mut q = match templates.get(relation) {
        Some(t) => t.replacen(SUBJECT_SLOT, subject, 1),
        None => DEFAULT_TEMPLATE
            .replacen("{relation}", relation.trim(), 1)
            .replacen(SUBJECT_SLOT, subject, 1),
    };
    if q.ends_with("??") {
        q.pop();
    }
    q
}
