use serde::{Deserialize, Serialize};

/// Relation heads that precede the subject in templated questions. The
/// subject is whatever follows the leftmost head found; on a tie the
/// longer head wins, so `country of citizenship of` beats `country of`.
pub const DEFAULT_TEMPLATE_HEADS: &[&str] = &[
    "date of birth of",
    "date of death of",
    "publication date of",
    "place of birth of",
    "place of death of",
    "place of burial of",
    "country of citizenship of",
    "country of origin of",
    "country of",
    "member of sports team of",
    "director of",
    "founder of",
    "spouse of",
    "sibling of",
    "father of",
    "mother of",
    "child of",
    "composer of",
    "performer of",
    "inception of",
];

const WH_WORDS: &[&str] = &[
    "who", "what", "when", "where", "which", "whom", "whose", "why", "how",
];
const AUXILIARIES: &[&str] = &["is", "was", "are", "were", "did", "does", "do"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EntityExtractor {
    /// Prefer the builder-provided hint when a primitive has one.
    pub use_hints: bool,
    pub template_heads: Vec<String>,
}

impl Default for EntityExtractor {
    fn default() -> Self {
        EntityExtractor {
            use_hints: true,
            template_heads: DEFAULT_TEMPLATE_HEADS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl EntityExtractor {
    pub fn extract(&self, question: &str, entity_hint: Option<&str>) -> String {
        if self.use_hints {
            if let Some(hint) = entity_hint.filter(|h| !h.trim().is_empty()) {
                return hint.to_string();
            }
        }
        let q = question.trim();
        let lower = q.to_ascii_lowercase();

        let mut best: Option<(usize, usize)> = None;
        for head in &self.template_heads {
            let head = head.to_ascii_lowercase();
            let Some(at) = find_word_boundary(&lower, &head) else {
                continue;
            };
            let better = match best {
                None => true,
                Some((pos, len)) => at < pos || (at == pos && head.len() > len),
            };
            if better {
                best = Some((at, head.len()));
            }
        }
        if let Some((pos, len)) = best {
            let rest = strip_question_mark(&q[pos + len..]);
            if !rest.is_empty() {
                return rest.to_string();
            }
        }

        if let Some(pos) = lower.rfind(" of ") {
            let rest = strip_question_mark(&q[pos + 4..]);
            if !rest.is_empty() {
                return rest.to_string();
            }
        }

        strip_leading_wh(strip_question_mark(q)).to_string()
    }
}

/// Main entity of a question: the builder's hint when present, else the
/// subject after a known relation head, else the text after the last
/// " of ", else the question without its wh-word and question mark.
pub fn extract_main_entity(question: &str, entity_hint: Option<&str>) -> String {
    EntityExtractor::default().extract(question, entity_hint)
}

fn find_word_boundary(haystack: &str, needle: &str) -> Option<usize> {
    let bytes = haystack.as_bytes();
    haystack.match_indices(needle).map(|(i, _)| i).find(|&i| {
        let before_ok = i == 0 || !bytes[i - 1].is_ascii_alphanumeric();
        let end = i + needle.len();
        let after_ok = end == bytes.len() || !bytes[end].is_ascii_alphanumeric();
        before_ok && after_ok
    })
}

fn strip_question_mark(s: &str) -> &str {
    s.trim().trim_end_matches('?').trim_end()
}

fn strip_leading_wh(s: &str) -> &str {
    let mut rest = s.trim_start();
    let mut stripped_wh = false;
    loop {
        let word_end = rest.find(char::is_whitespace).unwrap_or(rest.len());
        let word = rest[..word_end].to_ascii_lowercase();
        let is_wh = WH_WORDS.contains(&word.as_str());
        let is_aux = stripped_wh && AUXILIARIES.contains(&word.as_str());
        if word_end == rest.len() || !(is_wh || is_aux) {
            return rest;
        }
        stripped_wh |= is_wh;
        rest = rest[word_end..].trim_start();
        if is_aux {
            return rest;
        }
    }
}
