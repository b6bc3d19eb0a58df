use serde::{Deserialize, Serialize};

use super::templates::{template_question, TemplateTable};
use super::{choose_comparison_kind, BuildError};
use crate::hexpr::{HExpr, OpKind, Primitive};
use crate::readers::Passage;

/// `(subject, relation, object)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence(pub String, pub String, pub String);

impl Evidence {
    pub fn new(subject: &str, relation: &str, object: &str) -> Self {
        Evidence(subject.into(), relation.into(), object.into())
    }

    pub fn subject(&self) -> &str {
        &self.0
    }

    pub fn relation(&self) -> &str {
        &self.1
    }

    pub fn object(&self) -> &str {
        &self.2
    }
}

/// One 2WikiMultihopQA line. `context` keeps the dataset's
/// `[title, [sentence, ...]]` layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwoWikiRecord {
    #[serde(rename = "_id", alias = "id")]
    pub id: String,
    #[serde(rename = "type", alias = "reasoning_type")]
    pub reasoning_type: String,
    pub question: String,
    pub answer: String,
    pub evidences: Vec<Evidence>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub context: Vec<(String, Vec<String>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TwoWikiType {
    Comparison,
    Compositional,
    BridgeComparison,
    Inference,
}

impl TwoWikiType {
    pub const ALL: [TwoWikiType; 4] = [
        TwoWikiType::Comparison,
        TwoWikiType::Compositional,
        TwoWikiType::BridgeComparison,
        TwoWikiType::Inference,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TwoWikiType::Comparison => "comparison",
            TwoWikiType::Compositional => "compositional",
            TwoWikiType::BridgeComparison => "bridge_comparison",
            TwoWikiType::Inference => "inference",
        }
    }

    /// Accepts `bridge` as a synonym of `compositional`.
    pub fn parse(s: &str) -> Option<TwoWikiType> {
        match s.trim().to_lowercase().as_str() {
            "comparison" => Some(TwoWikiType::Comparison),
            "compositional" | "bridge" => Some(TwoWikiType::Compositional),
            "bridge_comparison" | "bridge-comparison" => Some(TwoWikiType::BridgeComparison),
            "inference" => Some(TwoWikiType::Inference),
            _ => None,
        }
    }
}

impl TwoWikiRecord {
    pub fn kind(&self) -> Result<TwoWikiType, BuildError> {
        TwoWikiType::parse(&self.reasoning_type).ok_or_else(|| BuildError::UnsupportedReasoningType {
            id: self.id.clone(),
            reasoning_type: self.reasoning_type.clone(),
        })
    }

    pub fn passages(&self) -> Vec<Passage> {
        self.context
            .iter()
            .map(|(title, sentences)| Passage {
                title: title.clone(),
                text: sentences.join(" "),
            })
            .collect()
    }

    fn check(&self) -> Result<(), BuildError> {
        if self.evidences.is_empty() {
            return Err(self.invalid("no evidences".into()));
        }
        match self
            .evidences
            .iter()
            .position(|e| e.subject().trim().is_empty() || e.relation().trim().is_empty())
        {
            Some(i) => Err(self.invalid(format!("evidence {i} has an empty subject or relation"))),
            None => Ok(()),
        }
    }

    fn invalid(&self, reason: String) -> BuildError {
        BuildError::InvalidRecord {
            id: self.id.clone(),
            reason,
        }
    }

    /// Evidence triples grouped into hop chains: a chain starts at a triple
    /// whose subject is no other triple's object and follows object →
    /// subject links. Chains come out in order of their first triple.
    fn chains(&self) -> Result<Vec<Vec<&Evidence>>, BuildError> {
        let ev = &self.evidences;
        let mut used = vec![false; ev.len()];
        let mut chains = Vec::new();
        let is_start = |i: usize| {
            !ev.iter()
                .enumerate()
                .any(|(j, other)| j != i && same(other.object(), ev[i].subject()))
        };
        for start in 0..ev.len() {
            if used[start] || !is_start(start) {
                continue;
            }
            used[start] = true;
            let mut chain = vec![&ev[start]];
            loop {
                let tail = chain.last().unwrap().object();
                match (0..ev.len()).find(|&j| !used[j] && same(ev[j].subject(), tail)) {
                    Some(j) => {
                        used[j] = true;
                        chain.push(&ev[j]);
                    }
                    None => break,
                }
            }
            chains.push(chain);
        }
        if let Some(i) = used.iter().position(|u| !u) {
            return Err(BuildError::UnsupportedShape {
                id: self.id.clone(),
                reason: format!("evidence {i} does not fit a hop chain"),
            });
        }
        Ok(chains)
    }
}

fn same(a: &str, b: &str) -> bool {
    a.trim().eq_ignore_ascii_case(b.trim())
}

/// Right-nested JOIN over one hop chain whose first primitive fills
/// answer slot `offset + 1`. Later hops refer to the previous slot as `#k`.
fn chain_expr(chain: &[&Evidence], offset: usize, templates: &TemplateTable) -> HExpr {
    let first = chain[0];
    let mut expr = HExpr::Primitive(Primitive::with_hint(
        template_question(first.subject(), first.relation(), templates),
        first.subject(),
    ));
    for (hop, e) in chain.iter().enumerate().skip(1) {
        let subject = format!("#{}", offset + hop);
        let outer = HExpr::primitive(template_question(&subject, e.relation(), templates));
        expr = HExpr::op(OpKind::Join, outer, expr);
    }
    expr
}

/// Gold H-expression for a 2WikiMultihopQA record.
///
/// Comparison compares the first two evidence questions (left is the
/// first-mentioned entity). Compositional and inference records become a
/// JOIN chain. Bridge-comparison compares two chains; the right chain runs
/// first, so the left chain's placeholders start after it.
pub fn build_from_2wiki(record: &TwoWikiRecord, templates: &TemplateTable) -> Result<HExpr, BuildError> {
    record.check()?;
    let kind = record.kind()?;
    match kind {
        TwoWikiType::Comparison => {
            let [a, b, ..] = record.evidences.as_slice() else {
                return Err(record.invalid("comparison needs two evidences".into()));
            };
            let (op, _) = choose_comparison_kind(&record.question);
            let t = |e: &Evidence| {
                HExpr::Primitive(Primitive::with_hint(
                    template_question(e.subject(), e.relation(), templates),
                    e.subject(),
                ))
            };
            Ok(HExpr::op(op, t(a), t(b)))
        }
        TwoWikiType::Compositional | TwoWikiType::Inference => {
            let chains = record.chains()?;
            match chains.as_slice() {
                [chain] => Ok(chain_expr(chain, 0, templates)),
                _ => Err(BuildError::UnsupportedShape {
                    id: record.id.clone(),
                    reason: format!("expected one hop chain, found {}", chains.len()),
                }),
            }
        }
        TwoWikiType::BridgeComparison => {
            let chains = record.chains()?;
            let [left, right] = chains.as_slice() else {
                return Err(BuildError::UnsupportedShape {
                    id: record.id.clone(),
                    reason: format!("expected two hop chains, found {}", chains.len()),
                });
            };
            let (op, _) = choose_comparison_kind(&record.question);
            Ok(HExpr::op(
                op,
                chain_expr(left, right.len(), templates),
                chain_expr(right, 0, templates),
            ))
        }
    }
}

/// Oracle facts from the evidence triples: each templated question, with
/// the real subject in place of any placeholder, maps to its object.
pub fn twowiki_facts(record: &TwoWikiRecord, templates: &TemplateTable) -> Vec<(String, String)> {
    record
        .evidences
        .iter()
        .map(|e| {
            (
                template_question(e.subject(), e.relation(), templates),
                e.object().to_string(),
            )
        })
        .collect()
}
