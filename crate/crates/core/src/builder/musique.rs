use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::BuildError;
use crate::executor::normalize_answer;
use crate::hexpr::{find_placeholders, HExpr, OpKind};
use crate::readers::Passage;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubQuestion {
    /// May reference earlier sub-answers as `#k` (1-based).
    pub question: String,
    pub answer: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paragraph_support_idx: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MusiqueParagraph {
    #[serde(default)]
    pub idx: i64,
    #[serde(default)]
    pub title: String,
    pub paragraph_text: String,
    #[serde(default)]
    pub is_supporting: bool,
}

/// One MuSiQue line, using the dataset's field names.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MusiqueRecord {
    pub id: String,
    pub question: String,
    pub answer: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub answer_aliases: Vec<String>,
    #[serde(alias = "sub_questions")]
    pub question_decomposition: Vec<SubQuestion>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub paragraphs: Vec<MusiqueParagraph>,
    /// Overrides the type encoded in the id prefix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reasoning_type: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MusiqueType {
    TwoHop,
    ThreeHop1,
    ThreeHop2,
    FourHop1,
    FourHop2,
    FourHop3,
}

impl MusiqueType {
    pub const ALL: [MusiqueType; 6] = [
        MusiqueType::TwoHop,
        MusiqueType::ThreeHop1,
        MusiqueType::ThreeHop2,
        MusiqueType::FourHop1,
        MusiqueType::FourHop2,
        MusiqueType::FourHop3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MusiqueType::TwoHop => "2hop",
            MusiqueType::ThreeHop1 => "3hop1",
            MusiqueType::ThreeHop2 => "3hop2",
            MusiqueType::FourHop1 => "4hop1",
            MusiqueType::FourHop2 => "4hop2",
            MusiqueType::FourHop3 => "4hop3",
        }
    }

    pub fn parse(s: &str) -> Option<MusiqueType> {
        MusiqueType::ALL.into_iter().find(|t| t.as_str() == s)
    }
}

impl MusiqueRecord {
    /// Explicit `reasoning_type`, else the id prefix (`3hop2__...`).
    pub fn reasoning_type(&self) -> Option<MusiqueType> {
        let raw = match &self.reasoning_type {
            Some(t) => t.as_str(),
            None => self.id.split("__").next().unwrap_or(""),
        };
        MusiqueType::parse(raw)
    }

    pub fn gold_answers(&self) -> Vec<String> {
        std::iter::once(self.answer.clone())
            .chain(self.answer_aliases.iter().cloned())
            .collect()
    }

    pub fn passages(&self) -> Vec<Passage> {
        self.paragraphs
            .iter()
            .map(|p| Passage {
                title: p.title.clone(),
                text: p.paragraph_text.clone(),
            })
            .collect()
    }

    /// Sub-question references, 1-based, sorted. Checks that every
    /// reference points backwards.
    pub fn dependencies(&self) -> Result<Vec<BTreeSet<usize>>, BuildError> {
        if self.question_decomposition.is_empty() {
            return Err(BuildError::InvalidRecord {
                id: self.id.clone(),
                reason: "no sub-questions".into(),
            });
        }
        self.question_decomposition
            .iter()
            .enumerate()
            .map(|(i, sq)| {
                let j = i + 1;
                let refs: BTreeSet<usize> =
                    find_placeholders(&sq.question).into_iter().map(|p| p.index).collect();
                match refs.iter().find(|&&k| k >= j) {
                    Some(k) => Err(BuildError::InvalidRecord {
                        id: self.id.clone(),
                        reason: format!("sub-question {j} refers forward to #{k}"),
                    }),
                    None => Ok(refs),
                }
            })
            .collect()
    }
}

/// Tree over sub-question numbers before placeholders are renumbered.
enum Shape {
    Leaf(usize),
    Op(OpKind, Box<Shape>, Box<Shape>),
}

impl Shape {
    fn op(kind: OpKind, left: Shape, right: Shape) -> Shape {
        Shape::Op(kind, Box::new(left), Box::new(right))
    }

    fn leaves_in_execution_order(&self, out: &mut Vec<usize>) {
        match self {
            Shape::Leaf(j) => out.push(*j),
            Shape::Op(_, l, r) => {
                r.leaves_in_execution_order(out);
                l.leaves_in_execution_order(out);
            }
        }
    }
}

struct Builder<'a> {
    record: &'a MusiqueRecord,
    deps: Vec<BTreeSet<usize>>,
    used: Vec<bool>,
    /// Independent sub-questions answered identically to sub-question j.
    partners: BTreeMap<usize, Vec<usize>>,
}

impl<'a> Builder<'a> {
    fn unsupported(&self, reason: impl Into<String>) -> BuildError {
        BuildError::UnsupportedShape {
            id: self.record.id.clone(),
            reason: reason.into(),
        }
    }

    fn build(&mut self, j: usize) -> Result<Shape, BuildError> {
        if self.used[j - 1] {
            return Err(self.unsupported(format!("sub-question {j} feeds more than one consumer")));
        }
        self.used[j - 1] = true;

        let deps: Vec<usize> = self.deps[j - 1].iter().rev().copied().collect();
        let mut shape = match deps.as_slice() {
            [] => Shape::Leaf(j),
            [only] => Shape::op(OpKind::Join, Shape::Leaf(j), self.build(*only)?),
            many => {
                // Higher-numbered branches go left so the lower-numbered ones
                // execute first; the rightmost pair closes the chain.
                let mut branches = many
                    .iter()
                    .map(|&k| self.build(k))
                    .collect::<Result<Vec<_>, _>>()?;
                let mut acc = branches.pop().expect("at least two branches");
                while let Some(b) = branches.pop() {
                    acc = Shape::op(OpKind::Union, b, acc);
                }
                Shape::op(OpKind::Join, Shape::Leaf(j), acc)
            }
        };

        for partner in self.partners.remove(&j).unwrap_or_default() {
            let other = self.build(partner)?;
            shape = if partner > j {
                Shape::op(OpKind::And, other, shape)
            } else {
                Shape::op(OpKind::And, shape, other)
            };
        }
        Ok(shape)
    }
}

/// Gold H-expression for a MuSiQue decomposition.
///
/// Chains fold into right-nested JOINs. A sub-question consuming several
/// independent answers JOINs over a UNION of its branches. A sub-question
/// nobody references, with no references of its own and the same answer as
/// another sub-question, is intersected with it through AND. `#k`
/// references are rewritten to `Ans#k` under execution-order numbering.
pub fn build_from_musique(record: &MusiqueRecord) -> Result<HExpr, BuildError> {
    let deps = record.dependencies()?;
    let n = deps.len();

    let referenced: BTreeSet<usize> = deps.iter().flatten().copied().collect();
    let mut partners: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 1..n {
        if referenced.contains(&i) || !deps[i - 1].is_empty() {
            continue;
        }
        let answer = normalize_answer(&record.question_decomposition[i - 1].answer);
        let partner = (1..=n).rev().find(|&m| {
            m != i
                && !partners.contains_key(&i)
                && normalize_answer(&record.question_decomposition[m - 1].answer) == answer
                && !partners.values().flatten().any(|&p| p == m)
        });
        if let Some(m) = partner {
            partners.entry(m).or_default().push(i);
        }
    }

    let mut builder = Builder {
        record,
        deps,
        used: vec![false; n],
        partners,
    };
    let shape = builder.build(n)?;
    if let Some(orphan) = builder.used.iter().position(|u| !u) {
        return Err(builder.unsupported(format!(
            "sub-question {} is not connected to the final question",
            orphan + 1
        )));
    }

    let mut order = Vec::with_capacity(n);
    shape.leaves_in_execution_order(&mut order);
    let slot_of: BTreeMap<usize, usize> = order
        .iter()
        .enumerate()
        .map(|(slot, &j)| (j, slot + 1))
        .collect();

    Ok(to_hexpr(&shape, record, &slot_of))
}

fn to_hexpr(shape: &Shape, record: &MusiqueRecord, slot_of: &BTreeMap<usize, usize>) -> HExpr {
    match shape {
        Shape::Leaf(j) => {
            let text = &record.question_decomposition[j - 1].question;
            HExpr::primitive(renumber(text, slot_of))
        }
        Shape::Op(kind, l, r) => HExpr::op(
            *kind,
            to_hexpr(l, record, slot_of),
            to_hexpr(r, record, slot_of),
        ),
    }
}

fn renumber(text: &str, slot_of: &BTreeMap<usize, usize>) -> String {
    let mut out = String::with_capacity(text.len() + 8);
    let mut cursor = 0;
    for ph in find_placeholders(text) {
        out.push_str(&text[cursor..ph.span.0]);
        out.push_str(&format!("Ans#{}", slot_of[&ph.index]));
        cursor = ph.span.1;
    }
    out.push_str(&text[cursor..]);
    out.trim().to_string()
}

/// Facts that let an oracle reader replay the decomposition: each
/// sub-question, with earlier sub-answers substituted, maps to its answer.
pub fn musique_facts(record: &MusiqueRecord) -> Vec<(String, String)> {
    let answers: Vec<&str> = record
        .question_decomposition
        .iter()
        .map(|sq| sq.answer.as_str())
        .collect();
    record
        .question_decomposition
        .iter()
        .map(|sq| {
            let mut q = String::new();
            let mut cursor = 0;
            for ph in find_placeholders(&sq.question) {
                q.push_str(&sq.question[cursor..ph.span.0]);
                q.push_str(answers.get(ph.index - 1).copied().unwrap_or(""));
                cursor = ph.span.1;
            }
            q.push_str(&sq.question[cursor..]);
            (q, sq.answer.clone())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hexpr::{parse_hexpression, serialize, validate};

    fn record(id: &str, subs: &[(&str, &str)]) -> MusiqueRecord {
        MusiqueRecord {
            id: id.into(),
            question: "q".into(),
            answer: subs.last().unwrap().1.into(),
            answer_aliases: vec![],
            question_decomposition: subs
                .iter()
                .map(|(q, a)| SubQuestion {
                    question: q.to_string(),
                    answer: a.to_string(),
                    id: None,
                    paragraph_support_idx: None,
                })
                .collect(),
            paragraphs: vec![],
            reasoning_type: None,
        }
    }

    #[test]
    fn two_hop() {
        let r = record(
            "2hop__1_2",
            &[
                ("What is country of Inagua National Park", "Bahamas"),
                ("Who is the deputy prime minister of the #1", "Philip Davis"),
            ],
        );
        let e = build_from_musique(&r).unwrap();
        assert_eq!(
            serialize(&e),
            "JOIN[ Who is the deputy prime minister of the Ans#1, What is country of Inagua National Park ]"
        );
        assert_eq!(r.reasoning_type(), Some(MusiqueType::TwoHop));
    }

    #[test]
    fn three_hop_two_entity() {
        let r = record(
            "3hop2__1_2_3",
            &[
                ("What is place of birth of Robert Banks", "Richmond"),
                ("What town is WTVR-FM liscensed in?", "Williamsburg"),
                ("When did the capital of virginia moved from #2 to #1", "1780"),
            ],
        );
        let e = build_from_musique(&r).unwrap();
        let expected = parse_hexpression(
            "JOIN[ When did the capital of virginia moved from Ans#2 to Ans#1, UNION[ What town is WTVR-FM liscensed in?, What is place of birth of Robert Banks ] ]",
        )
        .unwrap();
        assert_eq!(e, expected);
    }

    #[test]
    fn four_hop_three_entity_matches_reference_shape() {
        let r = record(
            "4hop3__1",
            &[
                ("Al-Mu'tamid is followed by What", "Yusuf ibn Tashfin"),
                ("What is country of citizenship of #1", "Morocco"),
                ("What is country of Al-Mastumah", "Yemen"),
                ("When did muslim armies invade #3 and #2", "7th century"),
            ],
        );
        let e = build_from_musique(&r).unwrap();
        assert_eq!(
            serialize(&e),
            "JOIN[ When did muslim armies invade Ans#3 and Ans#2, UNION[ What is country of Al-Mastumah, JOIN[ What is country of citizenship of Ans#1, Al-Mu'tamid is followed by What ] ] ]"
        );
    }

    #[test]
    fn renumbering_follows_execution_order() {
        let r = record(
            "4hop2__x",
            &[("a", "A"), ("b", "B"), ("c of #1", "C"), ("d #3 #2", "D")],
        );
        let e = build_from_musique(&r).unwrap();
        assert_eq!(
            serialize(&e),
            "JOIN[ d Ans#3 Ans#1, UNION[ JOIN[ c of Ans#2, a ], b ] ]"
        );
        assert!(validate(&e).executable);
    }

    #[test]
    fn single_sub_question() {
        let r = record("2hop__s", &[("Who directed Titanic?", "James Cameron")]);
        assert_eq!(build_from_musique(&r).unwrap(), HExpr::primitive("Who directed Titanic?"));
    }

    #[test]
    fn intersection_becomes_and() {
        let r = record(
            "2hop__and",
            &[
                ("Who was nicknamed The Cobra?", "Dave Parker"),
                ("Who is the former member of the Pittsburgh Pirates?", "Dave Parker"),
            ],
        );
        let e = build_from_musique(&r).unwrap();
        assert_eq!(
            serialize(&e),
            "AND[ Who is the former member of the Pittsburgh Pirates?, Who was nicknamed The Cobra? ]"
        );
    }

    #[test]
    fn unsupported_shapes() {
        let shared = record("3hop1__s", &[("a", "A"), ("b #1", "B"), ("c #1 #2", "C")]);
        assert!(matches!(
            build_from_musique(&shared),
            Err(BuildError::UnsupportedShape { .. })
        ));
        let orphan = record("2hop__o", &[("a", "A"), ("b", "B")]);
        assert!(matches!(
            build_from_musique(&orphan),
            Err(BuildError::UnsupportedShape { .. })
        ));
    }

    #[test]
    fn forward_reference_is_invalid() {
        let r = record("2hop__f", &[("a #2", "A"), ("b", "B")]);
        assert!(matches!(
            build_from_musique(&r),
            Err(BuildError::InvalidRecord { .. })
        ));
    }

    #[test]
    fn facts_substitute_sub_answers() {
        let r = record("2hop__1", &[("What is country of X", "Bahamas"), ("Who leads #1?", "Davis")]);
        let facts = musique_facts(&r);
        assert_eq!(facts[1], ("Who leads Bahamas?".to_string(), "Davis".to_string()));
    }
}
