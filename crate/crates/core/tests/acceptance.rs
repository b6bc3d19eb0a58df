//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints one PASS/FAIL line, e.g.
//! `cargo test -p hexpr-core --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::*;
use hexpr_core::eval::{aggregate, exact_match, executability_rate, token_f1, GroupBy, ScoredPrediction};
use hexpr_core::executor::{
    apply_operation, normalize_answer, AnswerValue, ExecStatus, Operand, StepKind,
};
use hexpr_core::readers::{FactStore, OracleReader, Reader, ReaderCandidate, ReaderError, ReaderRequest};
use hexpr_core::{execute, execute_with_fallback, parse_hexpression, serialize, ExecConfig, OpKind};
use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn run(expression: &str, facts: &[(&str, &str)]) -> String {
    let mut store = FactStore::new();
    for (q, a) in facts {
        store.insert(q, [*a]);
    }
    let expr = parse_hexpression(expression).expect("expression parses");
    execute(&expr, &[], &OracleReader::new(store), &ExecConfig::default()).predicted()
}

/// (expression, facts, expected answer)
type OpRow<'a> = (&'a str, &'a [(&'a str, &'a str)], &'a str);

fn operation_returns() {
    let rows: [OpRow; 7] = [
        (
            "JOIN[ Where is Ans#1's place of birth?, Who is director of The Iron Man? ]",
            &[
                ("Who is director of The Iron Man?", "Jon Favreau"),
                ("Where is Jon Favreau's place of birth?", "New York"),
            ],
            "New York",
        ),
        (
            "UNION[ Which state is Horndean located in?, What is McDonaldization named after? ]",
            &[
                ("What is McDonaldization named after?", "McDonald's"),
                ("Which state is Horndean located in?", "England"),
            ],
            "{Ans#1: McDonald's, Ans#2: England}",
        ),
        (
            "AND[ Who is the former member of the Pittsburgh Pirates?, Who was nicknamed \"The Cobra\"? ]",
            &[
                ("Who was nicknamed \"The Cobra\"?", "Dave Parker"),
                ("Who is the former member of the Pittsburgh Pirates?", "Dave Parker"),
            ],
            "Dave Parker",
        ),
        (
            "COMP_=[ Which is country of North Marion High School (Oregon)?, Which is country of Seoul High School? ]",
            &[
                ("Which is country of Seoul High School?", "South Korea"),
                ("Which is country of North Marion High School (Oregon)?", "United States"),
            ],
            "No",
        ),
        (
            "COMP_<[ When is publication date of Blind Shaft?, When is publication date of The Mask of Fu Manchu? ]",
            &[
                ("When is publication date of The Mask of Fu Manchu?", "1932"),
                ("When is publication date of Blind Shaft?", "2003"),
            ],
            "The Mask of Fu Manchu",
        ),
        (
            "SUB[ When does Giuseppe Cesari dead?, When does Giuseppe Cesari born? ]",
            &[
                ("When does Giuseppe Cesari born?", "1568"),
                ("When does Giuseppe Cesari dead?", "1640"),
            ],
            "72",
        ),
        (
            "ADD[ How many sisters does Mary Shelley have?, How many brothers does Mary Shelley have? ]",
            &[
                ("How many brothers does Mary Shelley have?", "2"),
                ("How many sisters does Mary Shelley have?", "2"),
            ],
            "4",
        ),
    ];
    for (expression, facts, expected) in rows {
        assert_eq!(run(expression, facts), expected, "{expression}");
    }
    // COMP_> is the mirror image of the COMP_< row.
    assert_eq!(
        run(
            "COMP_>[ When is publication date of Blind Shaft?, When is publication date of The Mask of Fu Manchu? ]",
            &[
                ("When is publication date of The Mask of Fu Manchu?", "1932"),
                ("When is publication date of Blind Shaft?", "2003"),
            ],
        ),
        "Blind Shaft"
    );
}

fn cup_final_walkthrough() {
    let expr = parse_hexpression(
        "JOIN[ When was the last time Ans#2 beat Ans#1, UNION[ what is member of sports team of Duane Courtney, who is winner of 1894-95 FA Cup ] ]",
    )
    .unwrap();
    let mut store = FactStore::new();
    store.insert("who is winner of 1894-95 FA Cup", ["Aston Villa"]);
    store.insert("what is member of sports team of Duane Courtney", ["Birmingham City"]);
    store.insert("When was the last time Birmingham City beat Aston Villa", ["1 December 2010"]);
    let result = execute(&expr, &[], &OracleReader::new(store), &ExecConfig::default());

    assert_eq!(result.predicted(), "1 December 2010");
    let trace = &result.trace;
    assert_eq!(trace.memory.get(&1).map(String::as_str), Some("Aston Villa"));
    assert_eq!(trace.memory.get(&2).map(String::as_str), Some("Birmingham City"));
    assert_eq!(trace.primitive_steps().count(), 3);
    assert_eq!(trace.operation_steps().count(), 2);
    let last = trace.primitive_steps().last().unwrap();
    assert_eq!(last.slot, Some(3));
    assert_eq!(
        last.question_after_substitution.as_deref(),
        Some("When was the last time Birmingham City beat Aston Villa")
    );
    assert_eq!(trace.steps.first().unwrap().kind, StepKind::Primitive);
}

fn grammar_roundtrip() {
    let strategy = strategies::hexpr(6);
    let mut runner = TestRunner::deterministic();
    let mut with_commas = 0;
    for _ in 0..1000 {
        let e = strategy.new_tree(&mut runner).unwrap().current();
        assert!(e.depth() <= 6);
        let text = serialize(&e);
        with_commas += usize::from(text.contains("\\,"));
        assert_eq!(parse_hexpression(&text).as_ref(), Ok(&e), "{text}");
    }
    assert!(with_commas > 0, "generator never produced an escaped comma");
}

fn builder_closed_loop() {
    let musique = musique_records();
    let twowiki = twowiki_records();
    assert!(musique.len() >= 20 && twowiki.len() >= 12);
    let musique_types: BTreeSet<_> = musique.iter().filter_map(|r| r.reasoning_type()).collect();
    let twowiki_types: BTreeSet<_> = twowiki.iter().filter_map(|r| r.kind().ok()).collect();
    assert_eq!((musique_types.len(), twowiki_types.len()), (6, 4));

    let mut failures: Vec<String> = musique.iter().filter_map(|r| musique_closed_loop(r).err()).collect();
    failures.extend(twowiki.iter().filter_map(|r| twowiki_closed_loop(r).err()));
    assert!(failures.is_empty(), "{failures:#?}");
}

fn random_phrase(rng: &mut StdRng) -> String {
    const WORDS: &[&str] = &[
        "the", "a", "an", "Aston", "villa", "fc", "New", "York", "city", "of", "Paris", "1932", "Dave", "parker",
    ];
    let n = rng.gen_range(0..5);
    (0..n).map(|_| WORDS[rng.gen_range(0..WORDS.len())]).collect::<Vec<_>>().join(" ")
}

/// Variants a reader might return for the same answer.
fn perturb(rng: &mut StdRng, text: &str) -> String {
    let mut s = match rng.gen_range(0..3) {
        0 => text.to_uppercase(),
        1 => text.to_lowercase(),
        _ => text.to_string(),
    };
    if rng.gen_bool(0.5) {
        s = format!("The {s}");
    }
    if rng.gen_bool(0.5) {
        s.push('.');
    }
    format!("  {s} ")
}

fn metric_parity() {
    assert!((token_f1("aston villa fc", &["aston villa"]) - 0.8).abs() <= 1e-9);
    let mut rng = StdRng::seed_from_u64(5);
    for _ in 0..1000 {
        let gold = random_phrase(&mut rng);
        let predicted = if rng.gen_bool(0.5) { perturb(&mut rng, &gold) } else { random_phrase(&mut rng) };
        let em = exact_match(&predicted, &[&gold]);
        let f1 = token_f1(&predicted, &[&gold]);
        if em == 1.0 {
            assert_eq!(f1, 1.0, "{predicted:?} vs {gold:?}");
        }
        assert!((0.0..=1.0).contains(&f1));
        let p2 = perturb(&mut rng, &predicted);
        let g2 = perturb(&mut rng, &gold);
        assert_eq!(exact_match(&p2, &[&g2]), em);
        assert_eq!(token_f1(&p2, &[&g2]), f1);
    }
}

fn arithmetic_and_intersection() {
    let mut rng = StdRng::seed_from_u64(6);
    for _ in 0..1000 {
        let (a, b): (i64, i64) = (rng.gen_range(0..1_000_000), rng.gen_range(0..1_000_000));
        let facts = [("How many on the left?", a.to_string()), ("How many on the right?", b.to_string())];
        let facts: Vec<(&str, &str)> = facts.iter().map(|(q, v)| (*q, v.as_str())).collect();
        assert_eq!(run("SUB[ How many on the left?, How many on the right? ]", &facts), (a - b).to_string());
        assert_eq!(run("ADD[ How many on the left?, How many on the right? ]", &facts), (a + b).to_string());
    }

    const NAMES: &[&str] = &["Paris", "The Hague", "Lima", "Oslo", "new york", "Rome", "Kyiv", "Bern", "Quito", "Doha"];
    let config = ExecConfig::default();
    for _ in 0..500 {
        let mut list = || -> Vec<ReaderCandidate> {
            let n = rng.gen_range(0..7);
            (0..n)
                .map(|i| {
                    let name = NAMES[rng.gen_range(0..NAMES.len())];
                    ReaderCandidate::new(perturb(&mut rng, name), 1.0 - i as f64 * 0.1)
                })
                .collect()
        };
        let (l, r) = (list(), list());
        let operand = |c: &Vec<ReaderCandidate>, slot| {
            let top = c.first().map_or_else(AnswerValue::empty, |c| AnswerValue::span(c.answer.clone()));
            Operand::new(top.with_candidates(c.clone()), "", Some(slot))
        };
        let out = apply_operation(OpKind::And, &operand(&l, 2), &operand(&r, 1), &config);
        let got: BTreeSet<String> = out.value.candidates.iter().map(|c| normalize_answer(&c.answer)).collect();
        let ls: BTreeSet<String> = l.iter().map(|c| normalize_answer(&c.answer)).collect();
        let rs: BTreeSet<String> = r.iter().map(|c| normalize_answer(&c.answer)).collect();
        assert_eq!(got, &ls & &rs);
    }
}

fn fallback_and_executability() {
    let mut store = FactStore::new();
    store.insert("Who directed Titanic?", ["James Cameron"]);
    store.insert("Where was James Cameron born?", ["Kapuskasing"]);
    let reader = OracleReader::new(store);
    let config = ExecConfig::default();
    let valid = "JOIN[ Where was Ans#1 born?, Who directed Titanic? ]";
    let invalid = "JOIN[ Where was Ans#1 born?, Who directed Titanic?";

    let result = execute_with_fallback(&[invalid, valid], &[], &reader, &config).unwrap();
    assert_eq!(result.predicted(), "Kapuskasing");
    assert_eq!(result.executed_candidate(), 2);
    assert_eq!(result.trace.attempts.len(), 2);
    assert_eq!(result.trace.attempts[0].status, ExecStatus::HardFail("parse_error".into()));

    let forward = "JOIN[ Where was Ans#2 born?, Who directed Titanic? ]";
    let batch: Vec<Vec<&str>> = (0..10)
        .map(|i| match i {
            0..=6 => vec![valid, invalid],
            7 => vec![invalid, valid],
            8 => vec![forward, valid],
            _ => vec![invalid, forward, valid],
        })
        .collect();
    let first: Vec<Option<usize>> = batch
        .iter()
        .map(|candidates| execute_with_fallback(candidates, &[], &reader, &config).ok().map(|r| r.executed_candidate()))
        .collect();
    let rate = executability_rate(&first);
    assert_eq!((rate.top1_rate, rate.topk_rate), (0.7, 1.0));
}

struct Down;

impl Reader for Down {
    fn answer(&self, _: &ReaderRequest) -> Result<Vec<ReaderCandidate>, ReaderError> {
        Err(ReaderError::Unavailable {
            endpoint: "stub".into(),
            attempts: 1,
            reason: "connection refused".into(),
        })
    }
}

fn error_taxonomy() {
    let config = ExecConfig::default();
    let items = [("p", "JOIN[ broken"), ("r", "Who directed Titanic?")];
    let predictions: Vec<ScoredPrediction> = items
        .iter()
        .map(|(id, text)| {
            let (predicted, status) = match execute_with_fallback(&[*text], &[], &Down, &config) {
                Ok(r) => (r.predicted(), r.status().clone()),
                Err(e) => (String::new(), e.status()),
            };
            ScoredPrediction {
                id: id.to_string(),
                predicted,
                gold: vec!["James Cameron".into()],
                reasoning_type: None,
                exec_status: status,
            }
        })
        .collect();
    let report = aggregate(&predictions, GroupBy::None);
    assert_eq!(report.overall.failures.parse(), 1);
    assert_eq!(report.overall.failures.execution(), 1);
    assert_eq!(predictions[1].exec_status, ExecStatus::HardFail("reader_unavailable".into()));
}

fn main() -> ExitCode {
    let criteria: [(&str, fn(), Duration); 8] = [
        ("operation return types", operation_returns, Duration::from_secs(1)),
        ("cup final walkthrough and trace", cup_final_walkthrough, Duration::from_secs(1)),
        ("grammar roundtrip, 1000 trees", grammar_roundtrip, Duration::from_secs(10)),
        ("builder closed loop on samples", builder_closed_loop, Duration::from_secs(5)),
        ("EM/F1 metric parity", metric_parity, Duration::from_secs(5)),
        ("SUB/ADD and AND oracles", arithmetic_and_intersection, Duration::from_secs(5)),
        ("fallback and executability rates", fallback_and_executability, Duration::from_secs(1)),
        ("parse vs execution error taxonomy", error_taxonomy, Duration::from_secs(1)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check));
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(()) if elapsed <= budget => "PASS".to_string(),
            Ok(()) => format!("FAIL (over {budget:?} budget)"),
            Err(e) => {
                let msg = e
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                format!("FAIL: {msg}")
            }
        };
        if !verdict.starts_with("PASS") {
            failed += 1;
        }
        println!("acceptance {}: {name} ... {verdict} ({:.1?})", i + 1, elapsed);
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
