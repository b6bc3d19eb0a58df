#![allow(dead_code)]

use std::path::PathBuf;

use hexpr_core::builder::{
    build_from_2wiki, build_from_musique, musique_facts, twowiki_facts, MusiqueRecord, TemplateTable,
    TwoWikiRecord,
};
use hexpr_core::eval::exact_match;
use hexpr_core::jsonl::read_jsonl_file;
use hexpr_core::readers::{FactStore, OracleReader};
use hexpr_core::{execute, validate, ExecConfig, HExpr};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn musique_records() -> Vec<MusiqueRecord> {
    read_jsonl_file(data_path("musique_sample.jsonl")).unwrap()
}

pub fn twowiki_records() -> Vec<TwoWikiRecord> {
    read_jsonl_file(data_path("twowiki_sample.jsonl")).unwrap()
}

pub fn oracle(facts: Vec<(String, String)>) -> OracleReader {
    let mut store = FactStore::new();
    for (q, a) in facts {
        store.insert(&q, [a]);
    }
    OracleReader::new(store)
}

/// Builds, validates and executes one record against its own annotations.
/// Returns the failure reason, if any.
pub fn closed_loop(id: &str, expr: &HExpr, reader: &OracleReader, gold: &[String]) -> Result<(), String> {
    let report = validate(expr);
    if !report.executable {
        return Err(format!("{id}: not executable: {:?}", report.diagnostics));
    }
    let result = execute(expr, &[], reader, &ExecConfig::default());
    if !result.status().is_success() {
        return Err(format!("{id}: status {} in {expr}", result.status()));
    }
    let predicted = result.predicted();
    if exact_match(&predicted, gold) != 1.0 {
        return Err(format!("{id}: predicted {predicted:?}, gold {gold:?}, expression {expr}"));
    }
    Ok(())
}

pub fn musique_closed_loop(record: &MusiqueRecord) -> Result<(), String> {
    let expr = build_from_musique(record).map_err(|e| e.to_string())?;
    closed_loop(&record.id, &expr, &oracle(musique_facts(record)), &record.gold_answers())
}

pub fn twowiki_closed_loop(record: &TwoWikiRecord) -> Result<(), String> {
    let templates = TemplateTable::default();
    let expr = build_from_2wiki(record, &templates).map_err(|e| e.to_string())?;
    closed_loop(
        &record.id,
        &expr,
        &oracle(twowiki_facts(record, &templates)),
        std::slice::from_ref(&record.answer),
    )
}

pub mod strategies {
    use hexpr_core::{HExpr, OpKind};
    use proptest::prelude::*;

    /// Primitive text: words over an alphabet that exercises escaping
    /// (commas, brackets, backslashes) and placeholder look-alikes.
    pub fn primitive_text() -> impl Strategy<Value = String> {
        let word = prop_oneof![
            4 => "[A-Za-z][a-z']{0,7}",
            1 => "[0-9]{1,4}",
            1 => Just(",".to_string()),
            1 => Just("a,b".to_string()),
            1 => Just("[x]".to_string()),
            1 => Just("\\".to_string()),
            1 => Just("Ans#1".to_string()),
            1 => Just("?".to_string()),
        ];
        prop::collection::vec(word, 1..6).prop_map(|w| w.join(" "))
    }

    pub fn op_kind() -> impl Strategy<Value = OpKind> {
        prop::sample::select(OpKind::ALL.to_vec())
    }

    /// Trees of depth at most `max_depth` (a lone primitive has depth 1).
    pub fn hexpr(max_depth: u32) -> impl Strategy<Value = HExpr> {
        primitive_text()
            .prop_map(HExpr::primitive)
            .prop_recursive(max_depth.saturating_sub(1), 64, 2, |inner| {
                (op_kind(), inner.clone(), inner).prop_map(|(k, l, r)| HExpr::op(k, l, r))
            })
    }
}
